"""
File: metric_record.py
File-Path: src/db/schema/metric_record.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    SQLAlchemy ORM model for one metric report of a run ('MetricReports' table).

Inputs:
    SQLAlchemy types/relationship helpers and the declarative Base
    and the ExperimentRun model

Outputs:
    The mapped `MetricRecord` class usable with SQLAlchemy sessions and __repr__ for debug
"""

from sqlalchemy import Column, Float, ForeignKey, Integer, String
from sqlalchemy.orm import relationship
from db.server import Base


class MetricRecord(Base):
    """class for the metric reports table"""
    __tablename__ = 'MetricReports'

    ReportID = Column(Integer, primary_key=True, autoincrement=True)
    RunID = Column(Integer, ForeignKey('ExperimentRuns.RunID'), nullable=False)
    Protocol = Column(String(20), nullable=False)
    Point = Column(String(60), nullable=False)
    Method = Column(String(20), nullable=False)
    Rmse = Column(Float, nullable=False)
    Mae = Column(Float, nullable=False)
    NPredictions = Column(Integer, nullable=False)
    Split = Column(String(120))
    WallTime = Column(Float)

    # relationship
    run = relationship("ExperimentRun", back_populates="reports")

    def __repr__(self):
        return f"REPORT {self.Method} @ {self.Protocol}/{self.Point}: rmse={self.Rmse:.4f} mae={self.Mae:.4f}"
