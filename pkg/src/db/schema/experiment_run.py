"""
File: experiment_run.py
File-Path: src/db/schema/experiment_run.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    SQLAlchemy ORM model for one recorded CLI invocation ('ExperimentRuns' table).
    Keeps the effective config snapshot so any run can be replayed.

Inputs:
    SQLAlchemy types/relationship helpers and the declarative Base

Outputs:
    The mapped `ExperimentRun` class usable with SQLAlchemy sessions and __repr__ for debug
"""

from sqlalchemy import Column, DateTime, Integer, String, Text
from sqlalchemy.orm import relationship
from db.server import Base


class ExperimentRun(Base):
    """class for the experiment runs table"""
    __tablename__ = 'ExperimentRuns'

    RunID = Column(Integer, primary_key=True, autoincrement=True)
    ConfigHash = Column(String(16), nullable=False, index=True)
    Command = Column(String(20), nullable=False)
    Protocol = Column(String(20))
    Snapshot = Column(Text, nullable=False)
    Prng = Column(String(40), nullable=False)
    OutputDir = Column(String(255))
    CreatedAt = Column(DateTime, nullable=False)

    # relationships
    reports = relationship("MetricRecord", back_populates="run", cascade="all, delete-orphan",
                           order_by="MetricRecord.ReportID")

    def __repr__(self):
        return f"RUN {self.RunID}: {self.Command} config={self.ConfigHash} at {self.CreatedAt}"
