"""
File: __init__.py
Author: coldmap maintainers
Date-Created: 10-18-2026
"""
# import all tables (models) so they get registered with Base.metadata
from .experiment_run import ExperimentRun
from .metric_record import MetricRecord

# make tables (models) available when importing from schema package
__all__ = [
    'ExperimentRun',
    'MetricRecord',
]
