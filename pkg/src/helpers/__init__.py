"""
File: __init__.py
File-Path: src/helpers/__init__.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    shared utils: errors, logging, validation, seeds, config and artifacts
"""

from .errors import ColdmapError, ConfigError
from .logging_helper import get_logger, log_stage, setup_logger

__all__ = [
    'ColdmapError',
    'ConfigError',
    'get_logger',
    'log_stage',
    'setup_logger',
]
