"""
File: __init__.py
File-Path: src/commands/__init__.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    one click command per coldmap subcommand, registered on the group in app.py
"""

from .ingest import ingest_cmd
from .similarity import similarity_cmd
from .factorize import factorize_cmd
from .run import run_cmd
from .experiment import experiment_cmd
from .grid import grid_cmd
from .history import history_cmd

__all__ = [
    'ingest_cmd',
    'similarity_cmd',
    'factorize_cmd',
    'run_cmd',
    'experiment_cmd',
    'grid_cmd',
    'history_cmd',
]
