"""
File: logging_helper.py
File-Path: src/helpers/logging_helper.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    simple logging helper for pipeline events

Inputs:
    log messages and stage context, COLDMAP_LOG from the environment / .env

Outputs:
    formatted log entries to stdout
"""

import logging
import os
import sys

from dotenv import load_dotenv

load_dotenv()

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

LEVELS = {
    'error': logging.ERROR,
    'warn': logging.WARNING,
    'warning': logging.WARNING,
    'info': logging.INFO,
    'debug': logging.DEBUG,
}


def level_from_env(default: int = logging.INFO) -> int:
    """reads COLDMAP_LOG, unknown values fall back to the default"""
    name = os.getenv('COLDMAP_LOG', '').strip().lower()
    return LEVELS.get(name, default)


def setup_logger(name: str = 'coldmap', level: int = None) -> logging.Logger:
    """sets up a basic logger"""
    logger = logging.getLogger(name)

    if logger.handlers:
        return logger

    logger.setLevel(level if level is not None else level_from_env())
    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)

    return logger


logger = setup_logger('coldmap')


def get_logger(component: str) -> logging.Logger:
    """child logger for one component, e.g. coldmap.mfus"""
    return logger.getChild(component)


def set_level(name: str):
    """changes the root coldmap level by name ('error', 'warn', 'info', 'debug')"""
    if name.lower() not in LEVELS:
        raise ValueError(f"unknown log level {name!r}")
    logger.setLevel(LEVELS[name.lower()])


def log_stage(message: str, level: str = 'info', component: str = None, **context):
    """
    logs a pipeline event with key=value context

    Args:
        message: message to log
        level: log level ('debug', 'info', 'warning', 'error')
        component: child logger name, root coldmap logger when absent
        **context: appended as ' | key=value' pairs
    """
    target = get_logger(component) if component else logger
    if context:
        pairs = ' '.join(f"{key}={value}" for key, value in context.items())
        message = f"{message} | {pairs}"

    if level == 'error':
        target.error(message)
    elif level == 'warning':
        target.warning(message)
    elif level == 'debug':
        target.debug(message)
    else:
        target.info(message)
