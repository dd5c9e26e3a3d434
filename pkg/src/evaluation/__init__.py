"""
File: __init__.py
File-Path: src/evaluation/__init__.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    metrics, synthetic benchmarks, experiment protocols and report emission
"""
