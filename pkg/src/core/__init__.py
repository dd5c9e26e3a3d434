"""
File: __init__.py
File-Path: src/core/__init__.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    similarity measures, MFUS, boosted trees, cross-domain mapping and baselines
"""
