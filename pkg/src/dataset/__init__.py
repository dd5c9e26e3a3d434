"""
File: __init__.py
File-Path: src/dataset/__init__.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    ratings ingest, sparse matrices and experiment splits
"""

from .ratings import (
    MATRIX_VERSION,
    RatingRecord,
    RatingMatrix,
    parse_ratings_file,
    build_rating_matrix,
    filter_min_ratings,
    from_triplets,
    matrix_from_dict,
    save_matrix,
    load_matrix,
)
from .splits import (
    SplitSpec,
    DomainPair,
    make_domain_pair,
    check_no_leakage,
    select_cold_start_split,
    subsample_density,
    build_split,
)

__all__ = [
    'MATRIX_VERSION',
    'RatingRecord',
    'RatingMatrix',
    'parse_ratings_file',
    'build_rating_matrix',
    'filter_min_ratings',
    'from_triplets',
    'matrix_from_dict',
    'save_matrix',
    'load_matrix',
    'SplitSpec',
    'DomainPair',
    'make_domain_pair',
    'check_no_leakage',
    'select_cold_start_split',
    'subsample_density',
    'build_split',
]
