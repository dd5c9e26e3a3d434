"""
File: validation_helper.py
File-Path: src/helpers/validation_helper.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    hyperparameter and protocol validation helper

Inputs:
    raw hyperparameter values

Outputs:
    validation errors as a field -> message dict (empty when valid)
"""

import math
from typing import Dict, Iterable, Mapping, Optional, Sequence

RATING_SCALE = (1, 2, 3, 4, 5)
KNOWN_METHODS = ('cdlfm', 'af', 'mf_gbt', 'mfus_gbt', 'tmatrix')
KNOWN_PROTOCOLS = ('single', 'density', 'overlap', 'sim_sweep')
ETA_POLICIES = ('fixed_one', 'exact_line_search')


def _positive(value) -> bool:
    return value is not None and math.isfinite(value) and value > 0


def _nonnegative(value) -> bool:
    return value is not None and math.isfinite(value) and value >= 0


def validate_similarity_params(gamma1: float, gamma2: float, gamma3: float, sigma: float,
                               base: float, rho: Sequence[float], high_rating_threshold: int,
                               rated_map: Optional[Mapping[int, float]] = None) -> Dict[str, str]:
    """validates the similarity measure parameters and returns errors dict"""
    errors = {}

    for name, value in (('gamma1', gamma1), ('gamma2', gamma2), ('gamma3', gamma3)):
        if not _positive(value):
            errors[name] = f"{name} must be > 0"

    if not _positive(sigma):
        errors['sigma'] = "sigma must be > 0"

    if base is None or not math.isfinite(base) or base <= 1:
        errors['base'] = "base must be > 1"

    if rho is None or len(rho) != 3:
        errors['rho'] = "rho must have exactly three weights"
    elif any(not _nonnegative(w) for w in rho):
        errors['rho'] = "rho weights must be nonnegative"
    elif abs(sum(rho) - 1.0) > 1e-12:
        errors['rho'] = f"rho weights must sum to 1 (got {sum(rho)!r})"

    if high_rating_threshold not in RATING_SCALE:
        errors['high_rating_threshold'] = "high_rating_threshold must be a rating in 1..5"

    if rated_map is not None:
        missing = [r for r in RATING_SCALE if r not in rated_map]
        if missing:
            errors['rated_map'] = f"rated_map is missing ratings {missing}"
        elif any(not (0.0 <= rated_map[r] <= 1.0) for r in RATING_SCALE):
            errors['rated_map'] = "rated_map probabilities must lie in [0, 1]"

    return errors


def validate_mfus_hyper(K: int, alpha: float, beta: float, max_outer_iters: int, tol: float,
                        ls_shrink: float, ls_c: float, init_scale: float) -> Dict[str, str]:
    """validates matrix factorization hyperparameters and returns errors dict"""
    errors = {}

    if not isinstance(K, int) or K < 1:
        errors['K'] = "K must be a positive integer"
    if not _nonnegative(alpha):
        errors['alpha'] = "alpha must be >= 0"
    if not _nonnegative(beta):
        errors['beta'] = "beta must be >= 0"
    if not isinstance(max_outer_iters, int) or max_outer_iters < 1:
        errors['max_outer_iters'] = "max_outer_iters must be a positive integer"
    # tol may be inf: stop after the first sweep
    if tol is None or math.isnan(tol) or tol <= 0:
        errors['tol'] = "tol must be > 0"
    if ls_shrink is None or not 0 < ls_shrink < 1:
        errors['ls_shrink'] = "ls_shrink must lie in (0, 1)"
    if ls_c is None or not 0 < ls_c < 1:
        errors['ls_c'] = "ls_c must lie in (0, 1)"
    if not _positive(init_scale):
        errors['init_scale'] = "init_scale must be > 0"

    return errors


def validate_gbt_hyper(nu: float, eta_policy: str, max_stages: int, tol: float,
                       max_depth: Optional[int], min_leaf: int) -> Dict[str, str]:
    """validates boosting hyperparameters and returns errors dict"""
    errors = {}

    if nu is None or not 0 < nu <= 1:
        errors['nu'] = "nu must lie in (0, 1]"
    if eta_policy not in ETA_POLICIES:
        errors['eta_policy'] = f"eta_policy must be one of {', '.join(ETA_POLICIES)}"
    if not isinstance(max_stages, int) or max_stages < 0:
        errors['max_stages'] = "max_stages must be a nonnegative integer"
    if tol is None or math.isnan(tol) or tol <= 0:
        errors['tol'] = "tol must be > 0"
    # None means unbounded depth
    if max_depth is not None and (not isinstance(max_depth, int) or max_depth < 1):
        errors['max_depth'] = "max_depth must be >= 1"
    if not isinstance(min_leaf, int) or min_leaf < 1:
        errors['min_leaf'] = "min_leaf must be >= 1"

    return errors


def validate_split_spec(cold_start_fraction: float, density_level: float,
                        overlap_level: float) -> Dict[str, str]:
    """validates split protocol parameters and returns errors dict"""
    errors = {}

    if cold_start_fraction is None or not 0 < cold_start_fraction < 1:
        errors['cold_start_fraction'] = "cold_start_fraction must lie in (0, 1)"
    if density_level is None or not 0 < density_level <= 1:
        errors['density_level'] = "density_level must lie in (0, 1]"
    if overlap_level is None or not 0 < overlap_level <= 1:
        errors['overlap_level'] = "overlap_level must lie in (0, 1]"
    elif density_level is not None and density_level < 1 and overlap_level < 1:
        errors['overlap_level'] = "density_level and overlap_level cannot both be below 1"

    return errors


def validate_mapping(sim: float, fallback_k: int) -> Dict[str, str]:
    """validates neighborhood gating parameters and returns errors dict"""
    errors = {}

    if sim is None or not 0 <= sim < 1:
        errors['sim'] = "sim must lie in [0, 1)"
    if not isinstance(fallback_k, int) or fallback_k < 1:
        errors['fallback_k'] = "fallback_k must be >= 1"

    return errors


def validate_methods(methods: Iterable[str]) -> Dict[str, str]:
    """validates a method list and returns errors dict"""
    errors = {}
    methods = list(methods)

    if not methods:
        errors['methods'] = "at least one method is required"
    else:
        unknown = [m for m in methods if m not in KNOWN_METHODS]
        if unknown:
            errors['methods'] = (f"unknown method(s) {', '.join(unknown)}; "
                                 f"expected a subset of {', '.join(KNOWN_METHODS)}")

    return errors


def validate_synthetic_spec(n_linked: int, n_cold: int, n_items_target: int, n_items_auxiliary: int,
                            K_true: int, cross_map: str, noise_sd: float, density: float,
                            n_clusters: int) -> Dict[str, str]:
    """validates a synthetic benchmark description and returns errors dict"""
    errors = {}

    for name, value in (('n_linked', n_linked), ('n_cold', n_cold),
                        ('n_items_target', n_items_target),
                        ('n_items_auxiliary', n_items_auxiliary),
                        ('K_true', K_true), ('n_clusters', n_clusters)):
        if not isinstance(value, int) or value < 1:
            errors[name] = f"{name} must be >= 1"

    if cross_map not in ('linear', 'piecewise', 'polynomial'):
        errors['cross_map'] = "cross_map must be linear, piecewise or polynomial"
    if not _nonnegative(noise_sd):
        errors['noise_sd'] = "noise_sd must be >= 0"
    if density is None or not 0 < density <= 1:
        errors['density'] = "density must lie in (0, 1]"

    return errors
