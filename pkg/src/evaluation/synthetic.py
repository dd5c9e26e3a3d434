"""
File: synthetic.py
File-Path: src/evaluation/synthetic.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    planted-factor cross-domain benchmark: users get auxiliary latent
    vectors (optionally cluster structured), target latent vectors come from
    a known cross-domain map plus noise, and ratings are quantized dot
    products observed at a configured density

Inputs:
    SyntheticSpec

Outputs:
    SyntheticBenchmark (unsplit DomainPair, designated cold-start users, truth)
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from dataset.ratings import RatingMatrix, from_triplets
from dataset.splits import DomainPair, make_domain_pair
from helpers.errors import ConfigError
from helpers.logging_helper import log_stage
from helpers.random_helper import make_rng
from helpers.validation_helper import validate_synthetic_spec

CROSS_MAPS = ('linear', 'piecewise', 'polynomial')


@dataclass(frozen=True)
class SyntheticSpec:
    n_linked: int = 400
    n_cold: int = 100
    n_items_target: int = 200
    n_items_auxiliary: int = 200
    K_true: int = 5
    cross_map: str = 'piecewise'
    noise_sd: float = 0.1
    density: float = 0.05
    n_clusters: int = 1
    seed: int = 0

    def __post_init__(self):
        errors = validate_synthetic_spec(self.n_linked, self.n_cold, self.n_items_target,
                                         self.n_items_auxiliary, self.K_true, self.cross_map,
                                         self.noise_sd, self.density, self.n_clusters)
        if errors:
            raise ConfigError(errors, module='eval')

    @property
    def n_users(self) -> int:
        return self.n_linked + self.n_cold


@dataclass(frozen=True, eq=False)
class SyntheticTruth:
    U_aux: np.ndarray
    U_tgt: np.ndarray
    V_aux: np.ndarray
    V_tgt: np.ndarray
    labels: np.ndarray
    cross_map: str


@dataclass(frozen=True, eq=False)
class SyntheticBenchmark:
    pair: DomainPair
    cold_start_users: Tuple[str, ...]
    truth: SyntheticTruth

    def domain(self, name: str) -> RatingMatrix:
        """single-domain view"""
        if name not in ('target', 'auxiliary'):
            raise ValueError(f"unknown domain {name!r}")
        return self.pair.target if name == 'target' else self.pair.auxiliary


def quantize_ratings(scores: np.ndarray) -> np.ndarray:
    """affine rescale of all scores onto [1, 5], then round half up"""
    lo, hi = float(scores.min()), float(scores.max())
    if hi == lo:
        return np.full(scores.shape, 3, dtype=np.int64)
    scaled = 1.0 + 4.0 * (scores - lo) / (hi - lo)
    return np.clip(np.floor(scaled + 0.5), 1, 5).astype(np.int64)


def _cross_map(U_aux: np.ndarray, kind: str, rng: np.random.Generator) -> np.ndarray:
    K = U_aux.shape[1]
    M = rng.normal(0.0, 1.0 / math.sqrt(K), size=(K, K))
    if kind == 'linear':
        return U_aux @ M.T
    M2 = rng.normal(0.0, 1.0 / math.sqrt(K), size=(K, K))
    if kind == 'piecewise':
        # two linear regimes split on the sign of the first coordinate
        return np.where(U_aux[:, :1] > 0, U_aux @ M.T, U_aux @ M2.T)
    return U_aux @ M.T + 0.5 * (U_aux ** 2) @ M2.T


def _observe(ratings: np.ndarray, density: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """observed cells; every user keeps at least one rating"""
    n, m = ratings.shape
    mask = rng.random((n, m)) < density if density < 1 else np.ones((n, m), dtype=bool)
    empty = np.flatnonzero(~mask.any(axis=1))
    if empty.size:
        mask[empty, rng.integers(0, m, size=empty.size)] = True
    return np.nonzero(mask)


def _domain_matrix(user_ids, prefix: str, U: np.ndarray, V: np.ndarray, density: float,
                   rng: np.random.Generator) -> RatingMatrix:
    ratings = quantize_ratings(U @ V.T)
    rows, cols = _observe(ratings, density, rng)
    item_ids = [f"{prefix}{i:04d}" for i in range(V.shape[0])]
    return from_triplets(user_ids, item_ids, rows, cols, ratings[rows, cols])


def generate_synthetic(spec: SyntheticSpec) -> SyntheticBenchmark:
    """
    draws the benchmark from spec.seed alone

    Every user rates in both domains; the last n_cold users are the
    designated cold-start users whose target ratings serve as the test set.
    """
    rng = make_rng(spec.seed)
    n, K = spec.n_users, spec.K_true

    labels = rng.integers(0, spec.n_clusters, size=n)
    if spec.n_clusters > 1:
        centers = rng.normal(0.0, 1.0, size=(spec.n_clusters, K))
        U_aux = centers[labels] + rng.normal(0.0, 0.35, size=(n, K))
    else:
        U_aux = rng.normal(0.0, 1.0, size=(n, K))

    U_tgt = _cross_map(U_aux, spec.cross_map, rng)
    if spec.noise_sd > 0:
        U_tgt = U_tgt + rng.normal(0.0, spec.noise_sd, size=U_tgt.shape)
    V_aux = rng.normal(0.0, 1.0, size=(spec.n_items_auxiliary, K))
    V_tgt = rng.normal(0.0, 1.0, size=(spec.n_items_target, K))

    user_ids = [f"u{u:05d}" for u in range(n)]
    auxiliary = _domain_matrix(user_ids, 'a', U_aux, V_aux, spec.density, rng)
    target = _domain_matrix(user_ids, 't', U_tgt, V_tgt, spec.density, rng)

    pair = make_domain_pair(target, auxiliary)
    truth = SyntheticTruth(U_aux, U_tgt, V_aux, V_tgt, labels, spec.cross_map)
    log_stage("generated synthetic benchmark", component='eval', users=n, cross_map=spec.cross_map,
              target_ratings=target.nnz, auxiliary_ratings=auxiliary.nnz)
    return SyntheticBenchmark(pair, tuple(user_ids[spec.n_linked:]), truth)
