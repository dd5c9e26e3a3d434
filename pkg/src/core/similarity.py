"""
File: similarity.py
File-Path: src/core/similarity.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    rating-behavior user similarities within one domain: common-rating
    similarity (S1), no-interest similarity (S2), rating-bias similarity (S3)
    and their weighted combination

Inputs:
    RatingMatrix of one domain, SimilarityParams

Outputs:
    SimilarityMatrix objects stored as condensed upper triangles
"""

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from joblib import Parallel, delayed
from scipy.spatial.distance import squareform

from dataset.ratings import RatingMatrix
from helpers.errors import ArtifactError, ConfigError, DimensionError
from helpers.logging_helper import log_stage
from helpers.validation_helper import RATING_SCALE, validate_similarity_params

SIM_VERSION = "coldmap-sim-v1"
COMPONENTS = ('S1', 'S2', 'S3', 'combined')

# no-interest probability of a rated item, by rating
DEFAULT_RATED_MAP = {1: 1.0, 2: 0.8, 3: 0.5, 4: 0.2, 5: 0.0}

# cells per similarity block, bounds the memory of one chunk
_BLOCK_CELLS = 1 << 22


@dataclass(frozen=True)
class SimilarityParams:
    gamma1: float = 0.25
    gamma2: float = 3.0
    gamma3: float = 2.0
    sigma: float = 6.0
    base: float = 2.0
    rho: Tuple[float, float, float] = (0.6, 0.2, 0.2)
    high_rating_threshold: int = 4
    rated_map: Mapping[int, float] = field(default_factory=lambda: dict(DEFAULT_RATED_MAP))

    def __post_init__(self):
        object.__setattr__(self, 'rho', tuple(float(w) for w in self.rho))
        object.__setattr__(self, 'rated_map', {int(k): float(v) for k, v in self.rated_map.items()})
        errors = validate_similarity_params(self.gamma1, self.gamma2, self.gamma3, self.sigma,
                                            self.base, self.rho, self.high_rating_threshold,
                                            self.rated_map)
        if errors:
            raise ConfigError(errors, module='similarity')


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """
    symmetric user x user similarities in [0, 1], diagonal defined as 1

    values holds the strict upper triangle in scipy's condensed order
    (row-major over u < v); the square form is expanded on access.
    """
    n_users: int
    values: np.ndarray
    component: str = 'combined'

    def __post_init__(self):
        expected = self.n_users * (self.n_users - 1) // 2
        if self.values.shape != (expected,):
            raise DimensionError(f"condensed similarity of {self.n_users} users needs "
                                 f"{expected} values, got {self.values.shape}", module='similarity')
        self.values.setflags(write=False)

    @property
    def n_pairs(self) -> int:
        return int(self.values.shape[0])

    @cached_property
    def _square(self) -> np.ndarray:
        if self.n_users == 1:
            square = np.ones((1, 1))
        else:
            square = squareform(self.values, checks=False).astype(np.float64)
            np.fill_diagonal(square, 1.0)
        square.setflags(write=False)
        return square

    def dense(self) -> np.ndarray:
        return self._square

    def row(self, u: int) -> np.ndarray:
        return self._square[u]

    def value(self, u: int, v: int) -> float:
        if u == v:
            return 1.0
        if u > v:
            u, v = v, u
        n = self.n_users
        return float(self.values[n * u - u * (u + 1) // 2 + (v - u - 1)])

    def to_dict(self) -> dict:
        return {
            'version': SIM_VERSION,
            'component': self.component,
            'n_users': self.n_users,
            'values': [float(x) for x in self.values],
        }


def similarity_from_dict(payload: dict) -> SimilarityMatrix:
    if payload.get('version') != SIM_VERSION:
        raise ArtifactError(f"unsupported similarity version {payload.get('version')!r}")
    return SimilarityMatrix(int(payload['n_users']), np.asarray(payload['values'], dtype=np.float64),
                            payload.get('component', 'combined'))


def save_similarity(path, matrix: SimilarityMatrix):
    """json or compressed numpy, chosen by the file extension"""
    path = Path(path)
    if path.suffix == '.npz':
        with open(path, 'wb') as handle:
            np.savez_compressed(handle, version=np.array(SIM_VERSION), component=np.array(matrix.component),
                                n_users=np.array(matrix.n_users), values=matrix.values)
    else:
        path.write_text(json.dumps(matrix.to_dict(), separators=(',', ':')), encoding='utf-8')


def load_similarity(path) -> SimilarityMatrix:
    path = Path(path)
    if path.suffix == '.npz':
        with np.load(path) as loader:
            if str(loader['version']) != SIM_VERSION:
                raise ArtifactError(f"unsupported similarity version {str(loader['version'])!r}")
            return SimilarityMatrix(int(loader['n_users']), loader['values'].astype(np.float64),
                                    str(loader['component']))
    return similarity_from_dict(json.loads(path.read_text(encoding='utf-8')))


# -- measure 1: common ratings ------------------------------------------------

def common_rating_similarity(m: RatingMatrix, u: int, v: int, gamma1: float) -> float:
    """exp(-gamma1 * D / |C|) over co-rated items, 0 when nothing is co-rated"""
    if u == v:
        raise ValueError("common_rating_similarity needs two distinct users")
    items_u, ratings_u = m.user_ratings(u)
    items_v, ratings_v = m.user_ratings(v)
    common, at_u, at_v = np.intersect1d(items_u, items_v, assume_unique=True, return_indices=True)
    if common.size == 0:
        return 0.0
    diff = float(np.sum((ratings_u[at_u] - ratings_v[at_v]) ** 2))
    return float(np.exp(-gamma1 * diff / common.size))


# -- measure 2: estimated no-interest probabilities ---------------------------

def _f3(x, sigma: float):
    return 2.0 / (1.0 + np.exp(-sigma * x)) - 1.0


def unrated_no_interest(n_u, n_i, n_hi, n_users: int, n_items: int, sigma: float):
    """the no-interest estimate of an unrated cell from its count statistics"""
    n_u, n_i, n_hi = (np.asarray(x, dtype=np.float64) for x in (n_u, n_i, n_hi))
    f1 = np.sqrt(np.clip(1.0 - n_u ** 2 / n_items ** 2, 0.0, None))
    f2 = np.sqrt(np.clip(1.0 - n_i ** 2 / n_users ** 2, 0.0, None))
    reputation = np.divide(n_hi, n_i, out=np.zeros_like(n_hi), where=n_i > 0)
    return (1.0 - f1 * f2) * (1.0 - _f3(n_i / n_users, sigma) * _f3(reputation, sigma))


def _rated_lookup(rated_map: Optional[Mapping[int, float]]) -> np.ndarray:
    rated_map = DEFAULT_RATED_MAP if rated_map is None else rated_map
    lookup = np.zeros(max(RATING_SCALE) + 1)
    for rating in RATING_SCALE:
        lookup[rating] = rated_map[rating]
    return lookup


class NoInterestProfile:
    """
    P_ui for one domain, kept in decomposed form

    Unrated cells follow [1 - f1(n_u) f2(n_i)] * g_i with
    g_i = 1 - f3(n_i / n) f3(n_Hi / n_i); rated cells come from rated_map.
    Per-user totals over all items are precomputed so a pair's sum over the
    items outside C_uv only needs the co-rated items.
    """

    def __init__(self, m: RatingMatrix, sigma: float,
                 rated_map: Optional[Mapping[int, float]] = None, high_rating_threshold: int = 4):
        self.matrix = m
        n, n_items = m.n_users, m.n_items
        n_u = m.user_counts.astype(np.float64)
        n_i = m.item_counts.astype(np.float64)
        high = m.values >= high_rating_threshold
        n_hi = np.bincount(m.cols[high], minlength=n_items).astype(np.float64)

        self.lookup = _rated_lookup(rated_map)
        self.f1 = np.sqrt(np.clip(1.0 - n_u ** 2 / n_items ** 2, 0.0, None))
        self.f2 = np.sqrt(np.clip(1.0 - n_i ** 2 / n ** 2, 0.0, None))
        # n_Hi / n_i is 0 for unrated items
        reputation = np.divide(n_hi, n_i, out=np.zeros_like(n_hi), where=n_i > 0)
        self.g = 1.0 - _f3(n_i / n, sigma) * _f3(reputation, sigma)

        self.rated = sp.csr_matrix((self.lookup[m.values], (m.rows, m.cols)), shape=(n, n_items))
        Y = m.indicator
        unrated_all = self.g.sum() - self.f1 * np.dot(self.f2, self.g)
        unrated_on_rated = Y @ self.g - self.f1 * (Y @ (self.f2 * self.g))
        self.totals = unrated_all - unrated_on_rated + np.asarray(self.rated.sum(axis=1)).ravel()

    def probability(self, u: int, i: int) -> float:
        rating = self.matrix.rating(u, i)
        if rating is not None:
            return float(self.lookup[rating])
        return float((1.0 - self.f1[u] * self.f2[i]) * self.g[i])

    def row(self, u: int) -> np.ndarray:
        """dense P_u* over every item"""
        probs = (1.0 - self.f1[u] * self.f2) * self.g
        items, ratings = self.matrix.user_ratings(u)
        probs[items] = self.lookup[ratings]
        return probs

    def pair_difference(self, u: int, v: int) -> Tuple[float, int]:
        """signed sum of P_uz - P_vz over items outside C_uv, and |C_uv|"""
        items_u, ratings_u = self.matrix.user_ratings(u)
        items_v, ratings_v = self.matrix.user_ratings(v)
        common, at_u, at_v = np.intersect1d(items_u, items_v, assume_unique=True, return_indices=True)
        inside = float(np.sum(self.lookup[ratings_u[at_u]] - self.lookup[ratings_v[at_v]]))
        return float(self.totals[u] - self.totals[v]) - inside, int(common.size)


def no_interest_probability(m: RatingMatrix, u: int, i: int, sigma: float,
                            rated_map: Optional[Mapping[int, float]] = None,
                            high_rating_threshold: int = 4) -> float:
    return NoInterestProfile(m, sigma, rated_map, high_rating_threshold).probability(u, i)


def no_interest_similarity(m: RatingMatrix, u: int, v: int, gamma2: float, sigma: float,
                           rated_map: Optional[Mapping[int, float]] = None,
                           high_rating_threshold: int = 4,
                           profile: Optional[NoInterestProfile] = None) -> float:
    """exp(-gamma2 * |sum outside C (P_u - P_v)| / (m - |C|)), 1 when every item is co-rated"""
    profile = profile or NoInterestProfile(m, sigma, rated_map, high_rating_threshold)
    signed, n_common = profile.pair_difference(u, v)
    outside = m.n_items - n_common
    if outside == 0:
        return 1.0
    return float(np.exp(-gamma2 * abs(signed) / outside))


# -- measure 3: rating biases -------------------------------------------------

def rating_bias_profiles(m: RatingMatrix, base: float) -> np.ndarray:
    """n x 5 matrix of rf(u, r) * log_base(n / uf(r)); users without ratings get zeros"""
    counts = np.bincount(m.rows * 5 + (m.values - 1), minlength=m.n_users * 5)
    counts = counts.reshape(m.n_users, 5).astype(np.float64)
    totals = counts.sum(axis=1, keepdims=True)
    rf = np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)
    uf = (counts > 0).sum(axis=0).astype(np.float64)
    idf = np.divide(np.log(m.n_users / np.where(uf > 0, uf, 1.0)), np.log(base),
                    out=np.zeros(5), where=uf > 0)
    return rf * idf


def rating_bias_profile(m: RatingMatrix, u: int, base: float) -> np.ndarray:
    if m.user_counts[u] == 0:
        raise ValueError(f"user {m.user_ids[u]!r} has no ratings")
    return rating_bias_profiles(m, base)[u]


def rating_bias_similarity(m: RatingMatrix, u: int, v: int, gamma3: float, base: float) -> float:
    profiles = rating_bias_profiles(m, base)
    for w in (u, v):
        if m.user_counts[w] == 0:
            raise ValueError(f"user {m.user_ids[w]!r} has no ratings")
    return float(np.exp(-gamma3 * abs(profiles[u].sum() - profiles[v].sum())))


# -- all pairs ---------------------------------------------------------------

class _PairwiseInputs:
    """sparse operands shared read-only by every block"""

    def __init__(self, m: RatingMatrix, params: SimilarityParams):
        self.n_items = m.n_items
        self.R = m.csr
        self.Y = m.indicator
        self.Q = self.R.multiply(self.R).tocsr()
        self.profile = NoInterestProfile(m, params.sigma, params.rated_map, params.high_rating_threshold)
        self.bias_sums = rating_bias_profiles(m, params.base).sum(axis=1)
        self.params = params


def _similarity_block(inputs: _PairwiseInputs, start: int, stop: int) -> Dict[str, np.ndarray]:
    """condensed segments of S1, S2, S3 for rows start..stop-1"""
    p = inputs.params
    R, Y, Q = inputs.R, inputs.Y, inputs.Q
    Ra, Ya, Qa = R[start:stop], Y[start:stop], Q[start:stop]

    n_common = (Ya @ Y.T).toarray()
    sq_diff = (Qa @ Y.T).toarray() + (Ya @ Q.T).toarray() - 2.0 * (Ra @ R.T).toarray()
    with np.errstate(divide='ignore', invalid='ignore'):
        s1 = np.where(n_common > 0, np.exp(-p.gamma1 * np.maximum(sq_diff, 0.0) / n_common), 0.0)

    prof = inputs.profile
    corated_u = (prof.rated[start:stop] @ Y.T).toarray()
    corated_v = (Ya @ prof.rated.T).toarray()
    signed = prof.totals[start:stop, None] - prof.totals[None, :] - (corated_u - corated_v)
    outside = inputs.n_items - n_common
    with np.errstate(divide='ignore', invalid='ignore'):
        s2 = np.where(outside > 0, np.exp(-p.gamma2 * np.abs(signed) / outside), 1.0)

    s3 = np.exp(-p.gamma3 * np.abs(inputs.bias_sums[start:stop, None] - inputs.bias_sums[None, :]))

    segments = {}
    for name, block in (('S1', s1), ('S2', s2), ('S3', s3)):
        segments[name] = np.concatenate(
            [block[u - start, u + 1:] for u in range(start, stop)]) if stop > start else np.empty(0)
    return segments


def component_similarity_matrices(m: RatingMatrix, params: SimilarityParams,
                                  jobs: int = 1) -> Dict[str, SimilarityMatrix]:
    """
    S1, S2, S3 and the rho-weighted combination for every user pair

    Rows are processed in independent chunks; chunk results are concatenated
    in row order, so the output does not depend on jobs.
    """
    n = m.n_users
    inputs = _PairwiseInputs(m, params)
    chunk = max(1, min(n, _BLOCK_CELLS // max(n, 1)))
    bounds = [(start, min(n, start + chunk)) for start in range(0, max(n - 1, 0), chunk)]

    log_stage("computing user similarities", component='similarity',
              users=n, pairs=n * (n - 1) // 2, chunks=len(bounds))
    blocks = Parallel(n_jobs=jobs, prefer='threads')(
        delayed(_similarity_block)(inputs, start, stop) for start, stop in bounds)

    result = {}
    for name in ('S1', 'S2', 'S3'):
        parts = [block[name] for block in blocks]
        values = np.concatenate(parts) if parts else np.empty(0)
        result[name] = SimilarityMatrix(n, np.clip(values, 0.0, 1.0), name)

    rho1, rho2, rho3 = params.rho
    combined = rho1 * result['S1'].values + rho2 * result['S2'].values + rho3 * result['S3'].values
    result['combined'] = SimilarityMatrix(n, np.clip(combined, 0.0, 1.0), 'combined')
    return result


def combined_similarity_matrix(m: RatingMatrix, params: SimilarityParams, jobs: int = 1) -> SimilarityMatrix:
    return component_similarity_matrices(m, params, jobs)['combined']
