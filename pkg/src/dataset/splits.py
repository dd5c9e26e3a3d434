"""
File: splits.py
File-Path: src/dataset/splits.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    two-domain pairing, cold-start selection and the density-level /
    overlap-level training set construction

Inputs:
    target and auxiliary RatingMatrix objects, SplitSpec, seeds

Outputs:
    DomainPair training views and held-out target ratings of cold-start users
"""

import math
from dataclasses import dataclass, field, replace
from typing import List, Tuple

import numpy as np

from dataset.ratings import RatingMatrix, RatingRecord
from helpers.errors import ConfigError, EmptyDataError, SplitError
from helpers.logging_helper import log_stage
from helpers.random_helper import make_rng
from helpers.validation_helper import validate_split_spec


@dataclass(frozen=True)
class SplitSpec:
    cold_start_fraction: float = 0.5
    density_level: float = 1.0
    overlap_level: float = 1.0
    seed: int = 0
    # replaces sampling when set
    cold_start_users: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'cold_start_users', tuple(self.cold_start_users))
        errors = validate_split_spec(self.cold_start_fraction, self.density_level, self.overlap_level)
        if errors:
            raise ConfigError(errors, module='dataset')

    @property
    def effective_cold_start_fraction(self) -> float:
        """an overlap level below 1 overrides the cold-start fraction"""
        if self.overlap_level < 1:
            return 1.0 - self.overlap_level
        return self.cold_start_fraction

    def descriptor(self) -> str:
        if self.cold_start_users:
            return (f"cold=fixed:{len(self.cold_start_users)},density={self.density_level:g},"
                    f"overlap={self.overlap_level:g},seed={self.seed}")
        return (f"cold={self.effective_cold_start_fraction:g},density={self.density_level:g},"
                f"overlap={self.overlap_level:g},seed={self.seed}")


@dataclass(frozen=True)
class DomainPair:
    """
    target and auxiliary matrices plus the user roles of the current split

    linked_users rate in both domains; cold_start_users rate only in the
    auxiliary domain and have been removed from the target vocabulary.
    """
    target: RatingMatrix
    auxiliary: RatingMatrix
    linked_users: frozenset = field(default_factory=frozenset)
    cold_start_users: frozenset = field(default_factory=frozenset)

    def ordered_linked(self) -> List[str]:
        """linked users in auxiliary vocabulary order"""
        return [uid for uid in self.auxiliary.user_ids if uid in self.linked_users]

    def ordered_cold_start(self) -> List[str]:
        return [uid for uid in self.auxiliary.user_ids if uid in self.cold_start_users]


def make_domain_pair(target: RatingMatrix, auxiliary: RatingMatrix) -> DomainPair:
    """pairs two domains; users with ratings in both become linked"""
    linked = target.users_with_ratings() & auxiliary.users_with_ratings()
    return DomainPair(target, auxiliary, frozenset(linked), frozenset())


def check_no_leakage(pair: DomainPair):
    """no cold-start user may own a target rating"""
    leaked = pair.cold_start_users & pair.target.users_with_ratings()
    if leaked:
        raise SplitError(f"{len(leaked)} cold-start users still have target ratings")


def select_cold_start_split(pair: DomainPair, spec: SplitSpec) -> Tuple[DomainPair, List[RatingRecord]]:
    """
    samples floor(fraction * |linked|) linked users as cold-start users and
    holds out all of their target ratings

    Args:
        pair: unsplit pair
        spec: split protocol; overlap_level < 1 means fraction = 1 - overlap_level

    Returns:
        (train pair, held-out target ratings in target entry order)
    """
    linked = pair.ordered_linked()
    if not linked:
        raise SplitError("no linked users to draw cold-start users from")

    if spec.cold_start_users:
        unknown = [uid for uid in spec.cold_start_users if uid not in pair.linked_users]
        if unknown:
            raise SplitError(f"fixed cold-start users are not linked: {', '.join(unknown)}")
        cold = frozenset(spec.cold_start_users)
    else:
        fraction = spec.effective_cold_start_fraction
        size = int(math.floor(fraction * len(linked) + 1e-9))
        if size < 1:
            raise SplitError(f"cold-start fraction {fraction:g} of {len(linked)} linked users selects nobody")
        rng = make_rng(spec.seed)
        chosen = rng.choice(len(linked), size=size, replace=False)
        cold = frozenset(linked[j] for j in np.sort(chosen))

    test = [record for record in pair.target.records() if record.user_id in cold]
    train_target = pair.target.without_users(cold)
    train = DomainPair(train_target, pair.auxiliary,
                       frozenset(pair.linked_users - cold),
                       frozenset(pair.cold_start_users | cold))
    check_no_leakage(train)

    log_stage("selected cold-start users", component='dataset',
              linked=len(train.linked_users), cold_start=len(cold), test_ratings=len(test))
    return train, test


def _sample_entries(matrix: RatingMatrix, level: float, rng: np.random.Generator) -> RatingMatrix:
    size = int(math.floor(level * matrix.nnz + 1e-9))
    keep = np.zeros(matrix.nnz, dtype=bool)
    keep[rng.choice(matrix.nnz, size=size, replace=False)] = True
    return matrix.with_entries(keep)


def subsample_density(train: DomainPair, level: float, seed: int) -> DomainPair:
    """
    keeps level * |entries| auxiliary ratings and level * |entries| of the
    remaining target ratings; level 1 returns the pair unchanged
    """
    if not 0 < level <= 1:
        raise ValueError("density level must lie in (0, 1]")
    if level == 1:
        return train

    rng = make_rng(seed)
    auxiliary = _sample_entries(train.auxiliary, level, rng)
    target = _sample_entries(train.target, level, rng)
    if auxiliary.nnz == 0 or target.nnz == 0:
        raise EmptyDataError(f"density level {level:g} leaves a domain without ratings")

    # a linked user needs ratings on both sides to anchor a mapping pair
    linked = train.linked_users & target.users_with_ratings() & auxiliary.users_with_ratings()
    sampled = replace(train, target=target, auxiliary=auxiliary, linked_users=frozenset(linked))

    log_stage("subsampled density", component='dataset', level=level,
              auxiliary=auxiliary.nnz, target=target.nnz, linked=len(linked))
    return sampled


def build_split(pair: DomainPair, spec: SplitSpec, density_seed: int) -> Tuple[DomainPair, List[RatingRecord]]:
    """cold-start selection followed by density subsampling"""
    train, test = select_cold_start_split(pair, spec)
    return subsample_density(train, spec.density_level, density_seed), test
