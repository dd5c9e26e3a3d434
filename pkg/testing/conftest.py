"""
File: conftest.py
File-Path: testing/conftest.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    shared fixtures: toy rating matrices, ratings files on disk, small
    synthetic benchmarks and an in-memory run registry
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dataset.ratings import RatingRecord, build_rating_matrix, from_triplets
from dataset.splits import make_domain_pair

# small synthetic benchmark as --set overrides
SYNTHETIC_OVERRIDES = (
    'data.source=synthetic',
    'synthetic.n_linked=24',
    'synthetic.n_cold=6',
    'synthetic.n_items_target=15',
    'synthetic.n_items_auxiliary=15',
    'synthetic.K_true=2',
    'synthetic.density=0.4',
    'mfus.K=3',
    'mfus.max_outer_iters=30',
    'gbt.max_stages=20',
)


def matrix_of(*triples):
    """RatingMatrix from (user, item, rating) tuples"""
    return build_rating_matrix([RatingRecord(u, i, r) for u, i, r in triples])


def random_matrix(rng, n_users, n_items, density=0.5):
    """random ratings where every user rates at least one item"""
    mask = rng.random((n_users, n_items)) < density
    mask[np.arange(n_users), rng.integers(0, n_items, size=n_users)] = True
    rows, cols = np.nonzero(mask)
    values = rng.integers(1, 6, size=rows.size)
    return from_triplets([f"u{u}" for u in range(n_users)], [f"i{i}" for i in range(n_items)],
                         rows, cols, values)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def write_ratings(tmp_path):
    """writes (user, item, rating) tuples as a csv and returns its path"""
    def write(name, triples, header=None):
        path = tmp_path / name
        lines = [header] if header else []
        lines += [",".join(str(part) for part in triple) for triple in triples]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path
    return write


@pytest.fixture
def af_toy_files(write_ratings):
    """two linked users; with u1 cold-start the average-filling prediction is 3"""
    auxiliary = write_ratings("auxiliary.csv", [("u1", "a1", 5), ("u2", "a1", 3)])
    target = write_ratings("target.csv", [("u2", "t2", 1), ("u1", "t2", 4)])
    return target, auxiliary


@pytest.fixture
def single_neighbor_files(write_ratings):
    """u2 rates the auxiliary items exactly like u1, the only other linked user"""
    auxiliary = write_ratings("auxiliary.csv", [("u1", "a1", 5), ("u2", "a1", 5),
                                                ("u1", "a2", 3), ("u2", "a2", 3)])
    target = write_ratings("target.csv", [("u1", "t1", 4), ("u1", "t2", 2), ("u2", "t1", 5)])
    return target, auxiliary


@pytest.fixture
def linked_pair():
    """ten linked users; 100 auxiliary and 30 target ratings"""
    users = [f"u{u}" for u in range(10)]
    auxiliary = matrix_of(*[(u, f"a{i}", 1 + (k + i) % 5) for k, u in enumerate(users) for i in range(10)])
    target = matrix_of(*[(u, f"t{i}", 1 + (k * i) % 5) for k, u in enumerate(users) for i in range(3)])
    return make_domain_pair(target, auxiliary)


@pytest.fixture
def registry():
    """fresh in-memory registry; yields a session"""
    from db.server import get_session, init_database

    assert init_database("sqlite://")
    session = get_session()
    yield session
    session.close()
