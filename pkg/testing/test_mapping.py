"""
File: test_mapping.py
File-Path: testing/test_mapping.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    neighbor gating, per-user mapping functions, feature mapping and
    cold-start prediction
"""

import numpy as np
import pytest

from conftest import matrix_of
from core.gbt import GbtHyper
from core.mapping import (NeighborSet, PredictionTable, _map_one_user, map_cold_start_users, map_features,
                          predict_ratings, select_neighbors, train_user_mapping)
from core.mfus import FactorModel
from core.similarity import SimilarityMatrix
from dataset.ratings import RatingRecord
from dataset.splits import SplitSpec, make_domain_pair, select_cold_start_split
from helpers.errors import DimensionError, MappingError


def similarity_from_dense(dense):
    n = dense.shape[0]
    return SimilarityMatrix(n, dense[np.triu_indices(n, 1)].astype(float))


def test_neighbors_above_threshold_in_similarity_order():
    dense = np.eye(5)
    dense[0, 1:] = dense[1:, 0] = [0.5, 0.9, 0.2, 0.5]
    S = similarity_from_dense(dense)
    neighbors = select_neighbors("u0", 0, [1, 2, 3, 4], S, sim=0.45)
    assert neighbors.members == (2, 1, 4)
    assert not neighbors.fallback
    assert neighbors.threshold_used == 0.45


def test_zero_threshold_keeps_every_positive_similarity():
    dense = np.eye(4)
    dense[0, 1:] = dense[1:, 0] = [0.0, 0.1, 0.3]
    neighbors = select_neighbors("u0", 0, [1, 2, 3], similarity_from_dense(dense), sim=0.0)
    assert neighbors.members == (3, 2)


def test_fallback_takes_top_k_and_is_flagged():
    n = 61
    dense = np.full((n, n), 0.3)
    np.fill_diagonal(dense, 1.0)
    neighbors = select_neighbors("u0", 0, list(range(1, n)), similarity_from_dense(dense), 0.45, fallback_k=50)
    assert neighbors.fallback
    assert neighbors.members == tuple(range(1, 51))


def test_no_linked_users_is_an_error():
    with pytest.raises(MappingError):
        select_neighbors("u0", 0, [], SimilarityMatrix(1, np.zeros(0)), 0.45)


def test_raising_sim_never_grows_a_neighborhood(rng):
    n = 40
    S = SimilarityMatrix(n, rng.random(n * (n - 1) // 2) * 0.6)
    linked = list(range(10, n))
    for u in range(10):
        sizes = [len(select_neighbors(f"u{u}", u, linked, S, sim)) for sim in (0.2, 0.3, 0.4, 0.45, 0.5)]
        assert sizes == sorted(sizes, reverse=True)


def test_fallback_keeps_only_the_most_similar_tie_group():
    n = 61
    dense = np.full((n, n), 0.1)
    np.fill_diagonal(dense, 1.0)
    dense[0, 7] = dense[7, 0] = 0.48
    S = similarity_from_dense(dense)
    linked = list(range(1, n))
    sets = [select_neighbors("u0", 0, linked, S, sim) for sim in (0.2, 0.3, 0.4, 0.45, 0.5)]
    assert [len(s) for s in sets] == [1, 1, 1, 1, 1]
    assert [s.fallback for s in sets] == [False, False, False, False, True]
    assert sets[-1].members == (7,)


def test_one_neighbor_maps_to_its_target_row():
    neighbors = NeighborSet("c", (7,), 0.45)
    target_row = np.array([[0.3, -1.2, 2.0]])
    mapping = train_user_mapping("c", neighbors, np.array([[0.5, 0.1]]), target_row, GbtHyper())
    assert mapping.K_t == 3
    assert mapping.neighbor_count == 1
    for query in ([0.0, 0.0], [9.0, -4.0]):
        np.testing.assert_array_equal(map_features(mapping, query), target_row[0])


def test_step_targets_are_fit_exactly_per_dimension():
    aux = np.array([[0.0, 5.0], [1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    tgt = np.column_stack([[0.0, 0.0, 1.0, 1.0], [2.0, 2.0, -1.0, -1.0]])
    neighbors = NeighborSet("c", (0, 1, 2, 3), 0.45)
    hyper = GbtHyper(nu=1.0, max_depth=1, min_leaf=1, max_stages=1)
    mapping = train_user_mapping("c", neighbors, aux, tgt, hyper)
    mapped = np.vstack([map_features(mapping, row) for row in aux])
    assert np.sum((mapped - tgt) ** 2) < 1e-20


def test_fifteen_target_dimensions_give_fifteen_subfunctions(rng):
    neighbors = NeighborSet("c", tuple(range(6)), 0.45)
    mapping = train_user_mapping("c", neighbors, rng.normal(size=(6, 15)), rng.normal(size=(6, 15)),
                                 GbtHyper(max_stages=3))
    assert mapping.K_t == 15
    assert map_features(mapping, rng.normal(size=15)).shape == (15,)


def test_mapping_needs_matching_rows():
    with pytest.raises(DimensionError):
        train_user_mapping("c", NeighborSet("c", (0, 1), 0.45), np.zeros((1, 2)), np.zeros((2, 2)), GbtHyper())
    with pytest.raises(MappingError):
        train_user_mapping("c", NeighborSet("c", (), 0.45), np.zeros((0, 2)), np.zeros((0, 2)), GbtHyper())


def test_predict_ratings_is_a_dot_product(rng):
    np.testing.assert_array_equal(predict_ratings([1.0, 0.0], np.eye(2)), [1.0, 0.0])
    np.testing.assert_array_equal(predict_ratings(np.zeros(3), rng.normal(size=(4, 3))), np.zeros(4))
    V, u = rng.normal(size=(4, 3)), rng.normal(size=3)
    expected = [sum(V[i, k] * u[k] for k in range(3)) for i in range(4)]
    np.testing.assert_allclose(predict_ratings(u, V), expected, rtol=0, atol=1e-12)
    with pytest.raises(DimensionError):
        predict_ratings(np.zeros(2), np.zeros((4, 3)))


def test_mapping_reads_only_neighbor_rows(rng):
    n, K = 12, 3
    dense = np.full((n, n), 0.1)
    np.fill_diagonal(dense, 1.0)
    dense[0, [3, 5]] = dense[[3, 5], 0] = 0.9
    S = similarity_from_dense(dense)
    linked = np.arange(1, n)

    # any row outside the neighborhood would poison the fit with NaN
    U_aux = np.full((n, K), np.nan)
    U_tgt = np.full((n, K), np.nan)
    for row in (0, 3, 5):
        U_aux[row] = rng.normal(size=K)
    for row in (3, 5):
        U_tgt[row] = rng.normal(size=K)

    mapped, neighbors = _map_one_user("u0", 0, linked, linked, S, U_aux, U_tgt, 0.45, 50, GbtHyper(max_stages=5))
    assert neighbors.members == (3, 5)
    assert np.all(np.isfinite(mapped))


def _cold_start_setup():
    auxiliary = matrix_of(("u1", "a1", 5), ("u2", "a1", 5), ("u1", "a2", 3), ("u2", "a2", 3), ("u3", "a1", 1))
    target = matrix_of(("u1", "t1", 4), ("u1", "t2", 2), ("u2", "t1", 5), ("u3", "t2", 3))
    pair, _ = select_cold_start_split(make_domain_pair(target, auxiliary), SplitSpec(cold_start_users=("u2",)))
    return pair


def test_single_neighbor_prediction_is_the_neighbor_reconstruction(rng):
    pair = _cold_start_setup()
    aux, tgt = pair.auxiliary, pair.target
    model_aux = FactorModel(rng.normal(size=(aux.n_users, 2)), rng.normal(size=(aux.n_items, 2)))
    model_tgt = FactorModel(rng.normal(size=(tgt.n_users, 2)), rng.normal(size=(tgt.n_items, 2)))
    dense = np.array([[1.0, 0.95, 0.1], [0.95, 1.0, 0.1], [0.1, 0.1, 1.0]])

    result = map_cold_start_users(pair, similarity_from_dense(dense), model_aux, model_tgt,
                                  0.45, 50, GbtHyper())
    assert result.table.user_ids == ("u2",)
    assert result.neighborhoods[0].members == (aux.user_index["u1"],)
    expected = model_tgt.U[tgt.user_index["u1"]] @ model_tgt.V.T
    np.testing.assert_allclose(result.table.scores[0], expected, rtol=1e-12)


def test_no_cold_start_users_gives_an_empty_table(rng):
    auxiliary = matrix_of(("u1", "a1", 5), ("u2", "a1", 4))
    target = matrix_of(("u1", "t1", 4), ("u2", "t1", 2))
    pair = make_domain_pair(target, auxiliary)
    model = FactorModel(rng.normal(size=(2, 2)), rng.normal(size=(1, 2)))
    result = map_cold_start_users(pair, SimilarityMatrix(2, np.array([0.5])), model, model, 0.45, 50, GbtHyper())
    assert result.table.is_empty
    assert result.table.scores.shape == (0, 1)


def test_parallel_mapping_matches_serial(rng):
    pair = _cold_start_setup()
    aux, tgt = pair.auxiliary, pair.target
    model_aux = FactorModel(rng.normal(size=(aux.n_users, 2)), rng.normal(size=(aux.n_items, 2)))
    model_tgt = FactorModel(rng.normal(size=(tgt.n_users, 2)), rng.normal(size=(tgt.n_items, 2)))
    S = SimilarityMatrix(3, np.array([0.5, 0.6, 0.7]))
    serial = map_cold_start_users(pair, S, model_aux, model_tgt, 0.45, 50, GbtHyper(), jobs=1)
    parallel = map_cold_start_users(pair, S, model_aux, model_tgt, 0.45, 50, GbtHyper(), jobs=2)
    np.testing.assert_array_equal(serial.table.scores, parallel.table.scores)


def test_prediction_table_lookup_and_clamp():
    table = PredictionTable(("c1",), ("t1", "t2"), np.array([[0.2, 6.5]]))
    records = [RatingRecord("c1", "t2", 5), RatingRecord("c1", "t1", 1)]
    np.testing.assert_array_equal(table.for_records(records), [6.5, 0.2])
    np.testing.assert_array_equal(table.for_records(records, clamp=True), [5.0, 1.0])
    with pytest.raises(MappingError):
        table.for_records([RatingRecord("c2", "t1", 3)])
    with pytest.raises(DimensionError):
        PredictionTable(("c1",), ("t1",), np.zeros((2, 1)))
