"""
File: test_dataset.py
File-Path: testing/test_dataset.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    ratings parsing, matrix building, min-count filtering and the
    cold-start / density splits
"""

import pytest

from conftest import matrix_of
from dataset.ratings import (RatingRecord, build_rating_matrix, filter_min_ratings, load_matrix,
                             parse_ratings_file, save_matrix)
from dataset.splits import SplitSpec, make_domain_pair, select_cold_start_split, subsample_density
from helpers.errors import ConfigError, EmptyDataError, RatingFileError, SplitError


def test_parse_with_and_without_timestamp(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("u1,i1,5,123\nu1,i2,3\n", encoding="utf-8")
    records = parse_ratings_file(path)
    assert records == [RatingRecord("u1", "i1", 5, 123), RatingRecord("u1", "i2", 3, None)]


def test_parse_rejects_out_of_range_rating_with_line_number(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("u1,i1,5\nu1,i1,6\n", encoding="utf-8")
    with pytest.raises(RatingFileError) as raised:
        parse_ratings_file(path)
    assert raised.value.line_number == 2
    assert "line 2" in str(raised.value)


def test_parse_rejects_short_and_non_integer_lines(tmp_path):
    short = tmp_path / "short.csv"
    short.write_text("u1,i1\n", encoding="utf-8")
    with pytest.raises(RatingFileError):
        parse_ratings_file(short)

    word = tmp_path / "word.csv"
    word.write_text("u1,i1,five\n", encoding="utf-8")
    with pytest.raises(RatingFileError):
        parse_ratings_file(word)


def test_parse_rejects_undecodable_bytes_with_line_number(tmp_path):
    path = tmp_path / "r.csv"
    path.write_bytes(b"u1,i1,5\nu1,i\xff\xfe1,5\n")
    with pytest.raises(RatingFileError) as raised:
        parse_ratings_file(path)
    assert raised.value.line_number == 2
    assert str(raised.value).startswith("dataset: line 2:")


def test_parse_skips_header_when_asked(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("user,item,rating\nu1,i1,4\n", encoding="utf-8")
    assert parse_ratings_file(path, header=True) == [RatingRecord("u1", "i1", 4)]


def test_parse_missing_file_raises_file_not_found(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_ratings_file(tmp_path / "nope.csv")


def test_build_matrix_density_and_vocabulary_order():
    m = matrix_of(("u1", "i1", 5), ("u2", "i1", 3))
    assert (m.n_users, m.n_items, m.density) == (2, 1, 1.0)

    m = matrix_of(("u2", "i2", 4), ("u1", "i1", 5))
    assert m.user_ids == ("u2", "u1")
    assert m.item_ids == ("i2", "i1")
    assert m.density == 0.5


def test_build_matrix_last_duplicate_wins():
    m = matrix_of(("u1", "i1", 5), ("u1", "i1", 2))
    assert m.nnz == 1
    assert m.rating(0, 0) == 2


def test_build_matrix_rejects_empty_input():
    with pytest.raises(EmptyDataError):
        build_rating_matrix([])


def test_matrix_serialization_round_trips(tmp_path):
    m = matrix_of(("u1", "i1", 5), ("u2", "i2", 4), ("u2", "i1", 1))
    save_matrix(tmp_path / "m.json", m)
    assert load_matrix(tmp_path / "m.json") == m


def test_filter_is_identity_when_thresholds_hold():
    m = matrix_of(("u1", "i1", 5), ("u1", "i2", 4), ("u2", "i1", 3), ("u2", "i2", 2))
    assert filter_min_ratings(m, 2, 2) == m


def test_filter_empty_result_raises():
    with pytest.raises(EmptyDataError):
        filter_min_ratings(matrix_of(("u1", "i1", 5)), 2, 0)


def _fixed_point(triples, min_user, min_item):
    kept = set(triples)
    while True:
        users = {}
        items = {}
        for u, i, _ in kept:
            users[u] = users.get(u, 0) + 1
            items[i] = items.get(i, 0) + 1
        survivors = {t for t in kept if users[t[0]] >= min_user and items[t[1]] >= min_item}
        if survivors == kept:
            return kept
        kept = survivors


def test_filter_chain_removal_matches_fixed_point():
    # dropping i3 leaves u3 with one rating, which then drops too
    triples = [("u1", "i1", 5), ("u1", "i2", 4), ("u2", "i1", 3), ("u2", "i2", 2),
               ("u3", "i2", 1), ("u3", "i3", 5)]
    filtered = filter_min_ratings(matrix_of(*triples), 2, 2)

    assert set(filtered.user_ids) == {"u1", "u2"}
    assert set(filtered.item_ids) == {"i1", "i2"}
    got = {(r.user_id, r.item_id, r.rating) for r in filtered.records()}
    assert got == _fixed_point(triples, 2, 2)
    assert filtered.user_counts.min() >= 2 and filtered.item_counts.min() >= 2


def test_cold_start_split_sizes_and_holdout(linked_pair):
    train, test = select_cold_start_split(linked_pair, SplitSpec(cold_start_fraction=0.7, seed=3))

    assert len(train.cold_start_users) == 7
    assert len(train.linked_users) == 3
    assert not train.cold_start_users & train.target.users_with_ratings()
    expected = [r for r in linked_pair.target.records() if r.user_id in train.cold_start_users]
    assert test == expected


def test_cold_start_split_is_deterministic(linked_pair):
    spec = SplitSpec(cold_start_fraction=0.5, seed=11)
    first, _ = select_cold_start_split(linked_pair, spec)
    second, _ = select_cold_start_split(linked_pair, spec)
    assert first.cold_start_users == second.cold_start_users
    assert first.target == second.target


def test_cold_start_split_with_fixed_users(linked_pair):
    train, test = select_cold_start_split(linked_pair, SplitSpec(cold_start_users=("u3", "u7")))
    assert train.cold_start_users == {"u3", "u7"}
    assert {r.user_id for r in test} == {"u3", "u7"}

    with pytest.raises(SplitError):
        select_cold_start_split(linked_pair, SplitSpec(cold_start_users=("nobody",)))


def test_cold_start_split_errors():
    unlinked = make_domain_pair(matrix_of(("u1", "t1", 3)), matrix_of(("u2", "a1", 3)))
    with pytest.raises(SplitError):
        select_cold_start_split(unlinked, SplitSpec())

    one = make_domain_pair(matrix_of(("u1", "t1", 3)), matrix_of(("u1", "a1", 3)))
    with pytest.raises(SplitError):
        select_cold_start_split(one, SplitSpec(cold_start_fraction=0.5))


def test_overlap_level_sets_cold_start_fraction(linked_pair):
    spec = SplitSpec(overlap_level=0.3, seed=1)
    assert spec.effective_cold_start_fraction == pytest.approx(0.7)
    train, _ = select_cold_start_split(linked_pair, spec)
    assert len(train.cold_start_users) == 7


def test_split_spec_rejects_two_varying_levels():
    with pytest.raises(ConfigError):
        SplitSpec(density_level=0.5, overlap_level=0.5)
    with pytest.raises(ConfigError):
        SplitSpec(cold_start_fraction=1.0)


def test_density_level_one_is_identity(linked_pair):
    assert subsample_density(linked_pair, 1.0, seed=0) is linked_pair


def test_density_half_keeps_half_the_auxiliary_ratings(linked_pair):
    assert linked_pair.auxiliary.nnz == 100
    sampled = subsample_density(linked_pair, 0.5, seed=4)
    assert sampled.auxiliary.nnz == 50
    assert sampled.target.nnz == 15
    assert subsample_density(linked_pair, 0.5, seed=4).auxiliary == sampled.auxiliary
