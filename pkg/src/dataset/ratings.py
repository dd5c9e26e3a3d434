"""
File: ratings.py
File-Path: src/dataset/ratings.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    rating records, the sparse per-domain rating matrix and its ingest,
    min-count filtering and JSON serialization

Inputs:
    UTF-8 CSV files with columns user,item,rating[,timestamp]

Outputs:
    RatingMatrix objects (COO triplets + user/item vocabularies)
"""

import io
import json
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sp

from helpers.errors import EmptyDataError, RatingFileError
from helpers.logging_helper import log_stage
from helpers.validation_helper import RATING_SCALE

MATRIX_VERSION = "coldmap-matrix-v1"
COLUMNS = ['user', 'item', 'rating', 'timestamp']


@dataclass(frozen=True)
class RatingRecord:
    """one observed rating, timestamp is carried but never used"""
    user_id: str
    item_id: str
    rating: int
    timestamp: Optional[int] = None


@dataclass(frozen=True, eq=False)
class RatingMatrix:
    """
    sparse user x item rating store

    Entries are COO triplets sorted by (row, col) with at most one entry per
    cell; vocabularies map ids to dense indices in first-appearance order.
    Instances are never mutated after construction.
    """
    user_ids: Tuple[str, ...]
    item_ids: Tuple[str, ...]
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        for name in ('rows', 'cols', 'values'):
            getattr(self, name).setflags(write=False)

    @property
    def n_users(self) -> int:
        return len(self.user_ids)

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    @property
    def density(self) -> float:
        cells = self.n_users * self.n_items
        return self.nnz / cells if cells else 0.0

    @cached_property
    def user_index(self) -> Dict[str, int]:
        return {uid: idx for idx, uid in enumerate(self.user_ids)}

    @cached_property
    def item_index(self) -> Dict[str, int]:
        return {iid: idx for idx, iid in enumerate(self.item_ids)}

    @cached_property
    def csr(self) -> sp.csr_matrix:
        """ratings R as csr, zeros are unobserved"""
        return sp.csr_matrix((self.values.astype(np.float64), (self.rows, self.cols)),
                             shape=(self.n_users, self.n_items))

    @cached_property
    def indicator(self) -> sp.csr_matrix:
        """Y, 1 where a rating is observed"""
        return sp.csr_matrix((np.ones(self.nnz), (self.rows, self.cols)),
                             shape=(self.n_users, self.n_items))

    @cached_property
    def user_counts(self) -> np.ndarray:
        return np.bincount(self.rows, minlength=self.n_users)

    @cached_property
    def item_counts(self) -> np.ndarray:
        return np.bincount(self.cols, minlength=self.n_items)

    def users_with_ratings(self) -> frozenset:
        return frozenset(self.user_ids[u] for u in np.flatnonzero(self.user_counts))

    def user_ratings(self, u: int) -> Tuple[np.ndarray, np.ndarray]:
        """(item indices, ratings) of user u, item-ascending"""
        row = self.csr.getrow(u)
        return row.indices.copy(), row.data.astype(np.int64)

    def rating(self, u: int, i: int) -> Optional[int]:
        value = self.csr[u, i]
        return int(value) if value else None

    def records(self) -> List[RatingRecord]:
        return [RatingRecord(self.user_ids[u], self.item_ids[i], int(r))
                for u, i, r in zip(self.rows, self.cols, self.values)]

    def with_entries(self, keep: np.ndarray) -> 'RatingMatrix':
        """same vocabularies, only the entries selected by the boolean mask"""
        return RatingMatrix(self.user_ids, self.item_ids,
                            self.rows[keep].copy(), self.cols[keep].copy(), self.values[keep].copy())

    def without_users(self, user_ids: Iterable[str]) -> 'RatingMatrix':
        """drops users from the vocabulary and their entries; item vocabulary is kept"""
        drop = set(user_ids)
        kept_users = [uid for uid in self.user_ids if uid not in drop]
        remap = np.full(self.n_users, -1, dtype=np.int64)
        for new_idx, uid in enumerate(kept_users):
            remap[self.user_index[uid]] = new_idx
        new_rows = remap[self.rows]
        keep = new_rows >= 0
        return RatingMatrix(tuple(kept_users), self.item_ids,
                            new_rows[keep], self.cols[keep].copy(), self.values[keep].copy())

    def to_dict(self) -> dict:
        return {
            'version': MATRIX_VERSION,
            'users': list(self.user_ids),
            'items': list(self.item_ids),
            'entries': [[int(u), int(i), int(r)] for u, i, r in zip(self.rows, self.cols, self.values)],
        }

    def __eq__(self, other):
        if not isinstance(other, RatingMatrix):
            return NotImplemented
        return (self.user_ids == other.user_ids and self.item_ids == other.item_ids
                and np.array_equal(self.rows, other.rows)
                and np.array_equal(self.cols, other.cols)
                and np.array_equal(self.values, other.values))

    __hash__ = None


def from_triplets(user_ids: Sequence[str], item_ids: Sequence[str],
                  rows: np.ndarray, cols: np.ndarray, values: np.ndarray) -> RatingMatrix:
    """builds a matrix from index triplets, sorting entries into (row, col) order"""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    values = np.asarray(values, dtype=np.int64)
    order = np.lexsort((cols, rows))
    return RatingMatrix(tuple(user_ids), tuple(item_ids), rows[order], cols[order], values[order])


def matrix_from_dict(payload: dict) -> RatingMatrix:
    """inverse of RatingMatrix.to_dict"""
    if payload.get('version') != MATRIX_VERSION:
        raise RatingFileError(f"unsupported matrix version {payload.get('version')!r}")
    entries = np.asarray(payload['entries'], dtype=np.int64).reshape(-1, 3)
    return from_triplets(payload['users'], payload['items'], entries[:, 0], entries[:, 1], entries[:, 2])


def save_matrix(path, matrix: RatingMatrix):
    Path(path).write_text(json.dumps(matrix.to_dict(), separators=(',', ':')), encoding='utf-8')


def load_matrix(path) -> RatingMatrix:
    return matrix_from_dict(json.loads(Path(path).read_text(encoding='utf-8')))


def _parse_int(token: str, what: str, line_number: int) -> int:
    try:
        return int(token.strip())
    except ValueError:
        raise RatingFileError(f"{what} {token!r} is not an integer", line_number) from None


def parse_ratings_file(path, format: str = 'csv', header: bool = False) -> List[RatingRecord]:
    """
    reads user,item,rating[,timestamp] lines in file order

    Args:
        path: ratings file
        format: only 'csv'
        header: skip the first line when True

    Returns:
        list of RatingRecord
    """
    if format != 'csv':
        raise RatingFileError(f"unsupported ratings format {format!r}")

    path = Path(path)
    raw = path.read_bytes()
    try:
        text = raw.decode('utf-8')
    except UnicodeDecodeError as error:
        raise RatingFileError(f"not valid UTF-8 in {path}", raw.count(b"\n", 0, error.start) + 1) from None

    try:
        frame = pd.read_csv(io.StringIO(text), header=None, names=COLUMNS, dtype=str, sep=',',
                            skiprows=1 if header else 0, keep_default_na=False,
                            skip_blank_lines=False, index_col=False)
    except pd.errors.ParserError as error:
        # the tokenizer counts every physical line, skipped header included
        found = re.search(r"line (\d+)", str(error))
        raise RatingFileError(f"malformed ratings file {path}: {error}",
                              int(found.group(1)) if found else None) from None
    except pd.errors.EmptyDataError:
        return []

    offset = 2 if header else 1
    records = []
    for position, row in enumerate(frame.itertuples(index=False)):
        line_number = position + offset
        # short rows come back as NaN in the missing columns
        user, item, rating, timestamp = (v if isinstance(v, str) else '' for v in row)
        if not (user or item or rating or timestamp):
            continue
        if not user.strip() or not item.strip() or not rating.strip():
            raise RatingFileError("expected at least user,item,rating", line_number)
        value = _parse_int(rating, 'rating', line_number)
        if value not in RATING_SCALE:
            raise RatingFileError(f"rating {value} out of range 1..5", line_number)
        stamp = _parse_int(timestamp, 'timestamp', line_number) if timestamp.strip() else None
        records.append(RatingRecord(user.strip(), item.strip(), value, stamp))

    log_stage("parsed ratings file", component='dataset', path=str(path), records=len(records))
    return records


def build_rating_matrix(records: Sequence[RatingRecord]) -> RatingMatrix:
    """
    builds the sparse matrix; ids are indexed in first-appearance order and a
    repeated (user, item) keeps the last record
    """
    if not records:
        raise EmptyDataError("cannot build a rating matrix from no records")

    user_index: Dict[str, int] = {}
    item_index: Dict[str, int] = {}
    cells: Dict[Tuple[int, int], int] = {}
    for record in records:
        if record.rating not in RATING_SCALE:
            raise RatingFileError(f"rating {record.rating} out of range 1..5")
        u = user_index.setdefault(record.user_id, len(user_index))
        i = item_index.setdefault(record.item_id, len(item_index))
        cells[(u, i)] = record.rating

    keys = np.array(list(cells.keys()), dtype=np.int64).reshape(-1, 2)
    values = np.fromiter(cells.values(), dtype=np.int64, count=len(cells))
    return from_triplets(list(user_index), list(item_index), keys[:, 0], keys[:, 1], values)


def filter_min_ratings(matrix: RatingMatrix, min_user: int, min_item: int) -> RatingMatrix:
    """
    repeatedly drops users with < min_user and items with < min_item ratings
    until nothing changes, then reindexes both vocabularies densely
    """
    if min_user < 0 or min_item < 0:
        raise ValueError("min_user and min_item must be >= 0")

    keep = np.ones(matrix.nnz, dtype=bool)
    while True:
        user_counts = np.bincount(matrix.rows[keep], minlength=matrix.n_users)
        item_counts = np.bincount(matrix.cols[keep], minlength=matrix.n_items)
        bad = (user_counts[matrix.rows] < min_user) | (item_counts[matrix.cols] < min_item)
        next_keep = keep & ~bad
        if np.array_equal(next_keep, keep):
            break
        keep = next_keep

    if not keep.any():
        raise EmptyDataError(f"no ratings survive min_user={min_user}, min_item={min_item}")

    rows, cols, values = matrix.rows[keep], matrix.cols[keep], matrix.values[keep]
    kept_users = np.unique(rows)
    kept_items = np.unique(cols)
    user_map = np.full(matrix.n_users, -1, dtype=np.int64)
    user_map[kept_users] = np.arange(kept_users.size)
    item_map = np.full(matrix.n_items, -1, dtype=np.int64)
    item_map[kept_items] = np.arange(kept_items.size)

    filtered = from_triplets([matrix.user_ids[u] for u in kept_users],
                             [matrix.item_ids[i] for i in kept_items],
                             user_map[rows], item_map[cols], values)
    log_stage("filtered rating matrix", component='dataset',
              users=filtered.n_users, items=filtered.n_items, ratings=filtered.nnz)
    return filtered
