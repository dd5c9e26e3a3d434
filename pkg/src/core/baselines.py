"""
File: baselines.py
File-Path: src/core/baselines.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    comparison methods: average filling, plain matrix factorization, the
    linear transformation-matrix mapping and the global (ungated) boosted
    tree mapping

Inputs:
    RatingMatrix objects and linked-user latent feature pairs

Outputs:
    AfModel, FactorModel, LinearMap and MappingFunction objects
"""

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from core.gbt import GbtHyper
from core.mapping import MAPPING_VERSION, MappingFunction, NeighborSet, mapping_from_dict, train_user_mapping
from core.mfus import FactorModel, MfusHyper, train_mfus
from dataset.ratings import RatingMatrix
from helpers.errors import ArtifactError, DimensionError, EmptyDataError, MappingError

AF_VERSION = "coldmap-af-v1"
LINEAR_MAP_VERSION = "coldmap-linmap-v1"
GLOBAL_OWNER = '*'


@dataclass(frozen=True, eq=False)
class AfModel:
    global_mean: float
    user_bias: np.ndarray
    item_bias: np.ndarray
    user_ids: Tuple[str, ...] = ()
    item_ids: Tuple[str, ...] = ()

    def bias_of_user(self, user_id: str) -> float:
        """0 for users without training ratings"""
        try:
            return float(self.user_bias[self.user_ids.index(user_id)])
        except ValueError:
            return 0.0

    def bias_of_item(self, item_id: str) -> float:
        try:
            return float(self.item_bias[self.item_ids.index(item_id)])
        except ValueError:
            return 0.0

    def predict(self, user_id: str, item_id: str) -> float:
        return self.global_mean + self.bias_of_user(user_id) + self.bias_of_item(item_id)

    def predict_table(self, user_ids: Sequence[str], item_ids: Sequence[str]) -> np.ndarray:
        users = {uid: idx for idx, uid in enumerate(self.user_ids)}
        items = {iid: idx for idx, iid in enumerate(self.item_ids)}
        bu = np.array([self.user_bias[users[u]] if u in users else 0.0 for u in user_ids])
        bi = np.array([self.item_bias[items[i]] if i in items else 0.0 for i in item_ids])
        return self.global_mean + bu[:, None] + bi[None, :]

    def to_dict(self) -> dict:
        return {
            'version': AF_VERSION,
            'global_mean': self.global_mean,
            'users': list(self.user_ids),
            'items': list(self.item_ids),
            'user_bias': self.user_bias.tolist(),
            'item_bias': self.item_bias.tolist(),
        }


def af_from_dict(payload: dict) -> AfModel:
    return AfModel(float(payload['global_mean']),
                   np.asarray(payload['user_bias'], dtype=np.float64),
                   np.asarray(payload['item_bias'], dtype=np.float64),
                   tuple(payload['users']), tuple(payload['items']))


def average_filling(train: RatingMatrix) -> AfModel:
    """
    mu = mean rating, b_u = mean(u's ratings) - mu, b_i = mean(i's ratings) - mu;
    users and items without ratings get bias 0
    """
    if train.nnz == 0:
        raise EmptyDataError("average filling needs at least one training rating")

    values = train.values.astype(np.float64)
    mu = float(values.mean())
    user_sums = np.bincount(train.rows, weights=values, minlength=train.n_users)
    item_sums = np.bincount(train.cols, weights=values, minlength=train.n_items)
    with np.errstate(divide='ignore', invalid='ignore'):
        user_bias = np.where(train.user_counts > 0, user_sums / train.user_counts - mu, 0.0)
        item_bias = np.where(train.item_counts > 0, item_sums / train.item_counts - mu, 0.0)
    return AfModel(mu, user_bias, item_bias, train.user_ids, train.item_ids)


def train_mf(m: RatingMatrix, hyper: MfusHyper) -> FactorModel:
    """plain MF: the MFUS trainer with the similarity term switched off"""
    return train_mfus(m, None, replace(hyper, beta=0.0), domain_tag='mf')


@dataclass(frozen=True, eq=False)
class LinearMap:
    """u_t = M u_a (+ intercept)"""
    M: np.ndarray
    intercept: Optional[np.ndarray] = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.M)):
            raise MappingError("transformation matrix has non-finite entries")

    def apply(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.M.shape[1]:
            raise DimensionError(f"inputs of width {X.shape[1]} for a map expecting {self.M.shape[1]}",
                                 module='baselines')
        out = X @ self.M.T
        return out + self.intercept if self.intercept is not None else out

    def to_dict(self) -> dict:
        return {
            'version': LINEAR_MAP_VERSION,
            'M': self.M.tolist(),
            'intercept': None if self.intercept is None else self.intercept.tolist(),
        }


def linear_map_from_dict(payload: dict) -> LinearMap:
    M = np.atleast_2d(np.asarray(payload['M'], dtype=np.float64))
    intercept = payload.get('intercept')
    return LinearMap(M, None if intercept is None else np.asarray(intercept, dtype=np.float64))


def fit_transformation_matrix(U_aux_rows, U_tgt_rows, ridge: float,
                              intercept: bool = False) -> LinearMap:
    """
    ridge least squares min_M sum_v |M a_v - t_v|^2 + ridge |M|_F^2,
    solved through the normal equations (X^T X + ridge I) M^T = X^T T

    The intercept, when fitted, is not penalized.
    """
    X = np.atleast_2d(np.asarray(U_aux_rows, dtype=np.float64))
    T = np.atleast_2d(np.asarray(U_tgt_rows, dtype=np.float64))
    if X.shape[0] == 0:
        raise MappingError("transformation matrix needs at least one linked pair")
    if X.shape[0] != T.shape[0]:
        raise DimensionError(f"{X.shape[0]} auxiliary rows but {T.shape[0]} target rows", module='baselines')
    if ridge < 0:
        raise ValueError("ridge must be >= 0")

    K_a = X.shape[1]
    design = np.hstack([X, np.ones((X.shape[0], 1))]) if intercept else X
    penalty = np.eye(design.shape[1]) * ridge
    if intercept:
        penalty[K_a, K_a] = 0.0
    gram = design.T @ design + penalty

    if ridge == 0 and np.linalg.matrix_rank(design) < design.shape[1]:
        raise MappingError("normal equations are singular; use ridge > 0")
    try:
        coef = scipy.linalg.solve(gram, design.T @ T, assume_a='sym')
    except scipy.linalg.LinAlgError:
        raise MappingError("normal equations are singular; use ridge > 0") from None

    if intercept:
        return LinearMap(coef[:K_a].T.copy(), coef[K_a].copy())
    return LinearMap(coef.T.copy())


def global_gbt_mapping(U_aux_rows, U_tgt_rows, hyper: GbtHyper) -> MappingFunction:
    """one GBT per target dimension over every linked pair, shared by all cold-start users"""
    aux = np.atleast_2d(np.asarray(U_aux_rows, dtype=np.float64))
    everyone = NeighborSet(GLOBAL_OWNER, tuple(range(aux.shape[0])), 0.0)
    return train_user_mapping(GLOBAL_OWNER, everyone, aux, U_tgt_rows, hyper)


BaselineModel = Union[AfModel, LinearMap, MappingFunction]

_LOADERS = {
    AF_VERSION: af_from_dict,
    LINEAR_MAP_VERSION: linear_map_from_dict,
    MAPPING_VERSION: mapping_from_dict,
}


def save_baseline(path, model: BaselineModel):
    Path(path).write_text(json.dumps(model.to_dict(), separators=(',', ':')), encoding='utf-8')


def load_baseline(path) -> BaselineModel:
    """reads any comparison-model artifact, dispatching on its version tag"""
    payload = json.loads(Path(path).read_text(encoding='utf-8'))
    loader = _LOADERS.get(payload.get('version'))
    if loader is None:
        raise ArtifactError(f"unsupported baseline version {payload.get('version')!r}")
    return loader(payload)
