"""
File: gbt.py
File-Path: src/core/gbt.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    gradient boosted regression trees under squared loss: binary CART
    regression trees as base learners, stagewise updates
    f_m = f_{m-1} + nu * eta_m * h_m

Inputs:
    feature matrix X (N x K), targets y (N), GbtHyper

Outputs:
    RegressionTree and GbtModel objects, their predictions and JSON form
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from helpers.errors import ArtifactError, ConfigError, GbtError
from helpers.validation_helper import validate_gbt_hyper

GBT_VERSION = "coldmap-gbt-v1"
LEAF = -1

# relative margin a split score must clear to replace the incumbent, so ties
# fall to the lowest feature index and then the lowest threshold
_TIE_MARGIN = 1e-12


@dataclass(frozen=True)
class GbtHyper:
    nu: float = 0.01
    eta_policy: str = 'fixed_one'
    max_stages: int = 500
    tol: float = 1e-6
    max_depth: Optional[int] = 3
    min_leaf: int = 2
    seed: int = 0

    def __post_init__(self):
        errors = validate_gbt_hyper(self.nu, self.eta_policy, self.max_stages, self.tol,
                                    self.max_depth, self.min_leaf)
        if errors:
            raise ConfigError(errors, module='gbt')


@dataclass(frozen=True, eq=False)
class RegressionTree:
    """
    array-encoded binary tree; node 0 is the root

    feature[j] == LEAF marks a leaf whose prediction is value[j]; otherwise
    x[feature[j]] <= threshold[j] goes to left[j], else to right[j].
    """
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    max_depth: Optional[int] = None

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature == LEAF))

    def apply(self, X: np.ndarray) -> np.ndarray:
        """leaf index reached by every row of X"""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            idx = np.flatnonzero(active)
            at = node[idx]
            go_left = X[idx, self.feature[at]] <= self.threshold[at]
            node[idx] = np.where(go_left, self.left[at], self.right[at])
            active = self.feature[node] != LEAF
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            'feature': self.feature.tolist(),
            'threshold': self.threshold.tolist(),
            'left': self.left.tolist(),
            'right': self.right.tolist(),
            'value': self.value.tolist(),
            'max_depth': self.max_depth,
        }


def tree_from_dict(payload: dict) -> RegressionTree:
    return RegressionTree(np.asarray(payload['feature'], dtype=np.int64),
                          np.asarray(payload['threshold'], dtype=np.float64),
                          np.asarray(payload['left'], dtype=np.int64),
                          np.asarray(payload['right'], dtype=np.int64),
                          np.asarray(payload['value'], dtype=np.float64),
                          payload.get('max_depth'))


@dataclass(frozen=True, eq=False)
class GbtModel:
    f0: float
    stages: Tuple[Tuple[RegressionTree, float], ...]
    nu: float
    loss_log: Tuple[float, ...] = ()

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.full(X.shape[0], self.f0)
        for tree, eta in self.stages:
            out += self.nu * eta * tree.predict(X)
        return out

    def to_dict(self) -> dict:
        return {
            'version': GBT_VERSION,
            'f0': self.f0,
            'nu': self.nu,
            'stages': [{'eta': eta, 'tree': tree.to_dict()} for tree, eta in self.stages],
            'loss_log': list(self.loss_log),
        }


def gbt_from_dict(payload: dict) -> GbtModel:
    if payload.get('version') != GBT_VERSION:
        raise ArtifactError(f"unsupported gbt version {payload.get('version')!r}")
    stages = tuple((tree_from_dict(stage['tree']), float(stage['eta'])) for stage in payload['stages'])
    return GbtModel(float(payload['f0']), stages, float(payload['nu']), tuple(payload.get('loss_log', ())))


class _TreeBuilder:
    """
    greedy top-down growth over row orders presorted once per feature

    Every node carries its rows (ascending) and an (n_node, K) matrix whose
    column f lists those rows sorted by feature f; children inherit filtered
    columns, so no node re-sorts. Training predictions are collected per
    leaf in fitted.
    """

    def __init__(self, X: np.ndarray, max_depth: Optional[int], min_leaf: int,
                 presorted: Optional[np.ndarray] = None):
        self.X = X
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.presorted = presorted if presorted is not None else np.argsort(X, axis=0, kind='stable')
        self.columns = np.arange(X.shape[1])
        self.fitted = np.zeros(X.shape[0])
        self.feature: List[int] = []
        self.threshold: List[float] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.value: List[float] = []

    def _new_node(self, value: float) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(value)
        return len(self.value) - 1

    def _best_split(self, rows: np.ndarray, order: np.ndarray, y: np.ndarray):
        """(feature, threshold, gain) maximizing the SSE reduction, or None"""
        n = rows.size
        total = y[rows].sum()
        parent_score = total * total / n
        xs = self.X[order, self.columns]
        left_sum = np.cumsum(y[order], axis=0)[:-1]
        left_n = np.arange(1, n)[:, None]
        right_sum = total - left_sum
        right_n = n - left_n
        # boundaries between distinct values with both children large enough
        valid = (xs[1:] > xs[:-1]) & (left_n >= self.min_leaf) & (right_n >= self.min_leaf)
        gains = np.where(valid, left_sum ** 2 / left_n + right_sum ** 2 / right_n - parent_score, -np.inf)
        positions = np.argmax(gains, axis=0)

        best = None
        best_gain = -np.inf
        for f in np.flatnonzero(valid.any(axis=0)):
            j = int(positions[f])
            gain = float(gains[j, f])
            if best is None or gain > best_gain + _TIE_MARGIN * max(1.0, abs(best_gain)):
                lo, hi = xs[j, f], xs[j + 1, f]
                threshold = 0.5 * (lo + hi)
                if not lo <= threshold < hi:
                    threshold = lo
                best, best_gain = (int(f), float(threshold)), gain
        if best is None:
            return None
        return best[0], best[1], best_gain

    def grow(self, rows: np.ndarray, order: np.ndarray, y: np.ndarray, depth: int) -> int:
        ys = y[rows]
        value = float(ys.mean())
        node = self._new_node(value)
        split = None
        if ((self.max_depth is None or depth < self.max_depth)
                and ys.size >= 2 * self.min_leaf and np.ptp(ys) > 0):
            split = self._best_split(rows, order, y)
        if split is None:
            self.fitted[rows] = value
            return node

        f, threshold, _ = split
        goes_left = self.X[:, f] <= threshold
        left_rows = rows[goes_left[rows]]
        right_rows = rows[~goes_left[rows]]
        in_left = goes_left[order].T
        order_t = order.T
        left_order = order_t[in_left].reshape(order.shape[1], left_rows.size).T
        right_order = order_t[~in_left].reshape(order.shape[1], right_rows.size).T

        self.feature[node] = f
        self.threshold[node] = threshold
        self.left[node] = self.grow(left_rows, left_order, y, depth + 1)
        self.right[node] = self.grow(right_rows, right_order, y, depth + 1)
        return node

    def build(self, y: np.ndarray) -> RegressionTree:
        self.grow(np.arange(self.X.shape[0]), self.presorted, y, 0)
        return RegressionTree(np.asarray(self.feature, dtype=np.int64),
                              np.asarray(self.threshold, dtype=np.float64),
                              np.asarray(self.left, dtype=np.int64),
                              np.asarray(self.right, dtype=np.int64),
                              np.asarray(self.value, dtype=np.float64),
                              self.max_depth)


def _check_inputs(X, y) -> Tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[0] == 0:
        raise GbtError("cannot fit on an empty training set")
    if X.shape[0] != y.shape[0]:
        raise GbtError(f"{X.shape[0]} feature rows but {y.shape[0]} targets")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise GbtError("training data contains non-finite values")
    return X, y


def fit_regression_tree(X, targets, max_depth: Optional[int] = 3, min_leaf: int = 2) -> RegressionTree:
    """CART regression tree minimizing SSE; leaves hold the mean target"""
    X, y = _check_inputs(X, targets)
    return _TreeBuilder(X, max_depth, min_leaf).build(y)


def tree_predict(tree: RegressionTree, x: Sequence[float]) -> float:
    return float(tree.predict(np.asarray(x, dtype=np.float64).reshape(1, -1))[0])


def fit_gbt(X, y, hyper: GbtHyper) -> GbtModel:
    """
    stagewise squared-loss boosting

    Each stage fits a tree to the residuals y - f_{m-1}(x), sets eta (1, or
    the least-squares scale of the tree's outputs) and adds nu * eta * tree.
    Stops when the relative decrease of the mean squared loss drops below
    tol, when the loss reaches 0, or after max_stages stages.
    """
    X, y = _check_inputs(X, y)
    f0 = float(y[0]) if np.ptp(y) == 0 else float(y.mean())
    pred = np.full(y.shape[0], f0)
    loss = float(np.mean((y - pred) ** 2))
    loss_log = [loss]
    stages = []
    presorted = np.argsort(X, axis=0, kind='stable')

    for _ in range(hyper.max_stages):
        if loss == 0.0:
            break
        residual = y - pred
        builder = _TreeBuilder(X, hyper.max_depth, hyper.min_leaf, presorted)
        tree = builder.build(residual)
        # a lone leaf only shifts by the mean residual, which f0 already absorbed
        if tree.n_leaves == 1:
            break
        h = builder.fitted
        hh = float(h @ h)
        if hh == 0.0:
            break
        eta = 1.0 if hyper.eta_policy == 'fixed_one' else float(residual @ h) / hh
        candidate = pred + hyper.nu * eta * h
        new_loss = float(np.mean((y - candidate) ** 2))
        if not np.isfinite(new_loss):
            raise GbtError("boosting loss became non-finite")
        if new_loss > loss:
            break
        stages.append((tree, eta))
        pred = candidate
        decrease = (loss - new_loss) / loss
        loss = new_loss
        loss_log.append(loss)
        if decrease < hyper.tol:
            break

    return GbtModel(f0, tuple(stages), hyper.nu, tuple(loss_log))


def gbt_predict(model: GbtModel, x: Sequence[float]) -> float:
    return float(model.predict(np.asarray(x, dtype=np.float64).reshape(1, -1))[0])
