"""
File: mfus.py
File-Path: src/core/mfus.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    matrix factorization with a user-similarity Laplacian regularizer,
    trained by alternating gradient descent (one column of U, then every row
    of V) with backtracking line search

Inputs:
    RatingMatrix, SimilarityMatrix (optional when beta = 0), MfusHyper

Outputs:
    FactorModel with its per-sweep training log
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sp

from core.similarity import SimilarityMatrix
from dataset.ratings import RatingMatrix
from helpers.errors import ArtifactError, ConfigError, DimensionError, LineSearchError, TrainingError
from helpers.logging_helper import log_stage
from helpers.random_helper import make_rng
from helpers.validation_helper import validate_mfus_hyper

MODEL_VERSION = "coldmap-model-v1"
MAX_HALVINGS = 60

# a gradient this small relative to the objective cannot produce a
# representable Armijo decrease
_NEGLIGIBLE_SLOPE = 1e-12


@dataclass(frozen=True)
class MfusHyper:
    K: int = 15
    alpha: float = 0.01
    beta: float = 0.005
    max_outer_iters: int = 500
    tol: float = 1e-5
    ls_shrink: float = 0.5
    ls_c: float = 1e-4
    init_scale: float = 0.1
    seed: int = 0
    # similarities at or below this are dropped and L is kept sparse
    sim_floor: float = 0.0

    def __post_init__(self):
        errors = validate_mfus_hyper(self.K, self.alpha, self.beta, self.max_outer_iters, self.tol,
                                     self.ls_shrink, self.ls_c, self.init_scale)
        if not 0 <= self.sim_floor < 1:
            errors['sim_floor'] = "sim_floor must lie in [0, 1)"
        if errors:
            raise ConfigError(errors, module='mfus')


@dataclass(frozen=True)
class SweepRecord:
    sweep: int
    objective: float
    user_step: float
    item_step: float


@dataclass(frozen=True, eq=False)
class FactorModel:
    U: np.ndarray
    V: np.ndarray
    domain_tag: str = ''
    user_ids: Tuple[str, ...] = ()
    item_ids: Tuple[str, ...] = ()
    training_log: Tuple[SweepRecord, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.U.ndim != 2 or self.V.ndim != 2 or self.U.shape[1] != self.V.shape[1]:
            raise DimensionError(f"factor shapes {self.U.shape} and {self.V.shape} disagree on K",
                                 module='mfus')
        if not (np.all(np.isfinite(self.U)) and np.all(np.isfinite(self.V))):
            raise TrainingError("factor matrices contain non-finite entries")
        self.U.setflags(write=False)
        self.V.setflags(write=False)

    @property
    def K(self) -> int:
        return int(self.U.shape[1])

    def predict(self, users: np.ndarray, items: np.ndarray) -> np.ndarray:
        return np.einsum('ij,ij->i', self.U[users], self.V[items])

    def to_dict(self) -> dict:
        return {
            'version': MODEL_VERSION,
            'domain_tag': self.domain_tag,
            'K': self.K,
            'users': list(self.user_ids),
            'items': list(self.item_ids),
            'U': self.U.tolist(),
            'V': self.V.tolist(),
        }


def model_from_dict(payload: dict) -> FactorModel:
    if payload.get('version') != MODEL_VERSION:
        raise ArtifactError(f"unsupported model version {payload.get('version')!r}")
    K = int(payload['K'])
    U = np.asarray(payload['U'], dtype=np.float64).reshape(-1, K)
    V = np.asarray(payload['V'], dtype=np.float64).reshape(-1, K)
    return FactorModel(U, V, payload.get('domain_tag', ''),
                       tuple(payload.get('users', ())), tuple(payload.get('items', ())))


def save_model(path, model: FactorModel):
    Path(path).write_text(json.dumps(model.to_dict(), separators=(',', ':')), encoding='utf-8')


def load_model(path) -> FactorModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding='utf-8')))


def training_log_frame(model: FactorModel) -> pd.DataFrame:
    return pd.DataFrame([vars(record) for record in model.training_log],
                        columns=['sweep', 'objective', 'user_step', 'item_step'])


def laplacian(S: SimilarityMatrix, sim_floor: float = 0.0):
    """
    L = D - S with D_uu = sum over v != u of S_uv

    Returns (L, D diagonal); L is dense unless sim_floor > 0, in which case
    weak similarities are dropped and L is a csr matrix.
    """
    W = np.array(S.dense(), dtype=np.float64)
    np.fill_diagonal(W, 0.0)
    if sim_floor > 0:
        W[W <= sim_floor] = 0.0
        W = sp.csr_matrix(W)
        d = np.asarray(W.sum(axis=1)).ravel()
        return (sp.diags(d) - W).tocsr(), d
    d = W.sum(axis=1)
    return np.diag(d) - W, d


class MfusObjective:
    """
    the regularized objective over fixed ratings and Laplacian

    F = 1/2 sum Y (R - U V^T)^2 + alpha/2 tr(V V^T) + 1/2 tr(U^T (alpha I + beta L) U)
    """

    def __init__(self, m: RatingMatrix, L, hyper: MfusHyper):
        self.n_users, self.n_items = m.n_users, m.n_items
        self.rows, self.cols = m.rows, m.cols
        self.vals = m.values.astype(np.float64)
        self.L = L
        self.hyper = hyper

    def _regularize_users(self, X: np.ndarray) -> np.ndarray:
        """(alpha I + beta L) X"""
        out = self.hyper.alpha * X
        if self.L is not None and self.hyper.beta != 0:
            out = out + self.hyper.beta * (self.L @ X)
        return out

    def predictions(self, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        return np.einsum('ij,ij->i', U[self.rows], V[self.cols])

    def residuals(self, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        return self.vals - self.predictions(U, V)

    def value(self, U: np.ndarray, V: np.ndarray) -> float:
        e = self.residuals(U, V)
        return float(0.5 * (e @ e)
                     + 0.5 * self.hyper.alpha * np.sum(V * V)
                     + 0.5 * np.sum(U * self._regularize_users(U)))

    def grad_user_column(self, U: np.ndarray, V: np.ndarray, k: int) -> np.ndarray:
        e = self.residuals(U, V)
        x = np.bincount(self.rows, weights=e * V[self.cols, k], minlength=self.n_users)
        return self._regularize_users(U[:, k]) - x

    def grad_items(self, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        e = self.residuals(U, V)
        E = sp.csr_matrix((e, (self.cols, self.rows)), shape=(self.n_items, self.n_users))
        return -(E @ U) + self.hyper.alpha * V

    def grad_item_row(self, U: np.ndarray, V: np.ndarray, i: int) -> np.ndarray:
        sel = self.cols == i
        e = self.vals[sel] - U[self.rows[sel]] @ V[i]
        return -(e @ U[self.rows[sel]]) + self.hyper.alpha * V[i]

    def step_user_column(self, U: np.ndarray, V: np.ndarray, k: int) -> float:
        """one backtracking step on column k of U, in place; returns the accepted step"""
        grad = self.grad_user_column(U, V, k)
        Vk = V[self.cols, k]
        partial = self.vals - self.predictions(U, V) + U[self.rows, k] * Vk

        # column-local objective, equal to F up to a constant
        def column_objective(col: np.ndarray) -> float:
            e = partial - col[self.rows] * Vk
            return float(0.5 * (e @ e) + 0.5 * (col @ self._regularize_users(col)))

        f0 = column_objective(U[:, k])
        if grad @ grad <= _NEGLIGIBLE_SLOPE * max(1.0, abs(f0)):
            return 0.0
        t = backtracking_step(column_objective, U[:, k], -grad, grad,
                              self.hyper.ls_shrink, self.hyper.ls_c, f_point=f0)
        U[:, k] = U[:, k] - t * grad
        return t

    def _item_objectives(self, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        e = self.residuals(U, V)
        return (0.5 * np.bincount(self.cols, weights=e * e, minlength=self.n_items)
                + 0.5 * self.hyper.alpha * np.sum(V * V, axis=1))

    def step_items(self, U: np.ndarray, V: np.ndarray) -> float:
        """
        one backtracking step on every row of V, in place

        Rows of V are separable once U is fixed, so each row runs its own
        Armijo loop; the result equals updating the rows one after another.
        Returns the mean accepted step over the rows that moved.
        """
        G = self.grad_items(U, V)
        slope = -np.sum(G * G, axis=1)
        f0 = self._item_objectives(U, V)
        pending = -slope > _NEGLIGIBLE_SLOPE * np.maximum(1.0, np.abs(f0))
        moving = pending.copy()
        if not moving.any():
            return 0.0

        t = np.ones(self.n_items)
        shrink, c = self.hyper.ls_shrink, self.hyper.ls_c
        for _ in range(MAX_HALVINGS + 1):
            candidate = V - t[:, None] * G
            accepted = pending & (self._item_objectives(U, candidate) <= f0 + c * t * slope)
            pending &= ~accepted
            if not pending.any():
                break
            t[pending] *= shrink
        if pending.any():
            raise LineSearchError(f"no admissible step for {int(pending.sum())} item rows")

        V[moving] -= t[moving, None] * G[moving]
        return float(t[moving].mean())


def _check_dimensions(m: RatingMatrix, model: Optional[FactorModel] = None,
                      S: Optional[SimilarityMatrix] = None):
    if S is not None and S.n_users != m.n_users:
        raise DimensionError(f"similarity covers {S.n_users} users, ratings have {m.n_users}", module='mfus')
    if model is not None and (model.U.shape[0] != m.n_users or model.V.shape[0] != m.n_items):
        raise DimensionError(f"model {model.U.shape}/{model.V.shape} does not fit a "
                             f"{m.n_users}x{m.n_items} rating matrix", module='mfus')


def _laplacian_for(S: Optional[SimilarityMatrix], hyper: MfusHyper):
    if hyper.beta == 0:
        return None
    if S is None:
        raise ConfigError({'similarity': "beta > 0 needs a similarity matrix"}, module='mfus')
    return laplacian(S, hyper.sim_floor)[0]


def objective_value(m: RatingMatrix, model: FactorModel, S: Optional[SimilarityMatrix],
                    hyper: MfusHyper) -> float:
    _check_dimensions(m, model, S)
    return MfusObjective(m, _laplacian_for(S, hyper), hyper).value(model.U, model.V)


def grad_user_column(m: RatingMatrix, model: FactorModel, L, hyper: MfusHyper, k: int) -> np.ndarray:
    _check_dimensions(m, model)
    if not 0 <= k < model.K:
        raise IndexError(f"column {k} outside K={model.K}")
    return MfusObjective(m, L, hyper).grad_user_column(model.U, model.V, k)


def grad_item_row(m: RatingMatrix, model: FactorModel, hyper: MfusHyper, i: int) -> np.ndarray:
    _check_dimensions(m, model)
    if not 0 <= i < m.n_items:
        raise IndexError(f"item {i} outside {m.n_items} items")
    return MfusObjective(m, None, hyper).grad_item_row(model.U, model.V, i)


def backtracking_step(f: Callable, point, direction, grad, ls_shrink: float = 0.5, ls_c: float = 1e-4,
                      max_halvings: int = MAX_HALVINGS, f_point: Optional[float] = None) -> float:
    """
    largest t in {1, shrink, shrink^2, ...} with
    f(point + t d) <= f(point) + c t grad.d
    """
    slope = float(np.vdot(grad, direction))
    if not slope < 0:
        raise LineSearchError(f"direction is not a descent direction (slope {slope!r})")
    f0 = f(point) if f_point is None else f_point
    t = 1.0
    for _ in range(max_halvings + 1):
        if f(point + t * direction) <= f0 + ls_c * t * slope:
            return t
        t *= ls_shrink
    raise LineSearchError(f"no admissible step after {max_halvings} halvings")


def train_mfus(m: RatingMatrix, S: Optional[SimilarityMatrix], hyper: MfusHyper,
               domain_tag: str = 'mfus') -> FactorModel:
    """
    alternating sweeps: every column of U, then every row of V, one
    line-searched gradient step each, until the relative objective decrease
    falls below tol or max_outer_iters sweeps have run
    """
    _check_dimensions(m, S=S)
    L = _laplacian_for(S, hyper)
    objective = MfusObjective(m, L, hyper)

    rng = make_rng(hyper.seed)
    U = rng.uniform(0.0, hyper.init_scale, size=(m.n_users, hyper.K))
    V = rng.uniform(0.0, hyper.init_scale, size=(m.n_items, hyper.K))

    current = objective.value(U, V)
    if not np.isfinite(current):
        raise TrainingError("initial objective is not finite")

    log_stage("training factor model", component='mfus', tag=domain_tag, users=m.n_users,
              items=m.n_items, ratings=m.nnz, K=hyper.K, alpha=hyper.alpha, beta=hyper.beta)
    history = []
    for sweep in range(1, hyper.max_outer_iters + 1):
        user_steps = [objective.step_user_column(U, V, k) for k in range(hyper.K)]
        item_step = objective.step_items(U, V)
        value = objective.value(U, V)
        if not np.isfinite(value):
            raise TrainingError(f"objective became non-finite at sweep {sweep}")
        history.append(SweepRecord(sweep, value, float(np.mean(user_steps)), item_step))
        log_stage("sweep", level='debug', component='mfus', tag=domain_tag, sweep=sweep, objective=value)

        decrease = (current - value) / max(abs(current), np.finfo(float).tiny)
        current = value
        if decrease < hyper.tol:
            break

    log_stage("trained factor model", component='mfus', tag=domain_tag,
              sweeps=len(history), objective=current)
    return FactorModel(U, V, domain_tag, m.user_ids, m.item_ids, tuple(history))
