"""
File: mapping.py
File-Path: src/core/mapping.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    neighborhood based cross-domain latent feature mapping: for every
    cold-start user, pick the linked users whose auxiliary-domain similarity
    exceeds sim, fit one boosted tree ensemble per target latent dimension on
    their (auxiliary, target) feature pairs, map the user's auxiliary features
    and score every target item

Inputs:
    DomainPair after a split, ExperimentConfig

Outputs:
    MappingFunction objects and a PredictionTable of cold-start users x target items
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from core.gbt import GbtHyper, GbtModel, fit_gbt, gbt_from_dict
from core.similarity import SimilarityMatrix
from dataset.ratings import RatingRecord
from helpers.errors import ArtifactError, DimensionError, MappingError
from helpers.logging_helper import log_stage

MAPPING_VERSION = "coldmap-mapping-v1"


@dataclass(frozen=True)
class NeighborSet:
    owner: str
    members: Tuple[int, ...]
    threshold_used: float
    fallback: bool = False

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class MappingFunction:
    owner: str
    subfunctions: Tuple[GbtModel, ...]
    neighbor_count: int

    @property
    def K_t(self) -> int:
        return len(self.subfunctions)

    def to_dict(self) -> dict:
        return {
            'version': MAPPING_VERSION,
            'owner': self.owner,
            'neighbor_count': self.neighbor_count,
            'subfunctions': [model.to_dict() for model in self.subfunctions],
        }


def mapping_from_dict(payload: dict) -> MappingFunction:
    if payload.get('version') != MAPPING_VERSION:
        raise ArtifactError(f"unsupported mapping version {payload.get('version')!r}")
    return MappingFunction(payload['owner'], tuple(gbt_from_dict(model) for model in payload['subfunctions']),
                           int(payload['neighbor_count']))


@dataclass(frozen=True, eq=False)
class PredictionTable:
    """raw scores of cold-start users (rows) on target items (columns)"""
    user_ids: Tuple[str, ...]
    item_ids: Tuple[str, ...]
    scores: np.ndarray
    method: str = 'cdlfm'

    def __post_init__(self):
        if self.scores.shape != (len(self.user_ids), len(self.item_ids)):
            raise DimensionError(f"score table {self.scores.shape} does not match "
                                 f"{len(self.user_ids)} users x {len(self.item_ids)} items", module='mapping')
        self.scores.setflags(write=False)

    @property
    def is_empty(self) -> bool:
        return len(self.user_ids) == 0

    def for_records(self, records: Sequence[RatingRecord], clamp: bool = False) -> np.ndarray:
        """scores aligned with records; only the cells named by records are read"""
        users = {uid: idx for idx, uid in enumerate(self.user_ids)}
        items = {iid: idx for idx, iid in enumerate(self.item_ids)}
        try:
            rows = np.fromiter((users[r.user_id] for r in records), dtype=np.int64, count=len(records))
            cols = np.fromiter((items[r.item_id] for r in records), dtype=np.int64, count=len(records))
        except KeyError as missing:
            raise MappingError(f"no prediction for {missing.args[0]!r}") from None
        out = self.scores[rows, cols]
        return np.clip(out, 1.0, 5.0) if clamp else out.copy()


def select_neighbors(owner: str, u: int, linked: Sequence[int], S_aux: SimilarityMatrix,
                     sim: float, fallback_k: int = 50) -> NeighborSet:
    """
    linked users v with S_aux[u, v] > sim, ordered by (similarity desc, index asc)

    When nobody clears sim the set falls back to at most fallback_k of the
    linked users tied at the highest similarity and is flagged. That tie
    group is the smallest non-empty gated set, so raising sim never enlarges
    the result.
    """
    linked = np.asarray([v for v in linked if v != u], dtype=np.int64)
    if linked.size == 0:
        raise MappingError(f"no linked users available for {owner!r}")

    sims = S_aux.row(u)[linked]
    order = np.lexsort((linked, -sims))
    ranked, ranked_sims = linked[order], sims[order]

    chosen = ranked[ranked_sims > sim]
    if chosen.size:
        return NeighborSet(owner, tuple(int(v) for v in chosen), sim, False)
    top = ranked[ranked_sims == ranked_sims[0]][:fallback_k]
    return NeighborSet(owner, tuple(int(v) for v in top), sim, True)


def train_user_mapping(owner: str, neighbors: NeighborSet, aux_rows: np.ndarray, tgt_rows: np.ndarray,
                       hyper: GbtHyper) -> MappingFunction:
    """
    one GBT per target dimension k on {aux_rows[v] -> tgt_rows[v, k]}

    aux_rows and tgt_rows hold only the neighbors' feature rows, aligned with
    neighbors.members.
    """
    aux_rows = np.atleast_2d(np.asarray(aux_rows, dtype=np.float64))
    tgt_rows = np.atleast_2d(np.asarray(tgt_rows, dtype=np.float64))
    if len(neighbors) == 0:
        raise MappingError(f"empty neighborhood for {owner!r}")
    if aux_rows.shape[0] != len(neighbors) or tgt_rows.shape[0] != len(neighbors):
        raise DimensionError(f"{len(neighbors)} neighbors but {aux_rows.shape[0]} auxiliary and "
                             f"{tgt_rows.shape[0]} target rows", module='mapping')

    subfunctions = tuple(fit_gbt(aux_rows, tgt_rows[:, k], hyper) for k in range(tgt_rows.shape[1]))
    return MappingFunction(owner, subfunctions, len(neighbors))


def map_features(F_u: MappingFunction, u_aux: Sequence[float]) -> np.ndarray:
    x = np.asarray(u_aux, dtype=np.float64).reshape(1, -1)
    return np.array([model.predict(x)[0] for model in F_u.subfunctions])


def predict_ratings(u_mapped: Sequence[float], V_tgt: np.ndarray) -> np.ndarray:
    """r_hat = V_t u^T, unclamped"""
    u_mapped = np.asarray(u_mapped, dtype=np.float64)
    V_tgt = np.asarray(V_tgt, dtype=np.float64)
    if V_tgt.ndim != 2 or V_tgt.shape[1] != u_mapped.shape[0]:
        raise DimensionError(f"item factors {V_tgt.shape} do not match a mapped vector of "
                             f"length {u_mapped.shape[0]}", module='mapping')
    return V_tgt @ u_mapped


def _map_one_user(owner: str, u_aux_index: int, linked_aux: np.ndarray, linked_tgt: np.ndarray,
                  S_aux: SimilarityMatrix, U_aux: np.ndarray, U_tgt: np.ndarray,
                  sim: float, fallback_k: int, hyper: GbtHyper) -> Tuple[np.ndarray, NeighborSet]:
    """mapped target features of one cold-start user; reads only neighbor rows"""
    neighbors = select_neighbors(owner, u_aux_index, linked_aux, S_aux, sim, fallback_k)
    position = {int(v): j for j, v in enumerate(linked_aux)}
    picks = np.array([position[v] for v in neighbors.members], dtype=np.int64)
    mapping = train_user_mapping(owner, neighbors, U_aux[linked_aux[picks]],
                                 U_tgt[linked_tgt[picks]], hyper)
    return map_features(mapping, U_aux[u_aux_index]), neighbors


@dataclass(frozen=True)
class MappingResult:
    table: PredictionTable
    neighborhoods: Tuple[NeighborSet, ...]

    @property
    def fallback_count(self) -> int:
        return sum(1 for n in self.neighborhoods if n.fallback)


def map_cold_start_users(pair, S_aux: SimilarityMatrix, model_aux, model_tgt,
                         sim: float, fallback_k: int, hyper: GbtHyper,
                         jobs: int = 1, method: str = 'cdlfm') -> MappingResult:
    """neighborhood-gated mapping for every cold-start user of the pair"""
    aux, tgt = pair.auxiliary, pair.target
    linked_ids = pair.ordered_linked()
    cold_ids = pair.ordered_cold_start()
    linked_aux = np.array([aux.user_index[uid] for uid in linked_ids], dtype=np.int64)
    linked_tgt = np.array([tgt.user_index[uid] for uid in linked_ids], dtype=np.int64)

    if not cold_ids:
        empty = np.zeros((0, tgt.n_items))
        return MappingResult(PredictionTable((), tgt.item_ids, empty, method), ())
    if linked_aux.size == 0:
        raise MappingError("no linked users to learn a mapping from")

    log_stage("mapping cold-start users", component='mapping', cold_start=len(cold_ids),
              linked=len(linked_ids), sim=sim, K_t=model_tgt.K)
    outputs = Parallel(n_jobs=jobs)(
        delayed(_map_one_user)(uid, aux.user_index[uid], linked_aux, linked_tgt, S_aux,
                               model_aux.U, model_tgt.U, sim, fallback_k, hyper)
        for uid in cold_ids)

    mapped = np.vstack([features for features, _ in outputs])
    neighborhoods = tuple(neighbors for _, neighbors in outputs)
    scores = mapped @ model_tgt.V.T
    result = MappingResult(PredictionTable(tuple(cold_ids), tgt.item_ids, scores, method), neighborhoods)
    if result.fallback_count:
        log_stage("neighborhood fallback used", level='warning', component='mapping',
                  users=result.fallback_count, fallback_k=fallback_k)
    return result


def run_cdlfm(pair, config, cache: Optional[Dict] = None) -> PredictionTable:
    """
    the full cross-domain pipeline: MFUS in both domains, then per cold-start
    user neighbor selection, mapping training, feature mapping and scoring
    """
    from core.pipeline import train_domain_factors

    factors = train_domain_factors(pair, config, regularized=True, cache=cache)
    return map_cold_start_users(pair, factors.S_aux, factors.model_aux, factors.model_tgt,
                                config.sim, config.fallback_k, config.gbt, config.jobs).table
