"""
File: pipeline.py
File-Path: src/core/pipeline.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    method dispatch over one split: trains (and caches) the per-domain
    similarities and factor models and turns them into prediction tables for
    cdlfm, af, mf_gbt, mfus_gbt and tmatrix

Inputs:
    DomainPair after a split, ExperimentConfig

Outputs:
    PredictionTable per method
"""

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from core.baselines import average_filling, fit_transformation_matrix, global_gbt_mapping, train_mf
from core.mapping import PredictionTable, run_cdlfm
from core.mfus import FactorModel, train_mfus
from core.similarity import SimilarityMatrix, combined_similarity_matrix
from dataset.ratings import RatingMatrix, from_triplets
from dataset.splits import DomainPair
from helpers.errors import UnknownMethodError
from helpers.logging_helper import log_stage
from helpers.validation_helper import KNOWN_METHODS


@dataclass(frozen=True)
class DomainFactors:
    model_tgt: FactorModel
    model_aux: FactorModel
    S_aux: Optional[SimilarityMatrix] = None
    S_tgt: Optional[SimilarityMatrix] = None


def domain_similarity(pair: DomainPair, domain: str, config, cache: Optional[Dict] = None) -> SimilarityMatrix:
    """combined similarity of one domain, computed once per split"""
    cache = {} if cache is None else cache
    key = ('similarity', domain)
    if key not in cache:
        matrix = pair.target if domain == 'target' else pair.auxiliary
        cache[key] = combined_similarity_matrix(matrix, config.similarity_for(domain), config.jobs)
    return cache[key]


def _domain_model(pair: DomainPair, domain: str, config, regularized: bool, cache: Dict) -> FactorModel:
    key = ('factors', domain, regularized)
    if key not in cache:
        matrix = pair.target if domain == 'target' else pair.auxiliary
        hyper = config.mfus_for(domain)
        if regularized:
            S = domain_similarity(pair, domain, config, cache) if hyper.beta > 0 else None
            cache[key] = train_mfus(matrix, S, hyper, domain_tag=f'mfus-{domain}')
        else:
            cache[key] = train_mf(matrix, hyper)
    return cache[key]


def train_domain_factors(pair: DomainPair, config, regularized: bool = True,
                         cache: Optional[Dict] = None) -> DomainFactors:
    """
    factor models of both domains; MFUS when regularized, plain MF otherwise

    The auxiliary similarity is always available when regularized because
    neighbor selection reads it even if beta is 0.
    """
    cache = {} if cache is None else cache
    model_tgt = _domain_model(pair, 'target', config, regularized, cache)
    model_aux = _domain_model(pair, 'auxiliary', config, regularized, cache)
    S_aux = domain_similarity(pair, 'auxiliary', config, cache) if regularized else None
    S_tgt = cache.get(('similarity', 'target'))
    return DomainFactors(model_tgt, model_aux, S_aux, S_tgt)


def _feature_rows(pair: DomainPair, factors: DomainFactors) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(linked auxiliary rows, linked target rows, cold-start auxiliary rows)"""
    aux, tgt = pair.auxiliary, pair.target
    linked = pair.ordered_linked()
    cold = pair.ordered_cold_start()
    U_aux, U_tgt = factors.model_aux.U, factors.model_tgt.U

    def rows(matrix, ids):
        return np.array([matrix.user_index[uid] for uid in ids], dtype=np.int64)

    return U_aux[rows(aux, linked)], U_tgt[rows(tgt, linked)], U_aux[rows(aux, cold)]


def _table(pair: DomainPair, scores: np.ndarray, method: str) -> PredictionTable:
    return PredictionTable(tuple(pair.ordered_cold_start()), pair.target.item_ids, scores, method)


def _empty_table(pair: DomainPair, method: str) -> PredictionTable:
    return PredictionTable((), pair.target.item_ids, np.zeros((0, pair.target.n_items)), method)


def _keep_fitted(cache: Optional[Dict], method: str, model):
    if cache is not None:
        cache[('fitted', method)] = model


def fitted_models(cache: Dict) -> Dict[str, object]:
    """comparison models fitted on this split, keyed by method"""
    return {key[1]: model for key, model in cache.items() if key[0] == 'fitted'}


def union_matrix(pair: DomainPair) -> RatingMatrix:
    """target training and auxiliary ratings in one matrix, items namespaced by domain"""
    tgt, aux = pair.target, pair.auxiliary
    users = list(tgt.user_ids) + [uid for uid in aux.user_ids if uid not in tgt.user_index]
    index = {uid: idx for idx, uid in enumerate(users)}
    items = [f"target/{iid}" for iid in tgt.item_ids] + [f"auxiliary/{iid}" for iid in aux.item_ids]
    aux_rows = np.array([index[uid] for uid in aux.user_ids], dtype=np.int64)[aux.rows]
    rows = np.concatenate([tgt.rows, aux_rows])
    cols = np.concatenate([tgt.cols, aux.cols + tgt.n_items])
    values = np.concatenate([tgt.values, aux.values])
    return from_triplets(users, items, rows, cols, values)


def predict_af(pair: DomainPair, config, cache: Optional[Dict] = None) -> PredictionTable:
    """
    average filling over the union of both domains: a cold-start user's bias
    comes from the auxiliary ratings, item biases from the target training data
    """
    model = average_filling(union_matrix(pair))
    _keep_fitted(cache, 'af', model)
    items = [f"target/{iid}" for iid in pair.target.item_ids]
    return _table(pair, model.predict_table(pair.ordered_cold_start(), items), 'af')


def _predict_global_gbt(pair: DomainPair, config, cache: Optional[Dict], regularized: bool,
                        method: str) -> PredictionTable:
    factors = train_domain_factors(pair, config, regularized, cache)
    linked_aux, linked_tgt, cold_aux = _feature_rows(pair, factors)
    mapping = global_gbt_mapping(linked_aux, linked_tgt, config.gbt)
    _keep_fitted(cache, method, mapping)
    mapped = np.column_stack([model.predict(cold_aux) for model in mapping.subfunctions])
    return _table(pair, mapped @ factors.model_tgt.V.T, method)


def predict_mf_gbt(pair: DomainPair, config, cache: Optional[Dict] = None) -> PredictionTable:
    return _predict_global_gbt(pair, config, cache, False, 'mf_gbt')


def predict_mfus_gbt(pair: DomainPair, config, cache: Optional[Dict] = None) -> PredictionTable:
    return _predict_global_gbt(pair, config, cache, True, 'mfus_gbt')


def predict_tmatrix(pair: DomainPair, config, cache: Optional[Dict] = None) -> PredictionTable:
    factors = train_domain_factors(pair, config, config.tmatrix_features == 'mfus', cache)
    linked_aux, linked_tgt, cold_aux = _feature_rows(pair, factors)
    linear = fit_transformation_matrix(linked_aux, linked_tgt, config.ridge, config.intercept)
    _keep_fitted(cache, 'tmatrix', linear)
    return _table(pair, linear.apply(cold_aux) @ factors.model_tgt.V.T, 'tmatrix')


def predict_cdlfm(pair: DomainPair, config, cache: Optional[Dict] = None) -> PredictionTable:
    return run_cdlfm(pair, config, cache)


METHODS: Dict[str, Callable[..., PredictionTable]] = {
    'cdlfm': predict_cdlfm,
    'af': predict_af,
    'mf_gbt': predict_mf_gbt,
    'mfus_gbt': predict_mfus_gbt,
    'tmatrix': predict_tmatrix,
}


def predict_with(method: str, pair: DomainPair, config, cache: Optional[Dict] = None) -> PredictionTable:
    """runs one method on a split; cache is shared between methods of the same split"""
    if method not in METHODS:
        raise UnknownMethodError({'methods': f"unknown method {method!r}; expected one of "
                                             f"{', '.join(KNOWN_METHODS)}"}, module='pipeline')
    if not pair.cold_start_users:
        return _empty_table(pair, method)
    log_stage("running method", component='pipeline', method=method,
              cold_start=len(pair.cold_start_users))
    return METHODS[method](pair, config, {} if cache is None else cache)
