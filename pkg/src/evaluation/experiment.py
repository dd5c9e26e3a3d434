"""
File: experiment.py
File-Path: src/evaluation/experiment.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    experiment protocols: one evaluation at the configured split (single),
    density-level and overlap-level sweeps, the sim-threshold sweep and the
    single-domain (K, alpha, beta) and similarity-weight grids

Inputs:
    ExperimentConfig (ratings files or the synthetic benchmark)

Outputs:
    MetricReport sequences and the per-rating prediction table
"""

import math
import time
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from core.mfus import train_mfus
from core.pipeline import fitted_models, predict_with
from core.similarity import SimilarityMatrix, component_similarity_matrices
from dataset.ratings import RatingMatrix, RatingRecord, build_rating_matrix, filter_min_ratings, parse_ratings_file
from dataset.splits import DomainPair, SplitSpec, build_split, make_domain_pair
from evaluation.metrics import MetricReport, mae, rmse
from evaluation.synthetic import generate_synthetic
from helpers.config_helper import ExperimentConfig, config_hash
from helpers.errors import ConfigError, LeakageError
from helpers.logging_helper import log_stage
from helpers.random_helper import make_rng

PREDICTION_COLUMNS = ['method', 'user_id', 'item_id', 'predicted', 'actual']


@dataclass(frozen=True)
class ProtocolPoint:
    protocol: str
    label: str
    split: SplitSpec
    sim: float


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    reports: Tuple[MetricReport, ...]
    predictions: Optional[pd.DataFrame] = None
    models: Dict[str, object] = field(default_factory=dict)


def load_data(config: ExperimentConfig) -> Tuple[DomainPair, Tuple[str, ...]]:
    """
    the unsplit pair and any designated cold-start users

    Files are parsed, built and min-count filtered per domain; the synthetic
    source designates its last n_cold users.
    """
    if config.data.source == 'synthetic':
        benchmark = generate_synthetic(config.synthetic)
        return benchmark.pair, benchmark.cold_start_users

    if not config.data.target or not config.data.auxiliary:
        raise ConfigError({'data': "target and auxiliary ratings files are required"})
    matrices = []
    for path in (config.data.target, config.data.auxiliary):
        records = parse_ratings_file(path, header=config.data.header)
        matrix = build_rating_matrix(records)
        if config.data.min_user or config.data.min_item:
            matrix = filter_min_ratings(matrix, config.data.min_user, config.data.min_item)
        matrices.append(matrix)
    return make_domain_pair(*matrices), ()


def protocol_points(config: ExperimentConfig, designated: Sequence[str] = ()) -> List[ProtocolPoint]:
    base = config.split
    fixed = replace(base, cold_start_users=tuple(designated)) \
        if designated and not base.cold_start_users else base

    if config.protocol == 'single':
        return [ProtocolPoint('single', 'default', fixed, config.sim)]
    if config.protocol == 'density':
        return [ProtocolPoint('density', f"density={level:g}",
                              replace(fixed, density_level=level, overlap_level=1.0), config.sim)
                for level in config.density_levels]
    if config.protocol == 'overlap':
        # the overlap level decides who is cold-start, designated users do not apply
        return [ProtocolPoint('overlap', f"overlap={level:g}",
                              replace(base, overlap_level=level, density_level=1.0, cold_start_users=()),
                              config.sim)
                for level in config.overlap_levels]
    return [ProtocolPoint('sim_sweep', f"sim={sim:g}", fixed, sim) for sim in config.sim_grid]


def check_test_isolation(train: DomainPair, test: Sequence[RatingRecord]):
    """held-out cells belong to cold-start users and none of them reached training"""
    owners = train.target.users_with_ratings()
    for record in test:
        if record.user_id not in train.cold_start_users:
            raise LeakageError(f"test rating of {record.user_id!r} who is not cold-start")
        if record.user_id in owners:
            raise LeakageError(f"cold-start user {record.user_id!r} has target training ratings")


def _score(table, test: Sequence[RatingRecord], clamp: bool) -> Tuple[np.ndarray, np.ndarray]:
    predicted = table.for_records(test, clamp=clamp)
    actual = np.array([record.rating for record in test], dtype=np.float64)
    return predicted, actual


def _evaluate_split(pair: DomainPair, points: List[Tuple[int, ProtocolPoint]], config: ExperimentConfig,
                    digest: str, keep_predictions: bool):
    """every point sharing one split; sim only changes cdlfm, other tables are reused"""
    split = points[0][1].split
    train, test = build_split(pair, split, config.density_seed)
    check_test_isolation(train, test)

    cache: Dict = {}
    reusable = {}
    keyed_reports = []
    frames = []
    for position, point in points:
        point_config = replace(config, sim=point.sim)
        for method in config.methods:
            started = time.perf_counter()
            if method in reusable:
                table = reusable[method]
            else:
                table = predict_with(method, train, point_config, cache)
                if method != 'cdlfm':
                    reusable[method] = table
            predicted, actual = _score(table, test, config.clamp)
            report = MetricReport(point.protocol, point.label, method, rmse(predicted, actual),
                                  mae(predicted, actual), len(test), split.descriptor(), digest,
                                  time.perf_counter() - started)
            keyed_reports.append(((point.protocol, method, position), report))
            log_stage("evaluated", component='eval', protocol=point.protocol, point=point.label,
                      method=method, rmse=f"{report.rmse:.4f}", mae=f"{report.mae:.4f}")
            if keep_predictions:
                frames.append(pd.DataFrame({
                    'method': method,
                    'user_id': [record.user_id for record in test],
                    'item_id': [record.item_id for record in test],
                    'predicted': predicted,
                    'actual': actual.astype(np.int64),
                }, columns=PREDICTION_COLUMNS))
    return keyed_reports, frames, fitted_models(cache) if keep_predictions else {}


def execute_protocol(config: ExperimentConfig, pair: Optional[DomainPair] = None,
                     designated: Sequence[str] = ()) -> ExperimentResult:
    """
    runs every (protocol point, method); points sharing a split run as one
    job and jobs run in parallel up to config.jobs

    Reports come back sorted by (protocol, method, point order).
    """
    if pair is None:
        pair, designated = load_data(config)
    digest = config_hash(config.snapshot())
    points = list(enumerate(protocol_points(config, designated)))

    groups: Dict[SplitSpec, List[Tuple[int, ProtocolPoint]]] = {}
    for position, point in points:
        groups.setdefault(point.split, []).append((position, point))

    keep_predictions = config.protocol == 'single'
    parallel_groups = len(groups) > 1 and config.jobs != 1
    inner = replace(config, jobs=1) if parallel_groups else config
    log_stage("running protocol", component='eval', protocol=config.protocol,
              points=len(points), splits=len(groups), methods=','.join(config.methods))
    outputs = Parallel(n_jobs=config.jobs if parallel_groups else 1)(
        delayed(_evaluate_split)(pair, group, inner, digest, keep_predictions)
        for group in groups.values())

    keyed = [item for reports, _, _ in outputs for item in reports]
    keyed.sort(key=lambda item: item[0])
    frames = [frame for _, group_frames, _ in outputs for frame in group_frames]
    predictions = pd.concat(frames, ignore_index=True) if frames else None
    models = {method: model for _, _, fitted in outputs for method, model in fitted.items()}
    return ExperimentResult(tuple(report for _, report in keyed), predictions, models)


def run_experiment(config: ExperimentConfig) -> List[MetricReport]:
    return list(execute_protocol(config).reports)


# -- single-domain grids -------------------------------------------------------

def grid_split(matrix: RatingMatrix, train_fraction: float, seed: int) -> Tuple[RatingMatrix, np.ndarray]:
    """seeded split of the observed entries; returns (train matrix, test entry mask)"""
    rng = make_rng(seed)
    order = rng.permutation(matrix.nnz)
    n_train = int(math.floor(train_fraction * matrix.nnz + 1e-9))
    train_mask = np.zeros(matrix.nnz, dtype=bool)
    train_mask[order[:n_train]] = True
    return matrix.with_entries(train_mask), ~train_mask


def rho_grid(step: float) -> List[Tuple[float, float, float]]:
    """(rho1, rho2, 1 - rho1 - rho2) on a step lattice with rho1 + rho2 <= 1"""
    if step <= 0:
        return []
    n = int(math.floor(1.0 / step + 1e-9))
    weights = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            rho1, rho2 = round(i * step, 10), round(j * step, 10)
            weights.append((rho1, rho2, max(0.0, round(1.0 - rho1 - rho2, 10))))
    return weights


def _grid_point(train: RatingMatrix, test: Tuple[np.ndarray, np.ndarray, np.ndarray],
                S: Optional[SimilarityMatrix], hyper, protocol: str, label: str, method: str,
                split: str, digest: str, clamp: bool) -> MetricReport:
    started = time.perf_counter()
    model = train_mfus(train, S if hyper.beta > 0 else None, hyper, domain_tag=method)
    rows, cols, actual = test
    predicted = model.predict(rows, cols)
    if clamp:
        predicted = np.clip(predicted, 1.0, 5.0)
    return MetricReport(protocol, label, method, rmse(predicted, actual), mae(predicted, actual),
                        int(actual.size), split, digest, time.perf_counter() - started)


def parameter_grid(config: ExperimentConfig, matrix: Optional[RatingMatrix] = None) -> List[MetricReport]:
    """
    single-domain MFUS over the (K, alpha, beta) grid and the similarity
    weight grid, on one seeded train/test split of the grid domain

    beta = 0 points are plain MF and are reported as method 'mf'.
    """
    grid = config.grid
    if matrix is None:
        pair, _ = load_data(config)
        matrix = pair.target if grid.domain == 'target' else pair.auxiliary
    digest = config_hash(config.snapshot())
    split = f"holdout={1 - grid.train_fraction:g},seed={config.grid_seed}"
    train, test_mask = grid_split(matrix, grid.train_fraction, config.grid_seed)
    test = (matrix.rows[test_mask], matrix.cols[test_mask], matrix.values[test_mask].astype(np.float64))

    params = config.similarity_for(grid.domain)
    components = component_similarity_matrices(train, params, config.jobs)
    base_hyper = config.mfus_for(grid.domain)

    jobs = []
    for K, alpha, beta in product(grid.K, grid.alpha, grid.beta):
        hyper = replace(base_hyper, K=K, alpha=alpha, beta=beta)
        jobs.append((components['combined'], hyper, 'grid', f"K={K},alpha={alpha:g},beta={beta:g}",
                     'mfus' if beta > 0 else 'mf'))
    for rho in rho_grid(grid.rho_step):
        values = rho[0] * components['S1'].values + rho[1] * components['S2'].values \
            + rho[2] * components['S3'].values
        S = SimilarityMatrix(train.n_users, np.clip(values, 0.0, 1.0), 'combined')
        hyper = replace(base_hyper, K=grid.rho_K, alpha=grid.rho_alpha, beta=grid.rho_beta)
        jobs.append((S, hyper, 'rho_sweep', "rho={:g}/{:g}/{:g}".format(*rho), 'mfus'))

    log_stage("running parameter grid", component='eval', domain=grid.domain, points=len(jobs),
              train=train.nnz, test=int(test_mask.sum()))
    return Parallel(n_jobs=config.jobs)(
        delayed(_grid_point)(train, test, S, hyper, protocol, label, method, split, digest, config.clamp)
        for S, hyper, protocol, label, method in jobs)
