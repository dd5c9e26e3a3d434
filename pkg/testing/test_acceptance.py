"""
File: test_acceptance.py
File-Path: testing/test_acceptance.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    benchmark-scale trend checks over three seeds: similarity regularization
    against plain MF, the ordering of the mapping methods and the effect of
    the sim threshold. Deselected by default; run with pytest -m acceptance
"""

from collections import defaultdict

import numpy as np
import pytest

from evaluation.experiment import execute_protocol, parameter_grid
from evaluation.synthetic import SyntheticSpec, generate_synthetic
from helpers.config_helper import load_config

pytestmark = pytest.mark.acceptance

SEEDS = (0, 1, 2)
BETAS = (0.0, 0.001, 0.002, 0.005, 0.01)
MAPPING_METHODS = ('cdlfm', 'mfus_gbt', 'mf_gbt', 'tmatrix')

GRID_OVERRIDES = (
    'experiment.grid_K=5',
    'experiment.grid_alpha=0.01',
    'experiment.grid_beta=' + ','.join(f"{beta:g}" for beta in BETAS),
    'experiment.grid_rho_step=0',
)

BENCHMARK_OVERRIDES = (
    'data.source=synthetic',
    'synthetic.n_linked=400',
    'synthetic.n_cold=100',
    'synthetic.K_true=5',
    'synthetic.noise_sd=0.1',
    'synthetic.cross_map=piecewise',
    'mfus.K=5',
    'experiment.sim_grid=0.2,0.45',
)


def is_unimodal(values, slack):
    """falls to its minimum and rises after it, allowing relative slack per step"""
    low = int(np.argmin(values))
    falling = all(b <= a * (1 + slack) for a, b in zip(values[:low], values[1:low + 1]))
    rising = all(b >= a * (1 - slack) for a, b in zip(values[low:], values[low + 1:]))
    return falling and rising


def mean_rmse(reports):
    """{(method, point): mean rmse over the collected seeds}"""
    collected = defaultdict(list)
    for report in reports:
        collected[(report.method, report.point)].append(report.rmse)
    return {key: float(np.mean(values)) for key, values in collected.items()}


@pytest.fixture(scope="module")
def benchmark_rmse():
    reports = []
    for seed in SEEDS:
        config = load_config(overrides=BENCHMARK_OVERRIDES, seed=seed, jobs=-1, protocol='sim_sweep',
                             methods=MAPPING_METHODS)
        reports.extend(execute_protocol(config).reports)
    return mean_rmse(reports)


def test_similarity_regularization_beats_plain_factorization():
    reports = []
    for seed in SEEDS:
        spec = SyntheticSpec(n_linked=299, n_cold=1, n_items_auxiliary=200, K_true=5, density=0.05,
                             n_clusters=5, seed=seed)
        matrix = generate_synthetic(spec).domain('auxiliary')
        config = load_config(overrides=GRID_OVERRIDES, seed=seed, jobs=-1)
        reports.extend(r for r in parameter_grid(config, matrix) if r.protocol == 'grid')

    by_beta = defaultdict(list)
    for report in reports:
        by_beta[float(report.point.rpartition('beta=')[2])].append(report.rmse)
    curve = [float(np.mean(by_beta[beta])) for beta in BETAS]

    assert min(curve[1:]) <= 0.98 * curve[0]
    assert is_unimodal(curve, slack=0.005)


def test_neighborhood_mapping_beats_the_ablations(benchmark_rmse):
    def at(method):
        return benchmark_rmse[(method, "sim=0.45")]

    assert at('cdlfm') <= 0.99 * at('mfus_gbt')
    assert at('mfus_gbt') <= 0.99 * at('mf_gbt')
    assert at('cdlfm') <= 0.99 * at('tmatrix')


def test_stricter_sim_threshold_is_not_worse(benchmark_rmse):
    assert benchmark_rmse[('cdlfm', "sim=0.45")] <= benchmark_rmse[('cdlfm', "sim=0.2")]
