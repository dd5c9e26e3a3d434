"""
File: test_cli.py
File-Path: testing/test_cli.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    end to end command line behaviour through click's test runner
"""

import json

import pandas as pd
import pytest
from click.testing import CliRunner

from app import cli
from conftest import SYNTHETIC_OVERRIDES
from core.baselines import AfModel, LinearMap, load_baseline
from core.mfus import load_model
from dataset.ratings import load_matrix


def sets(*overrides):
    args = []
    for override in overrides:
        args += ['--set', override]
    return args


def data_sets(target, auxiliary, *extra):
    return sets(f'data.target={target}', f'data.auxiliary={auxiliary}', *extra)


@pytest.fixture
def runner():
    return CliRunner()


def test_ingest_writes_a_matrix(runner, write_ratings, tmp_path):
    ratings = write_ratings("ratings.csv", [("u1", "i1", 5), ("u1", "i2", 3), ("u2", "i1", 4)],
                            header="user,item,rating")
    out = tmp_path / "matrix.json"
    result = runner.invoke(cli, ['ingest', str(ratings), '--header', '--out', str(out)])
    assert result.exit_code == 0, result.output
    assert "users=2 items=2 ratings=3" in result.output
    matrix = load_matrix(out)
    assert matrix.n_users == 2 and matrix.nnz == 3


def test_ingest_reports_the_bad_line(runner, write_ratings, tmp_path):
    ratings = write_ratings("ratings.csv", [("u1", "i1", 5), ("u1", "i2", 9)])
    result = runner.invoke(cli, ['ingest', str(ratings), '--out', str(tmp_path / "m.json")])
    assert result.exit_code == 1
    assert "line 2" in result.output
    assert not (tmp_path / "m.json").exists()


def test_ingest_rejects_undecodable_input_cleanly(runner, tmp_path):
    ratings = tmp_path / "ratings.csv"
    ratings.write_bytes(b"u1,i\xff\xfe1,5\n")
    result = runner.invoke(cli, ['ingest', str(ratings), '--out', str(tmp_path / "m.json")])
    assert result.exit_code == 1
    assert "dataset: line 1: not valid UTF-8" in result.output
    assert not isinstance(result.exception, UnicodeDecodeError)


def test_af_run_end_to_end(runner, af_toy_files, tmp_path):
    target, auxiliary = af_toy_files
    out = tmp_path / "out"
    result = runner.invoke(cli, ['run', '--method', 'af', '--out', str(out),
                                 *data_sets(target, auxiliary, 'experiment.cold_start_users=u1')])
    assert result.exit_code == 0, result.output
    assert "af: rmse=1.0000 mae=1.0000 n=1" in result.output

    predictions = pd.read_csv(out / "predictions.csv")
    assert predictions.to_dict('records') == [
        {'method': 'af', 'user_id': 'u1', 'item_id': 't2', 'predicted': 3.0, 'actual': 4}]
    (report,) = json.loads((out / "results.json").read_text())
    assert report['rmse'] == pytest.approx(1.0)
    assert (out / "results.csv").is_file() and (out / "config.json").is_file()


def test_single_neighbor_run_matches_the_neighbor_model(runner, single_neighbor_files, tmp_path):
    target, auxiliary = single_neighbor_files
    common = data_sets(target, auxiliary, 'experiment.cold_start_users=u2', 'mfus.beta=0', 'mfus.K=2',
                       'mfus.max_outer_iters=50')

    run = runner.invoke(cli, ['run', '--method', 'cdlfm', '--out', str(tmp_path / "o1"), *common])
    assert run.exit_code == 0, run.output
    factorize = runner.invoke(cli, ['factorize', '--domain', 'target', '--out', str(tmp_path / "o2"), *common])
    assert factorize.exit_code == 0, factorize.output

    model = load_model(tmp_path / "o2" / "model-target.json")
    assert model.user_ids == ("u1",)
    expected = model.U[0] @ model.V[model.item_ids.index("t1")]
    (row,) = pd.read_csv(tmp_path / "o1" / "predictions.csv").to_dict('records')
    assert (row['user_id'], row['item_id'], row['actual']) == ("u2", "t1", 5)
    assert row['predicted'] == pytest.approx(expected, rel=1e-8)
    assert (tmp_path / "o2" / "training-log-target.csv").is_file()


def test_reruns_write_identical_results(runner, tmp_path):
    for name in ("a", "b"):
        result = runner.invoke(cli, ['run', '--method', 'af', '--out', str(tmp_path / name),
                                     *sets(*SYNTHETIC_OVERRIDES)])
        assert result.exit_code == 0, result.output
    for artifact in ("results.json", "predictions.csv", "config.json"):
        assert (tmp_path / "a" / artifact).read_bytes() == (tmp_path / "b" / artifact).read_bytes()


def test_parallel_cdlfm_reruns_write_identical_results(runner, tmp_path):
    for name in ("a", "b"):
        result = runner.invoke(cli, ['run', '--method', 'cdlfm', '--jobs', '2', '--out', str(tmp_path / name),
                                     *sets(*SYNTHETIC_OVERRIDES)])
        assert result.exit_code == 0, result.output
    for artifact in ("results.json", "predictions.csv", "config.json"):
        assert (tmp_path / "a" / artifact).read_bytes() == (tmp_path / "b" / artifact).read_bytes()


def test_save_models_writes_each_comparison_model(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(cli, ['run', '--method', 'af', '--method', 'tmatrix', '--method', 'mf_gbt',
                                 '--method', 'cdlfm', '--save-models', '--out', str(out), *sets(*SYNTHETIC_OVERRIDES)])
    assert result.exit_code == 0, result.output
    assert sorted(path.name for path in out.glob("model-*.json")) == [
        "model-af.json", "model-mf_gbt.json", "model-tmatrix.json"]
    assert isinstance(load_baseline(out / "model-af.json"), AfModel)
    assert isinstance(load_baseline(out / "model-tmatrix.json"), LinearMap)
    assert load_baseline(out / "model-mf_gbt.json").owner == "*"


def test_unknown_method_is_a_usage_error(runner, af_toy_files, tmp_path):
    target, auxiliary = af_toy_files
    result = runner.invoke(cli, ['run', '--method', 'cdtf', '--out', str(tmp_path / "out"),
                                 *data_sets(target, auxiliary)])
    assert result.exit_code == 2
    assert "cdtf" in result.output
    assert not (tmp_path / "out").exists()


def test_missing_inputs_are_usage_errors(runner, af_toy_files, tmp_path):
    target, _ = af_toy_files
    missing = tmp_path / "nowhere.csv"
    result = runner.invoke(cli, ['run', '--out', str(tmp_path / "out"), *data_sets(target, missing)])
    assert result.exit_code == 2
    assert "nowhere.csv" in result.output

    result = runner.invoke(cli, ['run', '--config', str(tmp_path / "absent.ini")])
    assert result.exit_code == 2
    assert "absent.ini" in result.output


def test_bad_override_fails_cleanly(runner, tmp_path):
    result = runner.invoke(cli, ['run', '--out', str(tmp_path / "out"), *sets('mfus.bogus=1')])
    assert result.exit_code == 1
    assert "mfus.bogus" in result.output


def test_failed_run_leaves_no_output(runner, af_toy_files, tmp_path):
    target, auxiliary = af_toy_files
    result = runner.invoke(cli, ['run', '--method', 'af', '--out', str(tmp_path / "out"),
                                 *data_sets(target, auxiliary, 'experiment.cold_start_users=ghost')])
    assert result.exit_code == 1
    assert "ghost" in result.output
    assert not (tmp_path / "out").exists()


def test_factorize_needs_a_similarity_when_regularized(runner, af_toy_files, tmp_path):
    target, auxiliary = af_toy_files
    result = runner.invoke(cli, ['factorize', '--out', str(tmp_path / "out"), *data_sets(target, auxiliary)])
    assert result.exit_code == 2
    assert "--similarity" in result.output


def test_similarity_of_the_wrong_domain_is_rejected(runner, single_neighbor_files, tmp_path):
    target, auxiliary = single_neighbor_files
    common = data_sets(target, auxiliary, 'experiment.cold_start_users=u2')
    made = runner.invoke(cli, ['similarity', '--domain', 'auxiliary', '--no-split',
                               '--out', str(tmp_path / "sim"), *common])
    assert made.exit_code == 0, made.output
    result = runner.invoke(cli, ['factorize', '--domain', 'target', '--out', str(tmp_path / "out"),
                                 '--similarity', str(tmp_path / "sim" / "similarity-auxiliary.json"), *common])
    assert result.exit_code == 1
    assert not (tmp_path / "out").exists()


def test_similarity_writes_every_component(runner, write_ratings, tmp_path):
    auxiliary = write_ratings("auxiliary.csv", [(f"u{u}", f"a{i}", 1 + (u + i) % 5)
                                                for u in range(100) for i in range(3)])
    target = write_ratings("target.csv", [(f"u{u}", "t1", 1 + u % 5) for u in range(100)])
    out = tmp_path / "sim"
    result = runner.invoke(cli, ['similarity', '--domain', 'auxiliary', '--no-split', '--format', 'npz',
                                 '--out', str(out), *data_sets(target, auxiliary)])
    assert result.exit_code == 0, result.output
    assert "users=100 pairs=4950" in result.output
    for suffix in ("", "-S1", "-S2", "-S3"):
        assert (out / f"similarity-auxiliary{suffix}.npz").is_file()


def test_experiment_command_sweeps_density(runner, tmp_path):
    out = tmp_path / "exp"
    result = runner.invoke(cli, ['experiment', '--protocol', 'density', '--method', 'af',
                                 '--out', str(out), *sets(*SYNTHETIC_OVERRIDES)])
    assert result.exit_code == 0, result.output
    reports = json.loads((out / "results.json").read_text())
    assert [r['point'] for r in reports] == ["density=0.5", "density=0.7", "density=1"]
    assert not (out / "predictions.csv").exists()


def test_grid_command_labels_plain_mf(runner, tmp_path):
    out = tmp_path / "grid"
    result = runner.invoke(cli, ['grid', '--out', str(out),
                                 *sets(*SYNTHETIC_OVERRIDES, 'experiment.grid_K=2', 'experiment.grid_beta=0,0.01',
                                       'experiment.grid_rho_step=0', 'mfus.max_outer_iters=5')])
    assert result.exit_code == 0, result.output
    reports = json.loads((out / "results.json").read_text())
    assert [r['method'] for r in reports] == ['mf', 'mfus']


def test_log_level_option_is_accepted(runner):
    result = runner.invoke(cli, ['--log-level', 'warning', 'history', '--db-url', 'sqlite://'])
    assert result.exit_code == 0, result.output
    assert "no recorded runs" in result.output


def test_measure_flags_reach_the_similarity(runner, single_neighbor_files, tmp_path):
    target, auxiliary = single_neighbor_files
    out = tmp_path / "sim"
    result = runner.invoke(cli, ['similarity', '--no-split', '--rho', '1,0,0', '--gamma1', '0.5',
                                 '--out', str(out), *data_sets(target, auxiliary)])
    assert result.exit_code == 0, result.output
    combined = json.loads((out / "similarity-auxiliary.json").read_text())
    common = json.loads((out / "similarity-auxiliary-S1.json").read_text())
    assert combined['values'] == pytest.approx(common['values'], abs=1e-15)
