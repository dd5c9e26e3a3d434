"""
File: test_helpers.py
File-Path: testing/test_helpers.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    configuration loading, staged outputs, logging and validation helpers
"""

import logging

import pytest

from helpers.artifact_helper import staged_file, staged_output
from helpers.config_helper import config_hash, load_config, parse_override
from helpers.errors import ConfigError, UnknownMethodError
from helpers.logging_helper import log_stage
from helpers.random_helper import derive_seed, make_rng
from helpers.validation_helper import (validate_gbt_hyper, validate_mapping, validate_methods,
                                       validate_mfus_hyper, validate_similarity_params, validate_split_spec)


# -- configuration --------------------------------------------------------------

def test_defaults():
    config = load_config()
    assert config.sim == 0.45
    assert config.fallback_k == 50
    assert config.methods == ('cdlfm',)
    assert config.mfus_target.K == 15 and config.mfus_target.beta == 0.005
    assert config.similarity_auxiliary.rho == (0.6, 0.2, 0.2)
    assert config.gbt.nu == 0.01
    assert config.split.cold_start_fraction == 0.5


def test_seeds_are_derived_per_module():
    config = load_config(seed=7)
    assert config.split.seed == 7
    assert config.density_seed == 8
    assert config.mfus_target.seed == 18 and config.mfus_auxiliary.seed == 19
    assert config.gbt.seed == 28
    assert config.synthetic.seed == 38
    assert config.grid_seed == derive_seed(7, 'grid') == 48


def test_file_then_overrides_then_flags(tmp_path):
    path = tmp_path / "coldmap.ini"
    path.write_text("[mfus]\nK = 10\nalpha = 0.02\n\n[mfus.auxiliary]\nK = 12\n\n"
                    "[experiment]\nseed = 3\nmethods = af, tmatrix\n", encoding="utf-8")
    config = load_config(path)
    assert config.mfus_target.K == 10 and config.mfus_auxiliary.K == 12
    assert config.mfus_auxiliary.alpha == 0.02
    assert config.methods == ('af', 'tmatrix')
    assert config.seed == 3

    config = load_config(path, overrides=['mfus.K=20', 'experiment.seed=4'], seed=5)
    assert config.mfus_target.K == 20
    assert config.mfus_auxiliary.K == 12
    assert config.seed == 5


def test_unknown_sections_and_keys(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[nonsense]\nx = 1\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError) as caught:
        load_config(overrides=['gbt.depth=2'])
    assert 'gbt.depth' in caught.value.errors
    with pytest.raises(ConfigError):
        load_config(overrides=['mfus.K=many'])
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "missing.ini")


def test_invalid_values_are_rejected():
    with pytest.raises(ConfigError):
        load_config(overrides=['mapping.sim=1.5'])
    with pytest.raises(ConfigError):
        load_config(overrides=['similarity.rho=0.5,0.5,0.5'])
    with pytest.raises(UnknownMethodError):
        load_config(methods=['cdtf'])


def test_parse_override():
    assert parse_override("mfus.target.K=8") == ("mfus.target", "K", "8")
    assert parse_override(" gbt.nu = 0.1 ") == ("gbt", "nu", "0.1")
    for bad in ("mfus.K", "K=3", "bogus.K=3"):
        with pytest.raises(ConfigError):
            parse_override(bad)


def test_config_hash_is_stable_and_short():
    first, second = load_config(), load_config(jobs=4, output_dir="elsewhere")
    assert config_hash(first.snapshot()) == config_hash(second.snapshot())
    assert len(config_hash(first.snapshot())) == 16
    assert config_hash(load_config(seed=1).snapshot()) != config_hash(first.snapshot())


def test_rng_is_reproducible():
    assert make_rng(5).integers(0, 1000, size=4).tolist() == make_rng(5).integers(0, 1000, size=4).tolist()


# -- staged outputs -------------------------------------------------------------

def test_staged_output_publishes_on_success(tmp_path):
    destination = tmp_path / "out"
    with staged_output(destination) as stage:
        (stage / "a.txt").write_text("a")
        assert not destination.exists()
    assert (destination / "a.txt").read_text() == "a"
    assert [p.name for p in tmp_path.iterdir()] == ["out"]


def test_staged_output_discards_on_failure(tmp_path):
    destination = tmp_path / "out"
    with pytest.raises(RuntimeError):
        with staged_output(destination) as stage:
            (stage / "a.txt").write_text("a")
            raise RuntimeError("boom")
    assert not destination.exists()
    assert list(tmp_path.iterdir()) == []


def test_staged_file_replaces_existing(tmp_path):
    path = tmp_path / "matrix.json"
    path.write_text("old")
    with staged_file(path) as scratch:
        scratch.write_text("new")
    assert path.read_text() == "new"


# -- logging --------------------------------------------------------------------

def test_log_stage_appends_context(caplog):
    caplog.set_level(logging.INFO, logger='coldmap')
    log_stage("trained factor model", component='mfus', sweeps=3, objective=1.5)
    record = caplog.records[-1]
    assert record.name == 'coldmap.mfus'
    assert record.getMessage() == "trained factor model | sweeps=3 objective=1.5"


def test_log_stage_levels(caplog):
    caplog.set_level(logging.DEBUG, logger='coldmap')
    log_stage("plain")
    log_stage("careful", level='warning')
    assert [(r.name, r.levelno) for r in caplog.records[-2:]] == [('coldmap', logging.INFO),
                                                                   ('coldmap', logging.WARNING)]


# -- validation -----------------------------------------------------------------

def test_validators_return_field_errors():
    assert validate_mapping(0.45, 50) == {}
    assert set(validate_mapping(1.0, 0)) == {'sim', 'fallback_k'}
    assert validate_methods(['cdlfm', 'af']) == {}
    assert 'methods' in validate_methods([])
    assert set(validate_similarity_params(0.0, 3, 2, 6, 1.0, (0.6, 0.2, 0.2), 4)) == {'gamma1', 'base'}
    assert 'rho' in validate_similarity_params(0.25, 3, 2, 6, 2, (0.5, 0.2, 0.2), 4)
    assert 'rated_map' in validate_similarity_params(0.25, 3, 2, 6, 2, (0.6, 0.2, 0.2), 4, {1: 1.0})
    assert set(validate_mfus_hyper(0, -1.0, 0.0, 10, 1e-5, 0.5, 1e-4, 0.1)) == {'K', 'alpha'}
    assert 'eta_policy' in validate_gbt_hyper(0.01, 'newton', 10, 1e-6, 3, 2)
    assert validate_split_spec(0.5, 1.0, 1.0) == {}
