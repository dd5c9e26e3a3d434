"""
File: common.py
File-Path: src/commands/common.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    options and error handling shared by the subcommands

Inputs:
    click parameters

Outputs:
    ExperimentConfig, exit codes (2 usage / missing input / unknown method,
    1 any other coldmap error)
"""

import functools
from typing import Iterable, Optional

import click

from dataset.ratings import RatingMatrix
from dataset.splits import build_split
from evaluation.experiment import load_data, protocol_points
from helpers.config_helper import load_config
from helpers.errors import ColdmapError, UnknownMethodError
from helpers.logging_helper import log_stage

DOMAIN_CHOICE = click.Choice(['target', 'auxiliary'])


def config_options(func):
    """--config, --set, --seed, --jobs, --out"""
    options = [
        click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
                     default=None, help='INI config file'),
        click.option('--set', 'overrides', multiple=True, metavar='SECTION.KEY=VALUE',
                     help='override one config value, repeatable'),
        click.option('--seed', type=int, default=None, help='master seed'),
        click.option('--jobs', type=int, default=None, help='parallel job limit'),
        click.option('--out', 'output_dir', type=click.Path(file_okay=False), default=None,
                     help='output directory'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def build_config(config_path: Optional[str], overrides: Iterable[str], seed: Optional[int],
                 jobs: Optional[int], output_dir: Optional[str], methods: Iterable[str] = (),
                 protocol: Optional[str] = None):
    return load_config(config_path, overrides, seed=seed, jobs=jobs, methods=tuple(methods) or None,
                       output_dir=output_dir, protocol=protocol)


def domain_matrix(config, domain: str, split: bool = True) -> RatingMatrix:
    """the domain's training view under the configured split, or the raw matrix"""
    pair, designated = load_data(config)
    if split:
        spec = protocol_points(config, designated)[0].split
        pair, _ = build_split(pair, spec, config.density_seed)
    return pair.target if domain == 'target' else pair.auxiliary


def handles_errors(func):
    """maps coldmap errors to click exits with module-qualified messages"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except UnknownMethodError as error:
            raise click.UsageError(str(error)) from None
        except FileNotFoundError as error:
            path = error.filename or str(error)
            raise click.UsageError(f"input file not found: {path}") from None
        except ColdmapError as error:
            log_stage("command failed", level='error', component='cli', error=str(error))
            raise click.ClickException(str(error)) from None
    return wrapper


def record_if_enabled(enabled: bool, command: str, config, reports):
    """stores the run in the registry when --record or record_runs is set"""
    if not enabled:
        return None
    from db.server import get_session, init_database
    from evaluation.reports import record_run

    if not init_database():
        raise click.ClickException("run registry is unavailable")
    session = get_session()
    try:
        run = record_run(session, command, config.snapshot(), reports, config.output_dir)
        return run.RunID
    finally:
        session.close()
