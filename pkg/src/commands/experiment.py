"""
File: experiment.py
File-Path: src/commands/experiment.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    experiment command: density, overlap or sim-threshold sweeps

Inputs:
    config, protocol

Outputs:
    config.json, results.json, results.csv
"""

import click

from commands.common import build_config, config_options, handles_errors, record_if_enabled
from evaluation.experiment import execute_protocol
from evaluation.reports import emit_results
from helpers.artifact_helper import staged_output
from helpers.validation_helper import KNOWN_PROTOCOLS


@click.command('experiment')
@config_options
@click.option('--protocol', type=click.Choice(KNOWN_PROTOCOLS), default=None,
              help='overrides [experiment] protocol')
@click.option('--method', 'methods', multiple=True, help='repeatable')
@click.option('--record', is_flag=True, help='store the run in the registry')
@handles_errors
def experiment_cmd(config_path, overrides, seed, jobs, output_dir, protocol, methods, record):
    """Run one experiment protocol over all configured methods"""
    config = build_config(config_path, overrides, seed, jobs, output_dir, methods, protocol=protocol)
    result = execute_protocol(config)

    with staged_output(config.output_dir) as stage:
        emit_results(stage, result.reports, config.snapshot(), result.predictions)
    for report in result.reports:
        click.echo(f"{report.protocol} {report.point} {report.method}: "
                   f"rmse={report.rmse:.4f} mae={report.mae:.4f}")
    run_id = record_if_enabled(record or config.record_runs, 'experiment', config, result.reports)
    if run_id is not None:
        click.echo(f"recorded run {run_id}")
