"""
File: grid.py
File-Path: src/commands/grid.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    grid command: single-domain MFUS over the (K, alpha, beta) grid and the
    similarity weight grid

Inputs:
    config

Outputs:
    config.json, results.json, results.csv
"""

import click

from commands.common import build_config, config_options, handles_errors, record_if_enabled
from evaluation.experiment import parameter_grid
from evaluation.reports import emit_results
from helpers.artifact_helper import staged_output


@click.command('grid')
@config_options
@click.option('--record', is_flag=True, help='store the run in the registry')
@handles_errors
def grid_cmd(config_path, overrides, seed, jobs, output_dir, record):
    """Sweep MFUS hyperparameters and similarity weights on one domain"""
    config = build_config(config_path, overrides, seed, jobs, output_dir)
    reports = parameter_grid(config)

    with staged_output(config.output_dir) as stage:
        emit_results(stage, reports, config.snapshot())
    for report in reports:
        click.echo(f"{report.protocol} {report.point}: rmse={report.rmse:.4f} mae={report.mae:.4f}")
    run_id = record_if_enabled(record or config.record_runs, 'grid', config, reports)
    if run_id is not None:
        click.echo(f"recorded run {run_id}")
