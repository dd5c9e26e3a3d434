"""
File: run.py
File-Path: src/commands/run.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    run command: the full pipeline (or a baseline) at the configured split,
    end to end from ratings to metrics

Inputs:
    config, method names

Outputs:
    config.json, results.json, results.csv, predictions.csv and, with
    --save-models, one model-<method>.json per fitted comparison model
"""

import click

from commands.common import build_config, config_options, handles_errors, record_if_enabled
from core.baselines import save_baseline
from evaluation.experiment import execute_protocol
from evaluation.reports import emit_results
from helpers.artifact_helper import staged_output


@click.command('run')
@config_options
@click.option('--method', 'methods', multiple=True,
              help='cdlfm, af, tmatrix, mf_gbt or mfus_gbt; repeatable')
@click.option('--save-models', is_flag=True, help='write the fitted comparison models')
@click.option('--record', is_flag=True, help='store the run in the registry')
@handles_errors
def run_cmd(config_path, overrides, seed, jobs, output_dir, methods, record, save_models):
    """Run the cross-domain pipeline on one split"""
    config = build_config(config_path, overrides, seed, jobs, output_dir, methods, protocol='single')
    result = execute_protocol(config)

    with staged_output(config.output_dir) as stage:
        emit_results(stage, result.reports, config.snapshot(), result.predictions)
        if save_models:
            for method, model in sorted(result.models.items()):
                save_baseline(stage / f"model-{method}.json", model)
    for report in result.reports:
        click.echo(f"{report.method}: rmse={report.rmse:.4f} mae={report.mae:.4f} "
                   f"n={report.n_predictions}")
    run_id = record_if_enabled(record or config.record_runs, 'run', config, result.reports)
    if run_id is not None:
        click.echo(f"recorded run {run_id}")
