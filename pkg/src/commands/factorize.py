"""
File: factorize.py
File-Path: src/commands/factorize.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    factorize command: MFUS (or plain MF when beta = 0) on one domain,
    writing the model and its per-sweep training log

Inputs:
    config, domain, similarity artifact (required when beta > 0)

Outputs:
    model-<domain>.json and training-log-<domain>.csv in the output directory
"""

import click

from commands.common import DOMAIN_CHOICE, build_config, config_options, domain_matrix, handles_errors
from core.mfus import save_model, train_mfus, training_log_frame
from core.similarity import load_similarity
from helpers.artifact_helper import staged_output


@click.command('factorize')
@config_options
@click.option('--domain', type=DOMAIN_CHOICE, default='target', show_default=True)
@click.option('--similarity', 'similarity_path', type=click.Path(exists=True, dir_okay=False),
              default=None, help='similarity artifact, required when beta > 0')
@click.option('--no-split', is_flag=True, help='use the unsplit domain matrix')
@handles_errors
def factorize_cmd(config_path, overrides, seed, jobs, output_dir, domain, similarity_path, no_split):
    """Train the factor model of one domain"""
    config = build_config(config_path, overrides, seed, jobs, output_dir)
    hyper = config.mfus_for(domain)
    if hyper.beta > 0 and similarity_path is None:
        raise click.UsageError("beta > 0 needs --similarity (or set mfus.beta=0 for plain MF)")

    matrix = domain_matrix(config, domain, split=not no_split)
    S = load_similarity(similarity_path) if hyper.beta > 0 else None
    model = train_mfus(matrix, S, hyper, domain_tag='mfus' if hyper.beta > 0 else 'mf')

    with staged_output(config.output_dir) as stage:
        save_model(stage / f"model-{domain}.json", model)
        training_log_frame(model).to_csv(stage / f"training-log-{domain}.csv", index=False)
    click.echo(f"domain={domain} K={model.K} sweeps={len(model.training_log)} "
               f"objective={model.training_log[-1].objective:.6g}")
