"""
File: similarity.py
File-Path: src/commands/similarity.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    similarity command: combined and component user similarities of one
    domain, written as coldmap-sim-v1 artifacts

Inputs:
    config (data source, split, similarity parameters), domain

Outputs:
    similarity-<domain>[-S1|-S2|-S3].json|npz in the output directory
"""

import click

from commands.common import DOMAIN_CHOICE, build_config, config_options, domain_matrix, handles_errors
from core.similarity import component_similarity_matrices, save_similarity
from helpers.artifact_helper import staged_output


def artifact_name(domain: str, component: str, fmt: str) -> str:
    suffix = '' if component == 'combined' else f'-{component}'
    return f"similarity-{domain}{suffix}.{fmt}"


@click.command('similarity')
@config_options
@click.option('--domain', type=DOMAIN_CHOICE, default='auxiliary', show_default=True)
@click.option('--format', 'fmt', type=click.Choice(['json', 'npz']), default='json', show_default=True)
@click.option('--no-split', is_flag=True, help='use the unsplit domain matrix')
@click.option('--gamma1', type=float, default=None, help='common-rating decay')
@click.option('--gamma2', type=float, default=None, help='no-interest decay')
@click.option('--gamma3', type=float, default=None, help='rating-bias decay')
@click.option('--sigma', type=float, default=None, help='no-interest sigmoid slope')
@click.option('--base', type=float, default=None, help='rating-bias log base')
@click.option('--rho', default=None, metavar='R1,R2,R3', help='component weights')
@handles_errors
def similarity_cmd(config_path, overrides, seed, jobs, output_dir, domain, fmt, no_split, **measure):
    """Compute user similarities for one domain"""
    # measure flags act on the chosen domain, after any --set
    overrides = list(overrides) + [f"similarity.{domain}.{key}={value}"
                                   for key, value in measure.items() if value is not None]
    config = build_config(config_path, overrides, seed, jobs, output_dir)
    matrix = domain_matrix(config, domain, split=not no_split)
    matrices = component_similarity_matrices(matrix, config.similarity_for(domain), config.jobs)

    with staged_output(config.output_dir) as stage:
        for component, similarity in matrices.items():
            save_similarity(stage / artifact_name(domain, component, fmt), similarity)
    click.echo(f"domain={domain} users={matrix.n_users} pairs={matrices['combined'].n_pairs}")
