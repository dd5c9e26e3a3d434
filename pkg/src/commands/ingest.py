"""
File: ingest.py
File-Path: src/commands/ingest.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    ingest command: parse a ratings CSV, filter by minimum counts and write
    a coldmap-matrix-v1 artifact

Inputs:
    ratings file, filter thresholds

Outputs:
    matrix JSON and a one-line summary
"""

import click

from commands.common import handles_errors
from dataset.ratings import build_rating_matrix, filter_min_ratings, parse_ratings_file, save_matrix
from helpers.artifact_helper import staged_file


@click.command('ingest')
@click.argument('ratings', type=click.Path(exists=True, dir_okay=False))
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), required=True,
              help='matrix artifact to write')
@click.option('--header/--no-header', default=False, help='skip the first line')
@click.option('--min-user', type=click.IntRange(min=0), default=0)
@click.option('--min-item', type=click.IntRange(min=0), default=0)
@handles_errors
def ingest_cmd(ratings, out_path, header, min_user, min_item):
    """Parse and filter a ratings file into a matrix artifact"""
    matrix = build_rating_matrix(parse_ratings_file(ratings, header=header))
    if min_user or min_item:
        matrix = filter_min_ratings(matrix, min_user, min_item)

    with staged_file(out_path) as path:
        save_matrix(path, matrix)
    click.echo(f"users={matrix.n_users} items={matrix.n_items} ratings={matrix.nnz} "
               f"density={matrix.density:.6g}")
