"""
File: app.py
File-Path: src/app.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    Base of the coldmap command line

Inputs:
    subcommands from commands/
    .env (COLDMAP_LOG, COLDMAP_DB_URL)

Outputs:
    the coldmap click group
"""

import click
from dotenv import load_dotenv

# load environment variables
load_dotenv()

from helpers.logging_helper import LEVELS, set_level

# import subcommands
from commands import (
    experiment_cmd,
    factorize_cmd,
    grid_cmd,
    history_cmd,
    ingest_cmd,
    run_cmd,
    similarity_cmd,
)


@click.group('coldmap')
@click.option('--log-level', type=click.Choice(sorted(LEVELS)), default=None,
              help='overrides COLDMAP_LOG')
def cli(log_level):
    """Cross-domain cold-start recommendation by latent feature mapping"""
    if log_level:
        set_level(log_level)


# register subcommands
cli.add_command(ingest_cmd)
cli.add_command(similarity_cmd)
cli.add_command(factorize_cmd)
cli.add_command(run_cmd)
cli.add_command(experiment_cmd)
cli.add_command(grid_cmd)
cli.add_command(history_cmd)


if __name__ == '__main__':
    cli()
