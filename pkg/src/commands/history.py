"""
File: history.py
File-Path: src/commands/history.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    history command: lists runs stored in the registry

Inputs:
    registry URL (COLDMAP_DB_URL or --db-url)

Outputs:
    table of recent runs
"""

import click

from commands.common import handles_errors
from db.server import get_session, init_database
from evaluation.reports import list_runs


@click.command('history')
@click.option('--limit', type=click.IntRange(min=1), default=20, show_default=True)
@click.option('--db-url', default=None, help='overrides COLDMAP_DB_URL')
@handles_errors
def history_cmd(limit, db_url):
    """List recorded runs, newest first"""
    if not init_database(db_url):
        raise click.ClickException("run registry is unavailable")
    session = get_session()
    try:
        frame = list_runs(session, limit)
    finally:
        session.close()
    if frame.empty:
        click.echo("no recorded runs")
        return
    click.echo(frame.to_string(index=False))
