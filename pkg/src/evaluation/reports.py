"""
File: reports.py
File-Path: src/evaluation/reports.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    results emission: results.json (source of truth, no timings),
    results.csv mirror, predictions.csv, the effective config echo and the
    optional run registry

Inputs:
    MetricReport sequences, prediction frames, ExperimentConfig

Outputs:
    files in a (staged) output directory and registry rows
"""

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd
from sqlalchemy import select

from evaluation.metrics import MetricReport
from helpers.config_helper import canonical_json, config_hash
from helpers.errors import ArtifactError
from helpers.logging_helper import log_stage
from helpers.random_helper import PRNG_ALGORITHM

RESULTS_JSON = 'results.json'
RESULTS_CSV = 'results.csv'
PREDICTIONS_CSV = 'predictions.csv'
CONFIG_JSON = 'config.json'

REPORT_COLUMNS = ['protocol', 'point', 'method', 'rmse', 'mae', 'n_predictions', 'split',
                  'config_hash', 'wall_time']


def write_config_echo(directory, snapshot: dict) -> str:
    """writes config.json; returns the hash recorded in every report"""
    path = Path(directory) / CONFIG_JSON
    path.write_text(json.dumps(snapshot, sort_keys=True, indent=2) + '\n', encoding='utf-8')
    return config_hash(snapshot)


def write_results_json(path, reports: Sequence[MetricReport]):
    """array of reports; wall_time is left out so reruns are byte-identical"""
    payload = [report.to_dict(include_wall_time=False) for report in reports]
    Path(path).write_text(json.dumps(payload, indent=2) + '\n', encoding='utf-8')


def reports_frame(reports: Sequence[MetricReport]) -> pd.DataFrame:
    return pd.DataFrame([report.to_dict() for report in reports], columns=REPORT_COLUMNS)


def write_results_csv(path, reports: Sequence[MetricReport]):
    reports_frame(reports).to_csv(path, index=False)


def write_predictions_csv(path, predictions: Optional[pd.DataFrame]):
    if predictions is None:
        return
    predictions.to_csv(path, index=False, float_format='%.10g')


def read_results_json(path) -> List[MetricReport]:
    try:
        payload = json.loads(Path(path).read_text(encoding='utf-8'))
        return [MetricReport(**entry) for entry in payload]
    except (OSError, ValueError, TypeError) as error:
        raise ArtifactError(f"cannot read results from {path}: {error}") from None


def emit_results(directory, reports: Sequence[MetricReport], snapshot: dict,
                 predictions: Optional[pd.DataFrame] = None):
    """every results artifact of one invocation into directory"""
    directory = Path(directory)
    write_config_echo(directory, snapshot)
    write_results_json(directory / RESULTS_JSON, reports)
    write_results_csv(directory / RESULTS_CSV, reports)
    write_predictions_csv(directory / PREDICTIONS_CSV, predictions)
    log_stage("results emitted", component='eval', reports=len(reports),
              predictions=0 if predictions is None else len(predictions))


# -- run registry ----------------------------------------------------------------

def record_run(session, command: str, snapshot: dict, reports: Sequence[MetricReport],
               output_dir: Optional[str] = None):
    """stores one ExperimentRuns row and its MetricReports rows"""
    from db.schema import ExperimentRun, MetricRecord

    run = ExperimentRun(
        ConfigHash=config_hash(snapshot),
        Command=command,
        Protocol=reports[0].protocol if reports else None,
        Snapshot=canonical_json(snapshot),
        Prng=PRNG_ALGORITHM,
        OutputDir=output_dir,
        CreatedAt=datetime.now(timezone.utc).replace(tzinfo=None),
    )
    run.reports = [MetricRecord(Protocol=r.protocol, Point=r.point, Method=r.method, Rmse=r.rmse,
                                Mae=r.mae, NPredictions=r.n_predictions, Split=r.split,
                                WallTime=r.wall_time)
                   for r in reports]
    try:
        session.add(run)
        session.commit()
    except Exception:
        session.rollback()
        raise
    log_stage("run recorded", component='registry', run_id=run.RunID, config_hash=run.ConfigHash)
    return run


def list_runs(session, limit: int = 20) -> pd.DataFrame:
    """most recent runs first with their best (lowest RMSE) report"""
    from db.schema import ExperimentRun

    runs = session.execute(
        select(ExperimentRun).order_by(ExperimentRun.RunID.desc()).limit(limit)).scalars().all()
    rows = []
    for run in runs:
        best = min(run.reports, key=lambda r: r.Rmse, default=None)
        rows.append({
            'run_id': run.RunID,
            'created_at': run.CreatedAt.isoformat(timespec='seconds'),
            'command': run.Command,
            'config_hash': run.ConfigHash,
            'reports': len(run.reports),
            'best_method': best.Method if best else '',
            'best_rmse': best.Rmse if best else float('nan'),
        })
    return pd.DataFrame(rows, columns=['run_id', 'created_at', 'command', 'config_hash', 'reports',
                                       'best_method', 'best_rmse'])
