"""
File: metrics.py
File-Path: src/evaluation/metrics.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    pooled per-rating error metrics and the report record emitted per
    (protocol point, method)

Inputs:
    predicted and true ratings

Outputs:
    RMSE, MAE and MetricReport objects
"""

from dataclasses import asdict, dataclass
from typing import Tuple

import numpy as np

from helpers.errors import MetricError


def _pairs(pred, truth) -> Tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64).ravel()
    truth = np.asarray(truth, dtype=np.float64).ravel()
    if pred.shape != truth.shape:
        raise MetricError(f"{pred.size} predictions but {truth.size} true ratings")
    if pred.size == 0:
        raise MetricError("no predictions to score")
    return pred, truth


def rmse(pred, truth) -> float:
    pred, truth = _pairs(pred, truth)
    return float(np.sqrt(np.mean((pred - truth) ** 2)))


def mae(pred, truth) -> float:
    pred, truth = _pairs(pred, truth)
    return float(np.mean(np.abs(pred - truth)))


@dataclass(frozen=True)
class MetricReport:
    protocol: str
    point: str
    method: str
    rmse: float
    mae: float
    n_predictions: int
    split: str
    config_hash: str
    wall_time: float = 0.0

    def __post_init__(self):
        if self.rmse < 0 or self.mae < 0:
            raise MetricError("metrics must be nonnegative")

    def to_dict(self, include_wall_time: bool = True) -> dict:
        payload = asdict(self)
        if not include_wall_time:
            payload.pop('wall_time')
        return payload
