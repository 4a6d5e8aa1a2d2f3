"""Indicator weights per system: mean-squared-deviation, fixed, or equal."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ComputationError, InputError
from .normalize import NormalizedPanel
from .scheme import WEIGHT_SUM_TOL, EvaluationScheme

SUM_TOL = 1e-9


class WeightMethod(enum.Enum):
    MSD = "msd"
    FIXED = "fixed"
    EQUAL = "equal"


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative weights over one system's indicators, summing to 1.

    ``adjusted_from`` holds the original sum when fixed weights were
    rescaled, otherwise ``None``.
    """

    system_id: str
    weights: Mapping[str, float]
    method: WeightMethod
    adjusted_from: float | None = None

    def __post_init__(self):
        ws = list(self.weights.values())
        if not ws:
            raise ComputationError(f"system {self.system_id}: empty weight vector")
        if any(not math.isfinite(w) or w < 0 for w in ws):
            raise ComputationError(f"system {self.system_id}: weights must be finite and nonnegative")
        total = math.fsum(ws)
        if abs(total - 1.0) > SUM_TOL:
            raise ComputationError(f"system {self.system_id}: weights sum {total!r} ≠ 1")

    __hash__ = None

    def __getitem__(self, indicator_id: str) -> float:
        return self.weights[indicator_id]

    def as_array(self, indicator_ids) -> np.ndarray:
        return np.array([self.weights[i] for i in indicator_ids], dtype=float)


def msd_weights(panel: NormalizedPanel, scheme: EvaluationScheme) -> list[WeightVector]:
    """Weight each indicator by the population std of its normalized column.

    The std pools every (entity, period) cell; weights are then divided by
    the system total.
    """
    if panel.indicator_ids != scheme.indicator_ids:
        raise ComputationError("normalized panel does not conform to the scheme")
    out = []
    for system in scheme.systems:
        devs = np.array([panel.column(ind.id).std() for ind in system.indicators])
        total = devs.sum()
        if total == 0.0:
            raise ComputationError(
                f"system {system.id}: every indicator has zero deviation, MSD weights undefined"
            )
        w = devs / total
        out.append(WeightVector(system.id, dict(zip(system.indicator_ids, w.tolist())), WeightMethod.MSD))
    return out


def fixed_weights(scheme: EvaluationScheme, renormalize: bool = False) -> list[WeightVector]:
    """Use the scheme's fixed weights.

    A system whose weights sum within 1e-6 of one is accepted (and divided
    by its sum so the stored vector sums to one within 1e-9). Otherwise it
    is rescaled when ``renormalize`` is true, or rejected.
    """
    out = []
    for system in scheme.systems:
        missing = [ind.id for ind in system.indicators if ind.fixed_weight is None]
        if missing:
            raise InputError(f"system {system.id}: no fixed weight for {', '.join(missing)}")
        ws = [ind.fixed_weight for ind in system.indicators]
        total = math.fsum(ws)
        adjusted = scheme.renormalized.get(system.id)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            if not renormalize or total <= 0:
                raise InputError(f"system {system.id}: fixed weights sum {total:.3f} ≠ 1")
            adjusted = total
        vec = {ind.id: w / total for ind, w in zip(system.indicators, ws)}
        out.append(WeightVector(system.id, vec, WeightMethod.FIXED, adjusted))
    return out


def equal_weights(scheme: EvaluationScheme) -> list[WeightVector]:
    out = []
    for system in scheme.systems:
        m = len(system.indicators)
        out.append(WeightVector(system.id, {i: 1.0 / m for i in system.indicator_ids}, WeightMethod.EQUAL))
    return out


def weights_to_csv(weights: list[WeightVector]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["system", "indicator", "weight", "method"])
    for vec in weights:
        for ind, value in vec.weights.items():
            w.writerow([vec.system_id, ind, f"{value:.6f}", vec.method.value])
    return buf.getvalue()
