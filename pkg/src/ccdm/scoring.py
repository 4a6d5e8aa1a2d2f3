"""Comprehensive development index (CDI) per system, entity and period."""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import ComputationError, InputError
from .normalize import NormalizedPanel
from .scheme import EvaluationScheme
from .weighting import WeightVector
from .report import fmt


class AggregateMode(enum.Enum):
    MEAN_OF_SCORES = "mean-of-scores"


@dataclass(frozen=True, eq=False)
class SystemScoreSeries:
    """Scores in [0, 1], shape ``(entities, periods, systems)``."""

    entities: tuple[str, ...]
    periods: tuple[int, ...]
    system_ids: tuple[str, ...]
    scores: np.ndarray
    weights: tuple[WeightVector, ...] = ()

    def __post_init__(self):
        scores = np.array(self.scores, dtype=float)
        expected = (len(self.entities), len(self.periods), len(self.system_ids))
        if scores.shape != expected:
            raise ComputationError(f"score cube has shape {scores.shape}, expected {expected}")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    def score(self, entity: str, period: int, system_id: str) -> float:
        return float(self.scores[
            self.entities.index(entity), self.periods.index(period), self.system_ids.index(system_id)
        ])

    def entity_series(self, entity: str) -> np.ndarray:
        """(periods, systems) matrix for one entity."""
        return self.scores[self.entities.index(entity)]

    def concat(self, other: "SystemScoreSeries") -> "SystemScoreSeries":
        """Stack the entities of ``other`` after ours (same periods and systems)."""
        if other.periods != self.periods or other.system_ids != self.system_ids:
            raise ComputationError("cannot concatenate series with different periods or systems")
        clash = set(self.entities) & set(other.entities)
        if clash:
            raise InputError(f"entity ids already present: {sorted(clash)}")
        return SystemScoreSeries(
            self.entities + other.entities,
            self.periods,
            self.system_ids,
            np.concatenate([self.scores, other.scores], axis=0),
            self.weights,
        )


def cdi(panel: NormalizedPanel, weights: list[WeightVector], scheme: EvaluationScheme) -> SystemScoreSeries:
    """Weighted sum of normalized indicators within each system."""
    if panel.indicator_ids != scheme.indicator_ids:
        raise ComputationError("normalized panel does not conform to the scheme")
    by_sys = {w.system_id: w for w in weights}
    if set(by_sys) != set(scheme.system_ids):
        raise ComputationError(
            f"weights cover systems {sorted(by_sys)}, scheme has {sorted(scheme.system_ids)}"
        )
    out = np.empty((len(panel.entities), len(panel.periods), scheme.k))
    for s, system in enumerate(scheme.systems):
        vec = by_sys[system.id]
        if set(vec.weights) != set(system.indicator_ids):
            raise ComputationError(f"weights for {system.id} do not match its indicators")
        idx = [panel.indicator_ids.index(i) for i in system.indicator_ids]
        out[:, :, s] = panel.values[:, :, idx] @ vec.as_array(system.indicator_ids)
    np.clip(out, 0.0, 1.0, out=out)
    return SystemScoreSeries(
        panel.entities, panel.periods, scheme.system_ids, out,
        tuple(by_sys[s] for s in scheme.system_ids),
    )


def aggregate_scores(
    series: SystemScoreSeries,
    entity_subset: list[str],
    label: str,
    mode: AggregateMode | str = AggregateMode.MEAN_OF_SCORES,
) -> SystemScoreSeries:
    """Collapse ``entity_subset`` into one synthetic entity called ``label``."""
    mode = AggregateMode(mode)
    if not entity_subset:
        raise InputError(f"aggregate {label!r}: empty entity subset")
    unknown = [e for e in entity_subset if e not in series.entities]
    if unknown:
        raise InputError(
            f"aggregate {label!r}: unknown entities {unknown}; available: {list(series.entities)}"
        )
    idx = [series.entities.index(e) for e in dict.fromkeys(entity_subset)]
    agg = series.scores[idx].mean(axis=0, keepdims=True)
    return SystemScoreSeries((label,), series.periods, series.system_ids, agg, series.weights)


def scores_to_csv(series: SystemScoreSeries, precision: str = "report") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["entity", "period", "system", "score"])
    for ei, e in enumerate(series.entities):
        for pi, p in enumerate(series.periods):
            for si, s in enumerate(series.system_ids):
                w.writerow([e, p, s, fmt(series.scores[ei, pi, si], precision)])
    return buf.getvalue()


def trajectories(series: SystemScoreSeries, precision: str = "report") -> list[dict]:
    """One plot-ready series per (entity, system) over the periods."""
    out = []
    for ei, e in enumerate(series.entities):
        for si, s in enumerate(series.system_ids):
            out.append({
                "entity": e,
                "system": s,
                "periods": list(series.periods),
                "scores": [json.loads(fmt(v, precision)) for v in series.scores[ei, :, si]],
            })
    return out


def trajectories_to_json(series: SystemScoreSeries, precision: str = "report") -> str:
    return json.dumps(trajectories(series, precision), indent=2) + "\n"
