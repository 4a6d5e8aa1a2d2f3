"""Direction-aware min-max standardization."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ComputationError, InputError
from .ingest import IndicatorStats, PanelDataset
from .scheme import EffectDirection


@dataclass(frozen=True, eq=False)
class NormalizedPanel:
    """Standardized values in [0, 1] on the same axes as ``source``.

    ``constant_indicators`` lists indicators whose pooled range was zero
    and which were therefore set to ``constant_fill``.
    """

    source: PanelDataset
    stats: tuple[IndicatorStats, ...]
    values: np.ndarray
    constant_fill: float = 0.5
    constant_indicators: tuple[str, ...] = field(default=())

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def entities(self) -> tuple[str, ...]:
        return self.source.entities

    @property
    def periods(self) -> tuple[int, ...]:
        return self.source.periods

    @property
    def indicator_ids(self) -> tuple[str, ...]:
        return self.source.indicator_ids

    @property
    def scheme(self):
        return self.source.scheme

    def column(self, indicator_id: str) -> np.ndarray:
        return self.values[:, :, self.indicator_ids.index(indicator_id)]


def normalize(
    dataset: PanelDataset,
    stats: list[IndicatorStats],
    constant_fill: float = 0.5,
) -> NormalizedPanel:
    """Map every raw column onto [0, 1].

    Positive indicators: ``(x - min) / (max - min)``.
    Negative indicators: ``(max - x) / (max - min)``.
    """
    if not 0.0 <= constant_fill <= 1.0:
        raise InputError(f"constant_fill {constant_fill!r} outside [0, 1]")
    by_id = {s.indicator_id: s for s in stats}
    if set(by_id) != set(dataset.indicator_ids) or len(stats) != len(by_id):
        missing = sorted(set(dataset.indicator_ids) - set(by_id))
        extra = sorted(set(by_id) - set(dataset.indicator_ids))
        raise ComputationError(f"stats do not match indicators (missing {missing}, extra {extra})")

    out = np.empty_like(dataset.values)
    constant: list[str] = []
    ordered: list[IndicatorStats] = []
    for i, ind in enumerate(dataset.scheme.indicators):
        s = by_id[ind.id]
        ordered.append(s)
        col = dataset.values[:, :, i]
        if col.min() < s.min or col.max() > s.max:
            raise ComputationError(f"stats for {ind.id} were not computed from this dataset")
        span = s.max - s.min
        if span == 0.0:
            out[:, :, i] = constant_fill
            constant.append(ind.id)
        elif ind.direction is EffectDirection.POSITIVE:
            out[:, :, i] = (col - s.min) / span
        else:
            out[:, :, i] = (s.max - col) / span
    # guard against 1 + ulp from rounding
    np.clip(out, 0.0, 1.0, out=out)
    return NormalizedPanel(dataset, tuple(ordered), out, constant_fill, tuple(constant))


def normalized_to_csv(panel: NormalizedPanel) -> str:
    """Long-format dump with raw and normalized values, 12 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["entity", "period", "indicator", "value", "value_normalized"])
    raw = panel.source.values
    for ei, e in enumerate(panel.entities):
        for pi, p in enumerate(panel.periods):
            for di, d in enumerate(panel.indicator_ids):
                w.writerow([e, p, d, f"{raw[ei, pi, di]:.12g}", f"{panel.values[ei, pi, di]:.12g}"])
    return buf.getvalue()
