"""Panel loading and pooled indicator statistics.

Input is long-format CSV with header ``entity,period,indicator,value``.
An empty ``value`` field counts as a missing observation; how gaps are
resolved is chosen by :class:`MissingPolicy`.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PanelError
from .scheme import EvaluationScheme

HEADER = ("entity", "period", "indicator", "value")


class MissingPolicy(enum.Enum):
    FAIL = "fail"
    INTERPOLATE = "interpolate"
    DROP_ENTITY = "drop-entity"


@dataclass(frozen=True, eq=False)
class PanelDataset:
    """Complete (entity, period, indicator) cube of raw values.

    ``values`` has shape ``(len(entities), len(periods), len(indicator_ids))``
    and is read-only. Indicator order follows the scheme.
    """

    entities: tuple[str, ...]
    periods: tuple[int, ...]
    indicator_ids: tuple[str, ...]
    values: np.ndarray
    scheme: EvaluationScheme

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        expected = (len(self.entities), len(self.periods), len(self.indicator_ids))
        if values.shape != expected:
            raise PanelError(f"value cube has shape {values.shape}, expected {expected}")
        if not np.all(np.isfinite(values)):
            raise PanelError("panel contains non-finite values")
        if len(set(self.entities)) != len(self.entities):
            raise PanelError("entity ids must be unique")
        if any(b <= a for a, b in zip(self.periods, self.periods[1:])):
            raise PanelError("periods must be strictly increasing")
        if tuple(self.indicator_ids) != self.scheme.indicator_ids:
            raise PanelError("indicator axis does not match the scheme")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "periods", tuple(int(p) for p in self.periods))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    def value(self, entity: str, period: int, indicator_id: str) -> float:
        return float(self.values[
            self.entities.index(entity),
            self.periods.index(period),
            self.indicator_ids.index(indicator_id),
        ])

    def column(self, indicator_id: str) -> np.ndarray:
        """All cells of one indicator as an (entity, period) matrix."""
        return self.values[:, :, self.indicator_ids.index(indicator_id)]

    def __eq__(self, other):
        if not isinstance(other, PanelDataset):
            return NotImplemented
        return (
            self.entities == other.entities
            and self.periods == other.periods
            and self.indicator_ids == other.indicator_ids
            and self.scheme == other.scheme
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass
class LoadReport:
    filled: list[dict] = field(default_factory=list)
    dropped_entities: list[str] = field(default_factory=list)
    row_count: int = 0

    def to_dict(self) -> dict:
        return {"filled": self.filled, "dropped_entities": self.dropped_entities, "row_count": self.row_count}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _fill_series(periods: list[int], series: np.ndarray) -> np.ndarray:
    """Linear interpolation inside, nearest observed value at the ends."""
    known = ~np.isnan(series)
    x = np.asarray(periods, dtype=float)
    # np.interp clamps outside the observed range, which is the nearest-value rule
    return np.interp(x, x[known], series[known])


def load_panel(
    csv_text: str,
    scheme: EvaluationScheme,
    missing_policy: MissingPolicy | str = MissingPolicy.FAIL,
) -> tuple[PanelDataset, LoadReport]:
    """Parse long-format CSV into a complete :class:`PanelDataset`.

    Entities are sorted and periods ascending, so row order in the file
    never affects the result. Returns the dataset and a load report.
    """
    policy = MissingPolicy(missing_policy)
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise PanelError("empty CSV: header entity,period,indicator,value required") from None
    header = [h.strip().lstrip("﻿") for h in header]
    if tuple(header) != HEADER:
        raise PanelError(f"bad header {header!r}; expected {','.join(HEADER)}")

    known = set(scheme.indicator_ids)
    cells: dict[tuple[str, int, str], float] = {}
    rows = 0
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise PanelError(f"line {lineno}: expected 4 fields, got {len(row)}")
        entity, period_s, indicator, value_s = (c.strip() for c in row)
        rows += 1
        if not entity:
            raise PanelError(f"line {lineno}: empty entity id")
        if indicator not in known:
            raise PanelError(f"line {lineno}: unknown indicator id {indicator!r}")
        try:
            period = int(period_s)
        except ValueError:
            raise PanelError(f"line {lineno}: period {period_s!r} is not an integer") from None
        key = (entity, period, indicator)
        if key in cells:
            raise PanelError(f"line {lineno}: duplicate row for {entity}/{period}/{indicator}")
        if value_s == "":
            cells[key] = math.nan
            continue
        try:
            value = float(value_s)
        except ValueError:
            raise PanelError(f"line {lineno}: non-numeric value {value_s!r}") from None
        if not math.isfinite(value):
            raise PanelError(f"line {lineno}: non-numeric value {value_s!r}")
        cells[key] = value

    if not cells:
        raise PanelError("CSV has no observations")

    entities = sorted({e for e, _, _ in cells})
    periods = sorted({p for _, p, _ in cells})
    ind_ids = scheme.indicator_ids
    cube = np.full((len(entities), len(periods), len(ind_ids)), np.nan)
    e_ix = {e: i for i, e in enumerate(entities)}
    p_ix = {p: i for i, p in enumerate(periods)}
    i_ix = {d: i for i, d in enumerate(ind_ids)}
    for (e, p, d), v in cells.items():
        cube[e_ix[e], p_ix[p], i_ix[d]] = v

    report = LoadReport(row_count=rows)
    gaps = np.isnan(cube)
    if gaps.any():
        if policy is MissingPolicy.FAIL:
            e, p, d = (int(x) for x in np.argwhere(gaps)[0])
            raise PanelError(
                f"{int(gaps.sum())} missing cell(s), first at "
                f"{entities[e]}/{periods[p]}/{ind_ids[d]} (missing policy: fail)"
            )
        if policy is MissingPolicy.DROP_ENTITY:
            keep = ~gaps.any(axis=(1, 2))
            report.dropped_entities = [e for e, k in zip(entities, keep) if not k]
            if not keep.any():
                raise PanelError("every entity has gaps; nothing left after drop-entity")
            entities = [e for e, k in zip(entities, keep) if k]
            cube = cube[keep]
        else:
            for ei, entity in enumerate(entities):
                for di, ind in enumerate(ind_ids):
                    series = cube[ei, :, di]
                    hole = np.isnan(series)
                    if not hole.any():
                        continue
                    if hole.all():
                        raise PanelError(f"no observations for {entity}/{ind}; cannot interpolate")
                    filled = _fill_series(periods, series)
                    for pi in np.flatnonzero(hole):
                        report.filled.append({
                            "entity": entity,
                            "period": periods[pi],
                            "indicator": ind,
                            "value": float(filled[pi]),
                        })
                    cube[ei, :, di] = np.where(hole, filled, series)

    dataset = PanelDataset(tuple(entities), tuple(periods), ind_ids, cube, scheme)
    return dataset, report


def panel_to_csv(dataset: PanelDataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for ei, e in enumerate(dataset.entities):
        for pi, p in enumerate(dataset.periods):
            for di, d in enumerate(dataset.indicator_ids):
                w.writerow([e, p, d, repr(float(dataset.values[ei, pi, di]))])
    return buf.getvalue()


@dataclass(frozen=True)
class IndicatorStats:
    indicator_id: str
    min: float
    max: float
    mean: float
    population_std: float


def _column_stats(indicator_id: str, column: np.ndarray) -> IndicatorStats:
    flat = column.ravel()
    lo, hi = float(flat.min()), float(flat.max())
    if lo == hi:
        return IndicatorStats(indicator_id, lo, hi, lo, 0.0)
    mean = min(max(float(flat.mean()), lo), hi)
    # std of the range-scaled column, so squaring tiny deviations cannot underflow
    span = hi - lo
    std = span * float(((flat - lo) / span).std())
    return IndicatorStats(indicator_id, lo, hi, mean, std if std > 0 else math.ulp(0.0))


def dataset_stats(dataset: PanelDataset) -> list[IndicatorStats]:
    """Min, max, mean and population std per indicator, pooled over all cells."""
    return [_column_stats(d, dataset.values[:, :, i]) for i, d in enumerate(dataset.indicator_ids)]
