"""Coupling degree, synergy index, coordination degree and classifications.

For k system scores s_1..s_k::

    C = (prod(s) / sum(s)**k) ** (1/k)      in [0, 1/k]
    T = sum(alpha_i * s_i)
    D = sqrt(C * T)

C is kept in this unscaled form; ``C_rescaled = k * C`` is the [0, 1]
version used for stage classification.
"""

from __future__ import annotations

import bisect
import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ComputationError, InputError
from .report import fmt
from .scheme import ALPHA_SUM_TOL, EvaluationScheme
from .scoring import SystemScoreSeries

DEFAULT_THRESHOLDS = (0.2, 0.5, 0.8)

# display names for the lag of each system in the bundled scheme
LAG_NAMES = {
    "digital_economy": "InformationLag",
    "regional_innovation": "InnovationLag",
    "talent_employment": "TalentLag",
}


class Stage(enum.IntEnum):
    UNBALANCED = 0
    SLIGHTLY_UNBALANCED = 1
    BARELY_BALANCED = 2
    SUPERIOR_BALANCED = 3

    @property
    def label(self) -> str:
        return {
            0: "Unbalanced",
            1: "SlightlyUnbalanced",
            2: "BarelyBalanced",
            3: "SuperiorBalanced",
        }[self.value]


@dataclass(frozen=True)
class LagType:
    system_id: str
    tied: bool = False

    @property
    def label(self) -> str:
        return LAG_NAMES.get(self.system_id, f"{self.system_id}-lag")


@dataclass(frozen=True)
class CouplingRecord:
    entity: str
    period: int
    system_scores: tuple[float, ...]
    C: float
    C_rescaled: float
    T: float
    D: float
    stage_C: Stage
    stage_D: Stage
    lag: LagType


def _check_scores(scores: Sequence[float]) -> list[float]:
    s = [float(x) for x in scores]
    if len(s) < 2:
        raise ComputationError(f"coupling needs k >= 2 scores, got {len(s)}")
    for x in s:
        if not math.isfinite(x) or x < 0:
            raise ComputationError(f"scores must be finite and nonnegative, got {x!r}")
    return s


def coupling_degree(scores: Sequence[float]) -> float:
    """``(prod(s) / sum(s)**k) ** (1/k)``; 0 when every score is 0."""
    s = _check_scores(scores)
    total = math.fsum(s)
    if total == 0.0 or min(s) == 0.0:
        return 0.0
    # geometric mean over arithmetic sum, in log space: no under/overflow of
    # prod(s) or sum(s)**k, and fsum makes the result order independent
    c = math.exp(math.fsum(math.log(x) for x in s) / len(s) - math.log(total))
    # AM-GM bound; rounding can overshoot it by an ulp on equal scores
    return min(c, 1.0 / len(s))


def synergy_index(scores: Sequence[float], alphas: Sequence[float]) -> float:
    if len(scores) != len(alphas):
        raise ComputationError(f"{len(scores)} scores but {len(alphas)} alphas")
    if any(a < 0 for a in alphas) or abs(math.fsum(alphas) - 1.0) > ALPHA_SUM_TOL:
        raise ComputationError(f"alphas must be nonnegative and sum to 1, got {list(alphas)}")
    return math.fsum(a * x for a, x in zip(alphas, scores))


def coordination_degree(C: float, T: float) -> float:
    if C < 0 or T < 0:
        raise ComputationError(f"C and T must be nonnegative (C={C!r}, T={T!r})")
    return math.sqrt(C * T)


def classify_stage(value: float, thresholds: Sequence[float] = DEFAULT_THRESHOLDS) -> Stage:
    """Right-closed intervals: (0, t1], (t1, t2], (t2, t3], (t3, 1]; 0 is the lowest stage."""
    if len(thresholds) != len(Stage) - 1:
        raise InputError(f"need {len(Stage) - 1} stage thresholds, got {len(thresholds)}")
    if not all(0.0 < t < 1.0 for t in thresholds) or any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise InputError(f"stage thresholds must be strictly increasing inside (0, 1): {list(thresholds)}")
    if not (0.0 <= value <= 1.0):
        raise ComputationError(f"value {value!r} outside [0, 1]")
    return Stage(bisect.bisect_left(list(thresholds), value))


def lag_type(scores: Mapping[str, float] | Sequence[tuple[str, float]], epsilon: float = 1e-9) -> LagType:
    """The system with the smallest score.

    Scores within ``epsilon`` of the minimum count as tied; the first of
    them in declaration order wins and ``tied`` is set.
    """
    items = list(scores.items()) if isinstance(scores, Mapping) else list(scores)
    if not items:
        raise ComputationError("lag_type needs at least one score")
    low = min(v for _, v in items)
    near = [sid for sid, v in items if v - low <= epsilon]
    return LagType(near[0], tied=len(near) > 1)


def evaluate(
    series: SystemScoreSeries,
    scheme: EvaluationScheme,
    thresholds: Sequence[float] | None = None,
) -> list[CouplingRecord]:
    """One :class:`CouplingRecord` per (entity, period), entity-major."""
    if series.system_ids != scheme.system_ids:
        raise ComputationError(
            f"series systems {list(series.system_ids)} do not match scheme {list(scheme.system_ids)}"
        )
    if thresholds is None:
        thresholds = scheme.stage_thresholds or DEFAULT_THRESHOLDS
    alphas = scheme.effective_alphas()
    k = scheme.k
    records = []
    for ei, entity in enumerate(series.entities):
        for pi, period in enumerate(series.periods):
            s = tuple(float(x) for x in series.scores[ei, pi])
            C = coupling_degree(s)
            T = synergy_index(s, alphas)
            D = coordination_degree(C, T)
            C_rescaled = min(k * C, 1.0)
            records.append(CouplingRecord(
                entity=entity,
                period=period,
                system_scores=s,
                C=C,
                C_rescaled=C_rescaled,
                T=T,
                D=D,
                stage_C=classify_stage(C_rescaled, thresholds),
                stage_D=classify_stage(min(D, 1.0), thresholds),
                lag=lag_type(list(zip(series.system_ids, s))),
            ))
    return records


COUPLING_HEADER = ["entity", "period", "C", "C_rescaled", "T", "D", "stage_C", "stage_D", "lag", "lag_tied"]


def coupling_to_csv(records: list[CouplingRecord], precision: str = "report") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COUPLING_HEADER)
    for r in records:
        w.writerow([
            r.entity, r.period,
            fmt(r.C, precision), fmt(r.C_rescaled, precision), fmt(r.T, precision), fmt(r.D, precision),
            r.stage_C.label, r.stage_D.label, r.lag.label, str(r.lag.tied).lower(),
        ])
    return buf.getvalue()
