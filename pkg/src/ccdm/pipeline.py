"""End-to-end composition: load -> normalize -> weight -> score -> couple."""

from __future__ import annotations

from dataclasses import dataclass, field

from .coupling import CouplingRecord, evaluate
from .errors import InputError
from .ingest import IndicatorStats, LoadReport, MissingPolicy, PanelDataset, dataset_stats, load_panel
from .normalize import NormalizedPanel, normalize
from .scheme import EvaluationScheme
from .scoring import SystemScoreSeries, aggregate_scores, cdi
from .weighting import WeightMethod, WeightVector, equal_weights, fixed_weights, msd_weights


@dataclass
class RunOptions:
    weight_method: WeightMethod = WeightMethod.MSD
    missing_policy: MissingPolicy = MissingPolicy.FAIL
    constant_fill: float = 0.5
    aggregate_groups: dict[str, list[str]] = field(default_factory=dict)
    precision: str = "report"
    stages: tuple[float, ...] | None = None

    def __post_init__(self):
        self.weight_method = WeightMethod(self.weight_method)
        self.missing_policy = MissingPolicy(self.missing_policy)
        if not 0.0 <= self.constant_fill <= 1.0:
            raise InputError(f"constant fill {self.constant_fill!r} outside [0, 1]")
        if self.precision not in ("report", "full"):
            raise InputError(f"precision must be report or full, got {self.precision!r}")


@dataclass
class PipelineResult:
    scheme: EvaluationScheme
    dataset: PanelDataset
    load_report: LoadReport
    stats: list[IndicatorStats]
    normalized: NormalizedPanel
    weights: list[WeightVector]
    scores: SystemScoreSeries
    """Per-entity scores followed by one synthetic entity per aggregate group."""
    records: list[CouplingRecord]


def compute_weights(method: WeightMethod, normalized: NormalizedPanel, scheme: EvaluationScheme) -> list[WeightVector]:
    if method is WeightMethod.MSD:
        return msd_weights(normalized, scheme)
    if method is WeightMethod.FIXED:
        return fixed_weights(scheme, renormalize=True)
    return equal_weights(scheme)


def run_pipeline(scheme: EvaluationScheme, csv_text: str, options: RunOptions) -> PipelineResult:
    dataset, report = load_panel(csv_text, scheme, options.missing_policy)
    for name, members in options.aggregate_groups.items():
        if name in dataset.entities:
            raise InputError(f"aggregate name {name!r} clashes with an entity id")
        unknown = [m for m in members if m not in dataset.entities]
        if unknown:
            raise InputError(f"aggregate {name!r}: unknown entities {unknown}; available: {list(dataset.entities)}")
    stats = dataset_stats(dataset)
    normalized = normalize(dataset, stats, options.constant_fill)
    weights = compute_weights(options.weight_method, normalized, scheme)
    scores = cdi(normalized, weights, scheme)
    combined = scores
    for name, members in options.aggregate_groups.items():
        combined = combined.concat(aggregate_scores(scores, members, name))
    records = evaluate(combined, scheme, options.stages)
    return PipelineResult(scheme, dataset, report, stats, normalized, weights, combined, records)
