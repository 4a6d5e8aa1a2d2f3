"""Coupling coordination analysis for multi-system indicator panels."""

__version__ = "0.1.0"

from .coupling import (
    CouplingRecord,
    LagType,
    Stage,
    classify_stage,
    coordination_degree,
    coupling_degree,
    evaluate,
    lag_type,
    synergy_index,
)
from .ingest import IndicatorStats, MissingPolicy, PanelDataset, dataset_stats, load_panel
from .normalize import NormalizedPanel, normalize
from .pipeline import RunOptions, run_pipeline
from .scheme import (
    EffectDirection,
    EvaluationScheme,
    IndicatorSpec,
    SystemSpec,
    load_builtin_scheme,
    parse_scheme,
    serialize_scheme,
    validate_scheme,
)
from .scoring import AggregateMode, SystemScoreSeries, aggregate_scores, cdi
from .weighting import WeightMethod, WeightVector, equal_weights, fixed_weights, msd_weights
