import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccdm.errors import ComputationError, InputError
from ccdm.ingest import PanelDataset, dataset_stats
from ccdm.normalize import NormalizedPanel, normalize
from ccdm.scheme import EvaluationScheme, IndicatorSpec, SystemSpec
from ccdm.scoring import (
    SystemScoreSeries,
    aggregate_scores,
    cdi,
    scores_to_csv,
    trajectories,
)
from ccdm.weighting import WeightMethod, WeightVector, equal_weights, msd_weights
from helpers import random_panel, random_scheme


def _scheme():
    a = SystemSpec("a", "A", (IndicatorSpec("p", "p", "a"), IndicatorSpec("q", "q", "a")))
    b = SystemSpec("b", "B", (IndicatorSpec("r", "r", "b"),))
    return EvaluationScheme((a, b))


def _fixed_panel(values):
    scheme = _scheme()
    values = np.asarray(values, dtype=float).reshape(1, 1, 3)
    ds = PanelDataset(("e",), (2020,), scheme.indicator_ids, values, scheme)
    return NormalizedPanel(ds, tuple(dataset_stats(ds)), values), scheme


def _weights():
    return [
        WeightVector("a", {"p": 0.4, "q": 0.6}, WeightMethod.FIXED),
        WeightVector("b", {"r": 1.0}, WeightMethod.FIXED),
    ]


@pytest.mark.parametrize("fill", [0.0, 1.0])
def test_extremes(fill):
    panel, scheme = _fixed_panel([fill] * 3)
    series = cdi(panel, _weights(), scheme)
    assert series.scores.ravel().tolist() == [fill, fill]


def test_weighted_sum():
    panel, scheme = _fixed_panel([0.5, 1.0, 0.3])
    series = cdi(panel, _weights(), scheme)
    assert series.score("e", 2020, "a") == pytest.approx(0.8, abs=1e-15)
    assert series.score("e", 2020, "b") == pytest.approx(0.3, abs=1e-15)


def test_weight_mismatch():
    panel, scheme = _fixed_panel([0.5, 1.0, 0.3])
    with pytest.raises(ComputationError):
        cdi(panel, _weights()[:1], scheme)
    bad = [WeightVector("a", {"p": 1.0}, WeightMethod.FIXED), _weights()[1]]
    with pytest.raises(ComputationError, match="do not match"):
        cdi(panel, bad, scheme)


def test_bounds_and_monotone(rng):
    scheme = random_scheme(rng, n_indicators=(2, 5))
    ds = random_panel(rng, scheme, n_entities=4, n_periods=6)
    panel = normalize(ds, dataset_stats(ds))
    weights = msd_weights(panel, scheme)
    series = cdi(panel, weights, scheme)
    for s, system in enumerate(scheme.systems):
        idx = [scheme.indicator_ids.index(i) for i in system.indicator_ids]
        block = panel.values[:, :, idx]
        assert np.all(series.scores[:, :, s] >= block.min(axis=2) - 1e-15)
        assert np.all(series.scores[:, :, s] <= block.max(axis=2) + 1e-15)
    # bump one normalized value and check no score drops
    bumped = panel.values.copy()
    bumped[0, 0, 0] = min(1.0, bumped[0, 0, 0] + 0.3)
    series2 = cdi(NormalizedPanel(ds, panel.stats, bumped), weights, scheme)
    assert np.all(series2.scores >= series.scores)


def _series(rng, n_entities=4, n_periods=8, k=3):
    return SystemScoreSeries(
        tuple(f"c{i}" for i in range(n_entities)),
        tuple(range(2015, 2015 + n_periods)),
        tuple(f"s{j}" for j in range(k)),
        rng.uniform(size=(n_entities, n_periods, k)),
    )


def test_aggregate_single_entity_identity(rng):
    series = _series(rng)
    agg = aggregate_scores(series, ["c2"], "circle")
    assert agg.entities == ("circle",)
    assert np.array_equal(agg.scores[0], series.entity_series("c2"))


def test_aggregate_two_point_mean():
    series = SystemScoreSeries(("a", "b"), (2020,), ("s",), np.array([[[0.2]], [[0.4]]]))
    assert aggregate_scores(series, ["a", "b"], "g").scores.item() == pytest.approx(0.3, abs=1e-15)


def test_aggregate_matches_brute_force(rng):
    series = _series(rng)
    agg = aggregate_scores(series, list(series.entities), "circle")
    for pi, p in enumerate(series.periods):
        for si, s in enumerate(series.system_ids):
            vals = [series.score(e, p, s) for e in series.entities]
            assert agg.score("circle", p, s) == pytest.approx(sum(vals) / len(vals), abs=1e-15)


def test_aggregate_identical_entities(rng):
    base = rng.uniform(size=(1, 5, 3))
    series = SystemScoreSeries(("a", "b", "c"), tuple(range(5)), ("x", "y", "z"), np.repeat(base, 3, axis=0))
    agg = aggregate_scores(series, ["a", "b", "c"], "g")
    assert np.allclose(agg.scores, base, atol=1e-15, rtol=0)


def test_aggregate_errors(rng):
    series = _series(rng)
    with pytest.raises(InputError, match="empty"):
        aggregate_scores(series, [], "g")
    with pytest.raises(InputError, match="unknown entities"):
        aggregate_scores(series, ["nowhere"], "g")


def test_concat_rejects_clash(rng):
    series = _series(rng)
    with pytest.raises(InputError):
        series.concat(aggregate_scores(series, ["c0"], "c1"))


def test_scores_csv_rounding():
    series = SystemScoreSeries(("a",), (2020, 2021), ("s",), np.array([[[0.0125], [0.99951]]]))
    lines = scores_to_csv(series).splitlines()
    assert lines == ["entity,period,system,score", "a,2020,s,0.012", "a,2021,s,1.000"]
    full = scores_to_csv(series, "full").splitlines()
    assert full[1] == "a,2020,s,0.0125"


def test_trajectories(rng):
    series = _series(rng, n_entities=2, n_periods=3, k=2)
    traj = trajectories(series, "full")
    assert len(traj) == 4
    assert traj[1]["entity"] == "c0" and traj[1]["system"] == "s1"
    assert traj[1]["periods"] == [2015, 2016, 2017]
    assert traj[1]["scores"] == series.scores[0, :, 1].tolist()
    json.dumps(traj)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_scores_in_unit_interval(seed):
    rng = np.random.default_rng(seed)
    scheme = random_scheme(rng)
    ds = random_panel(rng, scheme, n_entities=3, n_periods=4)
    panel = normalize(ds, dataset_stats(ds))
    for weights in (msd_weights(panel, scheme), equal_weights(scheme)):
        s = cdi(panel, weights, scheme).scores
        assert s.min() >= 0.0 and s.max() <= 1.0
