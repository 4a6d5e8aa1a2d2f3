import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccdm.errors import ComputationError, InputError
from ccdm.ingest import IndicatorStats, PanelDataset, dataset_stats
from ccdm.normalize import normalize, normalized_to_csv
from ccdm.scheme import EffectDirection, EvaluationScheme, IndicatorSpec, SystemSpec
from helpers import as_lists, random_panel, random_scheme
from oracle import brute_normalize


def _scheme(direction=EffectDirection.POSITIVE):
    a = SystemSpec("a", "A", (IndicatorSpec("x", "x", "a", direction=direction),))
    b = SystemSpec("b", "B", (IndicatorSpec("y", "y", "b"),))
    return EvaluationScheme((a, b))


def _panel(xs, direction=EffectDirection.POSITIVE):
    scheme = _scheme(direction)
    values = np.array([[[x, float(i)] for i, x in enumerate(xs)]])
    return PanelDataset(("e",), tuple(range(len(xs))), scheme.indicator_ids, values, scheme)


def test_positive_endpoints():
    ds = _panel([3.0, 7.0, 11.0])
    out = normalize(ds, dataset_stats(ds))
    assert out.column("x")[0].tolist() == [0.0, 0.5, 1.0]


def test_negative_endpoints(table1_scheme, rng):
    ds = random_panel(rng, table1_scheme)
    out = normalize(ds, dataset_stats(ds))
    raw = ds.column("fdi_tertiary_projects")
    norm = out.column("fdi_tertiary_projects")
    assert norm[raw == raw.min()].tolist() == [1.0]
    assert norm[raw == raw.max()].tolist() == [0.0]


def test_positive_interior_value():
    ds = _panel([2.0, 4.0, 10.0])
    assert normalize(ds, dataset_stats(ds)).column("x")[0, 1] == 0.25


def test_constant_column_filled_and_flagged():
    ds = _panel([5.0, 5.0, 5.0])
    out = normalize(ds, dataset_stats(ds))
    assert out.column("x").tolist() == [[0.5, 0.5, 0.5]]
    assert out.constant_indicators == ("x",)
    out = normalize(ds, dataset_stats(ds), constant_fill=0.0)
    assert out.column("x").tolist() == [[0.0, 0.0, 0.0]]


def test_constant_fill_range():
    ds = _panel([1.0, 2.0])
    with pytest.raises(InputError):
        normalize(ds, dataset_stats(ds), constant_fill=1.5)


def test_stats_mismatch():
    ds = _panel([1.0, 2.0])
    stats = dataset_stats(ds)
    with pytest.raises(ComputationError, match="missing"):
        normalize(ds, stats[:1])
    foreign = [IndicatorStats("x", 1.5, 1.8, 1.6, 0.1), stats[1]]
    with pytest.raises(ComputationError, match="not computed from this dataset"):
        normalize(ds, foreign)


def test_matches_oracle(rng):
    scheme = random_scheme(rng, n_systems=3, n_indicators=(2, 6), neg_prob=0.5)
    ds = random_panel(rng, scheme, n_entities=5, n_periods=7)
    out = normalize(ds, dataset_stats(ds))
    dirs = [i.direction.value for i in scheme.indicators]
    expected = np.array(brute_normalize(as_lists(ds.values), dirs))
    assert np.max(np.abs(out.values - expected)) <= 1e-12
    assert out.values.min() >= 0.0 and out.values.max() <= 1.0


@given(
    a=st.floats(1e-3, 1e3),
    offset=st.floats(-1e3, 1e3),
    seed=st.integers(0, 2**32 - 1),
)
@settings(max_examples=60, deadline=None)
def test_affine_invariance(a, offset, seed):
    # the offset is tied to the scale: rounding in a*x + b grows with |b| / (a * range)
    b = a * offset
    rng = np.random.default_rng(seed)
    scheme = random_scheme(rng, neg_prob=0.5)
    ds = random_panel(rng, scheme, n_entities=3, n_periods=5)
    moved = PanelDataset(ds.entities, ds.periods, ds.indicator_ids, a * ds.values + b, scheme)
    n1 = normalize(ds, dataset_stats(ds)).values
    n2 = normalize(moved, dataset_stats(moved)).values
    assert np.max(np.abs(n1 - n2)) <= 1e-12


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=12))
@settings(max_examples=100)
def test_direction_duality_and_monotonicity(xs):
    pos = normalize(p := _panel(xs), dataset_stats(p)).column("x")[0]
    neg = normalize(n := _panel(xs, EffectDirection.NEGATIVE), dataset_stats(n)).column("x")[0]
    if min(xs) < max(xs):
        assert np.allclose(neg, 1.0 - pos, atol=1e-12, rtol=0)
        for i in range(len(xs)):
            for j in range(len(xs)):
                if xs[i] < xs[j]:
                    assert pos[i] <= pos[j]


def test_strict_monotonicity():
    xs = [0.0, 1.0, 1.5, 2.0, 9.0]
    pos = normalize(p := _panel(xs), dataset_stats(p)).column("x")[0]
    assert np.all(np.diff(pos) > 0)


def test_csv_dump(rng):
    scheme = random_scheme(rng)
    ds = random_panel(rng, scheme, n_entities=2, n_periods=2)
    text = normalized_to_csv(normalize(ds, dataset_stats(ds)))
    lines = text.splitlines()
    assert lines[0] == "entity,period,indicator,value,value_normalized"
    assert len(lines) == 1 + ds.values.size
    e, p, d, raw, val = lines[1].split(",")
    assert float(val) == pytest.approx(normalize(ds, dataset_stats(ds)).values[0, 0, 0], rel=1e-11)
