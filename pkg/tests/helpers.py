import csv
import io

import numpy as np

from ccdm.ingest import PanelDataset
from ccdm.scheme import EffectDirection, EvaluationScheme, IndicatorSpec, SystemSpec


def random_scheme(rng, n_systems=3, n_indicators=(2, 4), neg_prob=0.3, alphas=None):
    systems = []
    for s in range(n_systems):
        m = int(rng.integers(n_indicators[0], n_indicators[1] + 1)) if isinstance(n_indicators, tuple) else n_indicators
        sid = f"sys{s}"
        inds = tuple(
            IndicatorSpec(
                id=f"{sid}_ind{j}",
                label=f"Indicator {j} of system {s}",
                system_id=sid,
                direction=EffectDirection.NEGATIVE if rng.random() < neg_prob else EffectDirection.POSITIVE,
            )
            for j in range(m)
        )
        systems.append(SystemSpec(sid, f"System {s}", inds))
    return EvaluationScheme(tuple(systems), alphas)


def random_panel(rng, scheme, n_entities=4, n_periods=8, first_period=2015, scale=100.0):
    entities = tuple(f"city{e}" for e in range(n_entities))
    periods = tuple(range(first_period, first_period + n_periods))
    values = rng.uniform(0.0, scale, size=(n_entities, n_periods, len(scheme.indicator_ids)))
    return PanelDataset(entities, periods, scheme.indicator_ids, values, scheme)


def panel_csv(dataset, drop=()):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["entity", "period", "indicator", "value"])
    for ei, e in enumerate(dataset.entities):
        for pi, p in enumerate(dataset.periods):
            for di, d in enumerate(dataset.indicator_ids):
                if (e, p, d) in drop:
                    continue
                w.writerow([e, p, d, repr(float(dataset.values[ei, pi, di]))])
    return buf.getvalue()


def as_lists(cube):
    return np.asarray(cube).tolist()


def groups_of(scheme):
    ids = scheme.indicator_ids
    return [[ids.index(i) for i in s.indicator_ids] for s in scheme.systems]
