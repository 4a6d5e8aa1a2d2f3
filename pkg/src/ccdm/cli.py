"""Command line front end: ``ccdm validate | run | explain``.

Exit codes: 0 success, 1 validation or data error, 2 computation error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from pathlib import Path

from . import __version__
from .coupling import coupling_to_csv
from .errors import CCDMError, ComputationError, InputError
from .ingest import MissingPolicy, load_panel
from .normalize import normalized_to_csv
from .pipeline import RunOptions, run_pipeline
from .scheme import EvaluationScheme, parse_scheme
from .scoring import scores_to_csv, trajectories_to_json
from .weighting import WeightMethod, weights_to_csv

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE = 0, 1, 2
INCOMPLETE_MARKER = "INCOMPLETE"

OUTPUT_FILES = (
    "load_report.json",
    "stats.csv",
    "normalized.csv",
    "weights.csv",
    "scores.csv",
    "trajectories.json",
    "coupling.csv",
)
MANIFEST = "manifest.json"


def _aggregate(text: str) -> tuple[str, list[str]]:
    name, sep, members = text.partition("=")
    parts = [m.strip() for m in members.split(",") if m.strip()]
    if not sep or not name.strip() or not parts:
        raise argparse.ArgumentTypeError(f"expected NAME=E1,E2,..., got {text!r}")
    return name.strip(), parts


def _stages(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected T1,T2,T3, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scheme", type=Path, required=True, help="scheme config file")
    common.add_argument("--data", type=Path, required=True, help="long-format panel CSV")
    common.add_argument("--weights", choices=[m.value for m in WeightMethod], default="msd")
    common.add_argument("--missing", choices=[m.value for m in MissingPolicy], default="fail")
    common.add_argument("--constant-fill", type=float, default=0.5,
                        help="normalized value for indicators with zero range (default 0.5)")
    common.add_argument("--aggregate", type=_aggregate, action="append", default=[], metavar="NAME=E1,E2,...",
                        help="synthetic entity averaging the listed entities' scores (repeatable)")
    common.add_argument("--precision", choices=["report", "full"], default="report")
    common.add_argument("--stages", type=_stages, default=None, metavar="T1,T2,T3",
                        help="stage thresholds (default 0.2,0.5,0.8 or the scheme's stages line)")
    common.add_argument("--strict-weights", action="store_true",
                        help="reject fixed weights that do not sum to 1 instead of rescaling them")

    p = argparse.ArgumentParser(prog="ccdm", description="Coupling coordination analysis of indicator panels")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="check scheme and data")
    v.add_argument("--report", type=Path, default=None, help="write the JSON report here instead of stdout")

    r = sub.add_parser("run", parents=[common], help="run the full pipeline and write reports")
    r.add_argument("--out", type=Path, required=True, help="output directory")

    e = sub.add_parser("explain", parents=[common], help="derivation trace for one entity and period")
    e.add_argument("--entity", required=True)
    e.add_argument("--period", type=int, required=True)
    return p


def _options(args) -> RunOptions:
    groups: dict[str, list[str]] = {}
    for name, members in args.aggregate:
        if name in groups:
            raise InputError(f"aggregate {name!r} given twice")
        groups[name] = members
    return RunOptions(
        weight_method=WeightMethod(args.weights),
        missing_policy=MissingPolicy(args.missing),
        constant_fill=args.constant_fill,
        aggregate_groups=groups,
        precision=args.precision,
        stages=args.stages,
    )


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_scheme(args) -> tuple[EvaluationScheme, bytes]:
    raw = _read(args.scheme)
    return parse_scheme(raw.decode("utf-8"), strict=args.strict_weights), raw


def _exit_code(exc: Exception) -> int:
    return EXIT_COMPUTE if isinstance(exc, ComputationError) else EXIT_INPUT


def cmd_validate(args) -> int:
    report: dict = {"valid": False, "errors": []}
    try:
        scheme, _ = _load_scheme(args)
        report["scheme"] = {
            "systems": list(scheme.system_ids),
            "indicators": len(scheme.indicator_ids),
            "renormalized_weights": dict(scheme.renormalized),
        }
        options = _options(args)
        dataset, load = load_panel(_read(args.data).decode("utf-8"), scheme, options.missing_policy)
        for name, members in options.aggregate_groups.items():
            unknown = [m for m in members if m not in dataset.entities]
            if unknown:
                raise InputError(f"aggregate {name!r}: unknown entities {unknown}")
        report["data"] = {
            "entities": list(dataset.entities),
            "periods": list(dataset.periods),
            "cells": int(dataset.values.size),
            "load_report": load.to_dict(),
        }
        report["valid"] = True
        code = EXIT_OK
    except CCDMError as exc:
        report["errors"].append(str(exc))
        print(f"error: {exc}", file=sys.stderr)
        code = _exit_code(exc)
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if args.report is not None:
        args.report.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


def _stats_csv(stats) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["indicator", "min", "max", "mean", "population_std"])
    for s in stats:
        w.writerow([s.indicator_id, f"{s.min:.12g}", f"{s.max:.12g}", f"{s.mean:.12g}", f"{s.population_std:.12g}"])
    return buf.getvalue()


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _manifest(args, options: RunOptions, result, scheme_raw: bytes, data_raw: bytes) -> str:
    doc = {
        "tool": {"name": "ccdm", "version": __version__},
        "inputs": {
            "scheme": {"path": str(args.scheme), "sha256": _sha256(scheme_raw)},
            "data": {"path": str(args.data), "sha256": _sha256(data_raw)},
        },
        "options": {
            "missing_policy": options.missing_policy.value,
            "constant_fill": options.constant_fill,
            "aggregate_groups": options.aggregate_groups,
            "precision": options.precision,
            "stages": list(options.stages) if options.stages else None,
            "strict_weights": bool(args.strict_weights),
        },
        "weights": {
            "method": options.weight_method.value,
            "renormalized": {
                w.system_id: w.adjusted_from for w in result.weights if w.adjusted_from is not None
            },
        },
        "dimensions": {
            "entities": list(result.dataset.entities),
            "periods": list(result.dataset.periods),
            "systems": list(result.scheme.system_ids),
            "indicators": len(result.scheme.indicator_ids),
            "coupling_rows": len(result.records),
        },
        "constant_indicators": list(result.normalized.constant_indicators),
        "outputs": list(OUTPUT_FILES),
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def render_outputs(result, precision: str) -> dict[str, str]:
    """File name -> content for every data artifact of a run."""
    return {
        "load_report.json": result.load_report.to_json(),
        "stats.csv": _stats_csv(result.stats),
        "normalized.csv": normalized_to_csv(result.normalized),
        "weights.csv": weights_to_csv(result.weights),
        "scores.csv": scores_to_csv(result.scores, precision),
        "trajectories.json": trajectories_to_json(result.scores, precision),
        "coupling.csv": coupling_to_csv(result.records, precision),
    }


def cmd_run(args) -> int:
    out: Path = args.out
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create {out}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    marker = out / INCOMPLETE_MARKER
    if marker.exists():
        marker.unlink()
    try:
        scheme, scheme_raw = _load_scheme(args)
        data_raw = _read(args.data)
        options = _options(args)
        result = run_pipeline(scheme, data_raw.decode("utf-8"), options)
        files = render_outputs(result, options.precision)
        files[MANIFEST] = _manifest(args, options, result, scheme_raw, data_raw)
        for name, text in files.items():
            with open(out / name, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except CCDMError as exc:
        marker.write_text(f"{type(exc).__name__}: {exc}\n", encoding="utf-8")
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    print(f"wrote {len(files)} files to {out}")
    return EXIT_OK


def explain_trace(result, entity: str, period: int) -> str:
    """Text derivation for one (entity, period) of a pipeline result."""
    ds = result.dataset
    if entity not in result.scores.entities:
        raise InputError(f"unknown entity {entity!r}; available: {', '.join(result.scores.entities)}")
    if period not in ds.periods:
        raise InputError(f"unknown period {period}; available: {', '.join(map(str, ds.periods))}")
    pi = ds.periods.index(period)
    ei = result.scores.entities.index(entity)
    weights = {w.system_id: w for w in result.weights}
    lines = [f"{entity} {period}", ""]
    if entity in ds.entities:
        de = ds.entities.index(entity)
        stats = {s.indicator_id: s for s in result.stats}
        lines.append("indicators: raw -> normalized x weight")
        for system in result.scheme.systems:
            lines.append(f"  [{system.id}] {system.label}")
            for ind in system.indicators:
                di = ds.indicator_ids.index(ind.id)
                s = stats[ind.id]
                form = "(x-min)/(max-min)" if ind.direction.value == "+" else "(max-x)/(max-min)"
                lines.append(
                    f"    {ind.id} ({ind.direction.value}): raw={ds.values[de, pi, di]:.12g} "
                    f"min={s.min:.12g} max={s.max:.12g} {form} -> {result.normalized.values[de, pi, di]:.12g}"
                    f" x w={weights[system.id][ind.id]:.6f}"
                )
    else:
        lines.append("aggregate entity: system scores are the mean of its members' scores")
    lines.append("")
    lines.append("system scores (CDI = sum of w * normalized):")
    for si, sid in enumerate(result.scores.system_ids):
        lines.append(f"  {sid} = {result.scores.scores[ei, pi, si]:.12g}")
    rec = next(r for r in result.records if r.entity == entity and r.period == period)
    k = len(rec.system_scores)
    lines += [
        "",
        f"C = (prod(s) / sum(s)^{k})^(1/{k}) = {rec.C:.12g}",
        f"C_rescaled = {k} * C = {rec.C_rescaled:.12g} -> stage {rec.stage_C.label}",
        f"T = sum(alpha_i * s_i) = {rec.T:.12g}",
        f"lag type: {rec.lag.label}" + (" (tied)" if rec.lag.tied else ""),
        f"stage (D): {rec.stage_D.label}",
        f"D = sqrt(C * T) = sqrt({rec.C:.12g} * {rec.T:.12g}) = {rec.D:.12g}",
    ]
    return "\n".join(lines) + "\n"


def cmd_explain(args) -> int:
    try:
        scheme, _ = _load_scheme(args)
        options = _options(args)
        result = run_pipeline(scheme, _read(args.data).decode("utf-8"), options)
        sys.stdout.write(explain_trace(result, args.entity, args.period))
    except CCDMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"validate": cmd_validate, "run": cmd_run, "explain": cmd_explain}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
