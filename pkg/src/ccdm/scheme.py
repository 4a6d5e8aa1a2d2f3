"""Hierarchical indicator system: systems -> indicators.

A scheme file is line oriented, one directive per line, ``#`` starts a
comment::

    system digital "Digital Economy"
    indicator telecom_revenue "Revenue of telecom" system=digital subsystem="Foundation" direction=+ weight=0.159
    alphas 0.5 0.5
    stages 0.2 0.5 0.8

Scheme objects are frozen. They may hold invalid combinations (for
example fixed weights that do not sum to one); :func:`validate_scheme`
reports those as data, while :func:`parse_scheme` refuses them.
"""

from __future__ import annotations

import enum
import math
import re
import shlex
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Iterable, Mapping

from .errors import SchemeSemanticError, SchemeSyntaxError

WEIGHT_SUM_TOL = 1e-6
ALPHA_SUM_TOL = 1e-9

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")


class EffectDirection(enum.Enum):
    POSITIVE = "+"
    NEGATIVE = "-"

    @classmethod
    def from_token(cls, token: str) -> "EffectDirection":
        # accept the typographic minus used in printed tables
        token = token.replace("−", "-")
        try:
            return cls(token)
        except ValueError:
            raise ValueError(f"bad direction token {token!r} (expected + or -)") from None


@dataclass(frozen=True)
class IndicatorSpec:
    id: str
    label: str
    system_id: str
    subsystem_label: str = ""
    direction: EffectDirection = EffectDirection.POSITIVE
    fixed_weight: float | None = None


@dataclass(frozen=True)
class SystemSpec:
    id: str
    label: str
    indicators: tuple[IndicatorSpec, ...] = ()

    @property
    def indicator_ids(self) -> tuple[str, ...]:
        return tuple(ind.id for ind in self.indicators)


@dataclass(frozen=True)
class EvaluationScheme:
    """Ordered systems plus optional synergy weights and stage thresholds.

    ``renormalized`` maps a system id to the printed sum of its fixed
    weights when :func:`parse_scheme` rescaled them to sum to one.
    """

    systems: tuple[SystemSpec, ...]
    alphas: tuple[float, ...] | None = None
    stage_thresholds: tuple[float, ...] | None = None
    renormalized: Mapping[str, float] = field(default_factory=dict, hash=False)

    @property
    def k(self) -> int:
        return len(self.systems)

    @property
    def system_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.systems)

    @property
    def indicators(self) -> tuple[IndicatorSpec, ...]:
        return tuple(ind for s in self.systems for ind in s.indicators)

    @property
    def indicator_ids(self) -> tuple[str, ...]:
        return tuple(ind.id for ind in self.indicators)

    def effective_alphas(self) -> tuple[float, ...]:
        if self.alphas is not None:
            return tuple(self.alphas)
        return tuple(1.0 / self.k for _ in self.systems)

    def system(self, system_id: str) -> SystemSpec:
        for s in self.systems:
            if s.id == system_id:
                return s
        raise KeyError(system_id)

    def indicator(self, indicator_id: str) -> IndicatorSpec:
        for ind in self.indicators:
            if ind.id == indicator_id:
                return ind
        raise KeyError(indicator_id)


@dataclass(frozen=True)
class Violation:
    element: str
    message: str

    def __str__(self) -> str:
        return f"{self.element}: {self.message}"


def _fmt_sum(total: float) -> str:
    text = f"{total:.3f}"
    return repr(total) if text == "1.000" else text


def validate_scheme(scheme: EvaluationScheme) -> list[Violation]:
    """Return every invariant violation in ``scheme`` (empty when valid)."""
    out: list[Violation] = []
    if scheme.k < 2:
        out.append(Violation("scheme", f"k ≥ 2 required, got {scheme.k} system(s)"))

    seen_sys: set[str] = set()
    seen_ind: set[str] = set()
    for system in scheme.systems:
        if system.id in seen_sys:
            out.append(Violation(f"system {system.id}", "duplicate system id"))
        seen_sys.add(system.id)
        if not system.indicators:
            out.append(Violation(f"system {system.id}", "system has no indicators"))
        for ind in system.indicators:
            where = f"indicator {ind.id}"
            if ind.id in seen_ind:
                out.append(Violation(where, "duplicate indicator id"))
            seen_ind.add(ind.id)
            if ind.system_id != system.id:
                out.append(Violation(where, f"declares system={ind.system_id} but is listed under {system.id}"))
            if not isinstance(ind.direction, EffectDirection):
                out.append(Violation(where, f"bad direction {ind.direction!r}"))
            w = ind.fixed_weight
            if w is not None and not (math.isfinite(w) and 0.0 <= w <= 1.0):
                out.append(Violation(where, f"fixed weight {w!r} outside [0, 1]"))

        weights = [ind.fixed_weight for ind in system.indicators]
        present = [w for w in weights if w is not None]
        if present and len(present) != len(weights):
            out.append(Violation(f"system {system.id}", "fixed weights must be given for all indicators or none"))
        elif present:
            total = math.fsum(present)
            if abs(total - 1.0) > WEIGHT_SUM_TOL:
                out.append(Violation(f"system {system.id}", f"fixed weights sum {_fmt_sum(total)} ≠ 1"))

    if scheme.alphas is not None:
        alphas = scheme.alphas
        if len(alphas) != scheme.k:
            out.append(Violation("alphas", f"expected {scheme.k} values, got {len(alphas)}"))
        if any(not math.isfinite(a) or a < 0 for a in alphas):
            out.append(Violation("alphas", "alphas must be nonnegative"))
        total = math.fsum(alphas)
        if abs(total - 1.0) > ALPHA_SUM_TOL:
            out.append(Violation("alphas", f"alphas sum {_fmt_sum(total)} ≠ 1"))

    if scheme.stage_thresholds is not None:
        t = scheme.stage_thresholds
        ok = all(0.0 < x < 1.0 for x in t) and all(a < b for a, b in zip(t, t[1:]))
        if len(t) != 3 or not ok:
            out.append(Violation("stages", "need 3 thresholds, strictly increasing inside (0, 1)"))
    return out


def _decimal(token: str, what: str, line: int) -> float:
    if not _DECIMAL.match(token):
        raise SchemeSyntaxError(f"{what}: {token!r} is not a decimal number", line)
    return float(token)


def _ident(token: str, what: str, line: int) -> str:
    if not _IDENT.match(token):
        raise SchemeSyntaxError(f"{what}: {token!r} is not a valid identifier", line)
    return token


def _split(raw: str, line: int) -> list[str]:
    lexer = shlex.shlex(raw, posix=True)
    lexer.whitespace_split = True
    lexer.commenters = "#"
    try:
        return list(lexer)
    except ValueError as exc:
        raise SchemeSyntaxError(str(exc), line) from None


def parse_scheme(config_text: str, *, strict: bool = False) -> EvaluationScheme:
    """Parse a scheme document.

    With ``strict=False`` (default) a system whose fixed weights are all
    present but sum to something other than one is rescaled to sum to one
    and recorded in ``EvaluationScheme.renormalized``. With ``strict=True``
    such a system is a semantic error.
    """
    systems: dict[str, dict] = {}
    sys_order: list[str] = []
    indicators: list[tuple[int, IndicatorSpec]] = []
    alphas: tuple[float, ...] | None = None
    stages: tuple[float, ...] | None = None
    errors: list[str] = []

    for lineno, raw in enumerate(config_text.splitlines(), start=1):
        tokens = _split(raw, lineno)
        if not tokens:
            continue
        head, args = tokens[0], tokens[1:]
        if head == "system":
            if len(args) != 2:
                raise SchemeSyntaxError("usage: system <id> \"<label>\"", lineno)
            sid = _ident(args[0], "system id", lineno)
            if sid in systems:
                errors.append(f"line {lineno}: duplicate system id {sid!r}")
                continue
            systems[sid] = {"label": args[1]}
            sys_order.append(sid)
        elif head == "indicator":
            if len(args) < 2:
                raise SchemeSyntaxError("usage: indicator <id> \"<label>\" key=value ...", lineno)
            iid = _ident(args[0], "indicator id", lineno)
            opts: dict[str, str] = {}
            for tok in args[2:]:
                key, sep, value = tok.partition("=")
                if not sep:
                    raise SchemeSyntaxError(f"expected key=value, got {tok!r}", lineno)
                if key not in ("system", "subsystem", "direction", "weight"):
                    raise SchemeSyntaxError(f"unknown indicator attribute {key!r}", lineno)
                if key in opts:
                    raise SchemeSyntaxError(f"attribute {key!r} given twice", lineno)
                opts[key] = value
            for key in ("system", "direction"):
                if key not in opts:
                    raise SchemeSyntaxError(f"indicator {iid!r} lacks {key}=", lineno)
            try:
                direction = EffectDirection.from_token(opts["direction"])
            except ValueError as exc:
                errors.append(f"line {lineno}: indicator {iid!r}: {exc}")
                continue
            weight = None
            if "weight" in opts:
                weight = _decimal(opts["weight"], "weight", lineno)
            indicators.append((lineno, IndicatorSpec(
                id=iid,
                label=args[1],
                system_id=opts["system"],
                subsystem_label=opts.get("subsystem", ""),
                direction=direction,
                fixed_weight=weight,
            )))
        elif head == "alphas":
            if alphas is not None:
                raise SchemeSyntaxError("alphas given twice", lineno)
            if not args:
                raise SchemeSyntaxError("alphas needs at least one value", lineno)
            alphas = tuple(_decimal(a, "alpha", lineno) for a in args)
        elif head == "stages":
            if stages is not None:
                raise SchemeSyntaxError("stages given twice", lineno)
            if not args:
                raise SchemeSyntaxError("stages needs at least one threshold", lineno)
            stages = tuple(_decimal(a, "stage threshold", lineno) for a in args)
        else:
            raise SchemeSyntaxError(f"unknown directive {head!r}", lineno)

    members: dict[str, list[IndicatorSpec]] = {sid: [] for sid in sys_order}
    for lineno, ind in indicators:
        if ind.system_id not in members:
            errors.append(f"line {lineno}: indicator {ind.id!r} references unknown system {ind.system_id!r}")
            continue
        members[ind.system_id].append(ind)

    renormalized: dict[str, float] = {}
    built: list[SystemSpec] = []
    for sid in sys_order:
        inds = members[sid]
        ws = [ind.fixed_weight for ind in inds]
        if inds and all(w is not None for w in ws):
            total = math.fsum(ws)
            if abs(total - 1.0) > WEIGHT_SUM_TOL and total > 0 and not strict:
                renormalized[sid] = total
                inds = [replace(ind, fixed_weight=ind.fixed_weight / total) for ind in inds]
        built.append(SystemSpec(sid, systems[sid]["label"], tuple(inds)))

    scheme = EvaluationScheme(tuple(built), alphas, stages, renormalized)
    violations = validate_scheme(scheme)
    if errors or violations:
        lines = errors + [str(v) for v in violations]
        raise SchemeSemanticError("; ".join(lines), violations)
    return scheme


def _quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_scheme(scheme: EvaluationScheme) -> str:
    """Render ``scheme`` in the scheme file format.

    Weights are written with ``repr`` so parsing the result gives back the
    same floats.
    """
    lines: list[str] = []
    for system in scheme.systems:
        lines.append(f"system {system.id} {_quote(system.label)}")
    for system in scheme.systems:
        for ind in system.indicators:
            parts = [
                "indicator", ind.id, _quote(ind.label),
                f"system={ind.system_id}",
                f"subsystem={_quote(ind.subsystem_label)}",
                f"direction={ind.direction.value}",
            ]
            if ind.fixed_weight is not None:
                parts.append(f"weight={ind.fixed_weight!r}")
            lines.append(" ".join(parts))
    if scheme.alphas is not None:
        lines.append("alphas " + " ".join(repr(a) for a in scheme.alphas))
    if scheme.stage_thresholds is not None:
        lines.append("stages " + " ".join(repr(t) for t in scheme.stage_thresholds))
    return "\n".join(lines) + "\n"


def builtin_scheme_text(name: str = "hangzhou") -> str:
    """Text of a scheme shipped with the package (``hangzhou``: the 3-system, 24-indicator index system)."""
    return resources.files("ccdm.data").joinpath(f"{name}_scheme.txt").read_text(encoding="utf-8")


def load_builtin_scheme(name: str = "hangzhou", *, strict: bool = False) -> EvaluationScheme:
    return parse_scheme(builtin_scheme_text(name), strict=strict)


def build_scheme(systems: Iterable[tuple[str, str, Iterable[IndicatorSpec]]], alphas=None) -> EvaluationScheme:
    """Assemble a scheme from plain tuples without validating it."""
    return EvaluationScheme(
        tuple(SystemSpec(sid, label, tuple(inds)) for sid, label, inds in systems),
        None if alphas is None else tuple(alphas),
    )
