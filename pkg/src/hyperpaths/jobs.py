"""Job specifications and their execution.

A job is one command with its space, inputs and output targets. Jobs come
from command-line flags or from a JSON job file carrying ``"schema": 1``;
both routes validate through :class:`JobSpec` and run through :func:`run`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .counterexamples import (
    generate_spaced_pair,
    midpoint_lambda_bound,
    taxicab_fs2_obstruction,
    verify_spaced_pair,
)
from .errors import CapViolationError, PreconditionError
from .hyperspace import FiniteSubset, canonicalize, from_json, hausdorff_distance
from .metric import EuclideanSpace, GroundSpace, TaxicabCross, space_from_config
from .paths import (
    REL_TOL,
    canonical_interpolation_path,
    extract_component_path,
    lipschitz_certificate,
    path_length_estimate,
    synthesize_bundle,
    two_leg_quasiconvex_path,
)
from .relations import (
    brute_force_min_relation,
    build_proximal_complete,
    classify,
    reduce_relation,
    trim_to_bound,
)
from .serialize import (
    dumps,
    header,
    plot_polylines_csv,
    sample_to_path,
    sampled_from_csv,
    sampled_from_json,
    sampled_to_csv,
    sampled_to_json,
    write_atomic,
)

Command = Literal[
    "hausdorff", "relation", "synth", "two-leg", "interpolate", "certify", "extract", "counterexample"
]
PointsInput = Union[list, dict]


class Inputs(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    x: PointsInput | None = None
    y: PointsInput | None = None
    n: int | None = Field(default=None, ge=1)
    cap: int | None = Field(default=None, ge=1)
    lam: float | None = Field(default=None, alias="lambda")
    L: float | None = Field(default=None, ge=0)
    depth: int = Field(default=8, ge=0, le=16)
    eps: float | None = Field(default=None, gt=0)
    seed: int | None = None
    mode: Literal["proximal", "trimmed", "reduced", "minimal"] | None = None
    t: float | None = Field(default=None, ge=0, le=1)
    steps: int = Field(default=16, ge=1, le=4096)
    path: str | None = None
    a: list | float | None = None
    kind: Literal["taxicab-fs2", "spaced-pair"] | None = None
    s: int = 2
    delta: float | None = Field(default=None, gt=0)
    variant: Literal["groups", "two-group"] = "groups"


class Output(BaseModel):
    model_config = ConfigDict(extra="forbid")

    out: str | None = None
    format: Literal["csv", "json"] = "json"
    plot: str | None = None
    report: str | None = None


class JobSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: Literal[1] = Field(default=1, alias="schema")
    command: Command
    space: str | dict = "r2"
    inputs: Inputs = Field(default_factory=Inputs)
    output: Output = Field(default_factory=Output)


class UsageError(Exception):
    """Invalid job input; maps to exit status 2."""


EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass
class JobResult:
    status: int
    report: dict[str, Any]
    text: str | None = None
    artifacts: dict[str, str] = field(default_factory=dict)


def load_job(text: str, source: str = "<job>") -> JobSpec:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise UsageError(f"{source}: job must be a JSON object")
    if "schema" not in raw:
        raise UsageError(f"{source}: missing \"schema\": 1")
    return validate_job(raw, source)


def validate_job(raw: dict[str, Any], source: str = "<job>") -> JobSpec:
    from pydantic import ValidationError

    try:
        return JobSpec.model_validate(raw)
    except ValidationError as exc:
        msgs = []
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"])
            msgs.append(f"{source}: at {loc}: {err['msg']}")
        raise UsageError("\n".join(msgs)) from None


# -- helpers -----------------------------------------------------------


def _space(spec: JobSpec) -> GroundSpace:
    try:
        return space_from_config(spec.space)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"space: {exc}") from None


def _set(space: GroundSpace, raw: Any, name: str) -> FiniteSubset:
    if raw is None:
        raise UsageError(f"missing input set --{name}")
    try:
        return from_json(space, raw)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"--{name}: {exc}") from None


def _random_set(space: GroundSpace, rng: np.random.Generator, n: int) -> FiniteSubset:
    if not isinstance(space, EuclideanSpace):
        raise UsageError("random sets (--seed without --x/--y) need a Euclidean space")
    return canonicalize(space, rng.uniform(0.0, 1.0, size=(n, space.d)))


def _pair(space: GroundSpace, spec: JobSpec) -> tuple[FiniteSubset, FiniteSubset]:
    inp = spec.inputs
    rng = np.random.default_rng(inp.seed) if inp.seed is not None else None
    sets = []
    for name in ("x", "y"):
        raw = getattr(inp, name)
        if raw is None and rng is not None:
            sets.append(_random_set(space, rng, inp.n or 3))
        else:
            sets.append(_set(space, raw, name))
    return sets[0], sets[1]


def _num(v: float) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def _write_samples(spec: JobSpec, space: GroundSpace, sampled: Any, result: JobResult) -> None:
    if spec.output.out:
        text = dumps(header() | sampled_to_json(sampled)) if spec.output.format == "json" else sampled_to_csv(sampled)
        result.artifacts[spec.output.out] = text


def _relation_for(space: GroundSpace, x: FiniteSubset, y: FiniteSubset, mode: str, lam: float | None):
    if mode == "proximal":
        return build_proximal_complete(space, x, y)
    if mode == "reduced":
        return reduce_relation(space, build_proximal_complete(space, x, y))
    if mode == "trimmed":
        return trim_to_bound(space, build_proximal_complete(space, x, y))
    res = brute_force_min_relation(space, x, y, 1.0 if lam is None else lam)
    if not res.feasible:
        raise UsageError("no complete relation exists within the proximality bound")
    return res.relation


def _load_path(space: GroundSpace, spec: JobSpec):
    if not spec.inputs.path:
        raise UsageError("missing --path")
    p = Path(spec.inputs.path)
    if not p.exists():
        raise UsageError(f"--path: file {p} does not exist")
    text = p.read_text(encoding="utf-8")
    try:
        if p.suffix.lower() == ".csv":
            return sampled_from_csv(space, text)
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{p}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
        return sampled_from_json(space, obj)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"{p}: {exc}") from None


# -- commands ----------------------------------------------------------


def _hausdorff(spec: JobSpec, space: GroundSpace) -> JobResult:
    x, y = _pair(space, spec)
    dh = hausdorff_distance(space, x, y)
    report = {"command": "hausdorff", "x": x.to_json(), "y": y.to_json(), "hausdorff": dh}
    return JobResult(EXIT_OK, report, text=_fmt(dh) + "\n")


def _relation(spec: JobSpec, space: GroundSpace) -> JobResult:
    x, y = _pair(space, spec)
    mode = spec.inputs.mode or "proximal"
    R = _relation_for(space, x, y, mode, spec.inputs.lam)
    cls = classify(space, R)
    report = {
        "command": "relation",
        "mode": mode,
        "x": x.to_json(),
        "y": y.to_json(),
        "hausdorff": hausdorff_distance(space, x, y),
        "relation": R.to_json(),
        "classification": cls.to_json(),
    }
    if mode == "trimmed":
        report["bound"] = len(x) + len(y) - 2
    return JobResult(EXIT_OK, report)


def _synth(spec: JobSpec, space: GroundSpace) -> JobResult:
    x, y = _pair(space, spec)
    inp = spec.inputs
    mode = inp.mode or ("trimmed" if min(len(x), len(y)) >= 2 else "proximal")
    R = _relation_for(space, x, y, mode, inp.lam)
    cap = inp.cap if inp.cap is not None else max(len(x), len(y), len(R))
    bundle = synthesize_bundle(space, x, y, R, cap)
    cert = lipschitz_certificate(space, bundle, bundle.declared_L, inp.depth)
    report = {
        "command": "synth",
        "mode": mode,
        "cap": cap,
        "relation": R.to_json(),
        "classification": classify(space, R).to_json(),
        "declared_L": bundle.declared_L,
        "certificate": cert.to_json(),
    }
    result = JobResult(EXIT_OK if cert.passed else EXIT_FAILED, report)
    _write_samples(spec, space, sample_to_path(bundle, inp.depth), result)
    if spec.output.plot:
        result.artifacts[spec.output.plot] = plot_polylines_csv(space, [("bundle", bundle)], inp.depth)
    return result


def _two_leg(spec: JobSpec, space: GroundSpace) -> JobResult:
    x, y = _pair(space, spec)
    inp = spec.inputs
    n = inp.n if inp.n is not None else max(len(x), len(y))
    tl = two_leg_quasiconvex_path(space, x, y, n)
    dh = hausdorff_distance(space, x, y)
    length = path_length_estimate(space, tl.path, inp.depth)
    ratio = length / dh if dh > 0 else 0.0
    cert = lipschitz_certificate(space, tl.path, tl.declared_L, inp.depth)
    bound = 2.0 * space.lam
    ok = ratio <= bound * (1 + REL_TOL) and cert.passed and len(tl.z) <= n
    report = {
        "command": "two-leg",
        "n": n,
        "x": x.to_json(),
        "y": y.to_json(),
        "z": tl.z.to_json(),
        "hausdorff": dh,
        "length": length,
        "ratio": ratio,
        "ratio_bound": bound,
        "relation": tl.relation.to_json(),
        "leg1": {"relation": tl.leg1.relation.to_json(), "declared_L": tl.leg1.declared_L},
        "leg2": {"relation": tl.leg2.relation.to_json(), "declared_L": tl.leg2.declared_L},
        "certificate": cert.to_json(),
        "passed": ok,
    }
    result = JobResult(EXIT_OK if ok else EXIT_FAILED, report)
    _write_samples(spec, space, sample_to_path(tl.path, inp.depth), result)
    if spec.output.plot:
        result.artifacts[spec.output.plot] = plot_polylines_csv(
            space, [("leg1", tl.leg1), ("leg2", tl.leg2)], inp.depth
        )
    return result


def _interpolate(spec: JobSpec, space: GroundSpace) -> JobResult:
    A, B = _pair(space, spec)
    inp = spec.inputs
    lam = inp.lam if inp.lam is not None else 2.0
    eps = inp.eps if inp.eps is not None else 0.01
    ts = [inp.t] if inp.t is not None else [i / inp.steps for i in range(inp.steps + 1)]
    if inp.t is not None:
        from .paths import canonical_interpolation

        S = canonical_interpolation(space, A, B, lam, inp.t, eps)
        report = {"command": "interpolate", "t": inp.t, "lambda": lam, "eps": eps, "set": S.to_json()}
        return JobResult(EXIT_OK, report)
    sampled = canonical_interpolation_path(space, A, B, lam, ts, eps)
    dh = hausdorff_distance(space, A, B)
    steps = [
        hausdorff_distance(space, a, b) for a, b in zip(sampled.sets, sampled.sets[1:])
    ]
    excess = max(s - lam * dh * (t1 - t0) for s, t0, t1 in zip(steps, ts, ts[1:]))
    report = {
        "command": "interpolate",
        "lambda": lam,
        "eps": eps,
        "hausdorff": dh,
        "L": sampled.declared_L,
        "ts": ts,
        "set_sizes": [len(s) for s in sampled.sets],
        "step_distances": steps,
        "max_step_excess": excess,
    }
    result = JobResult(EXIT_OK, report)
    _write_samples(spec, space, sampled, result)
    return result


def _certify(spec: JobSpec, space: GroundSpace) -> JobResult:
    sampled = _load_path(space, spec)
    inp = spec.inputs
    dh = hausdorff_distance(space, sampled.source, sampled.target)
    if inp.L is not None:
        L = inp.L
    elif inp.lam is not None:
        L = inp.lam * dh
    elif math.isfinite(sampled.declared_L):
        L = sampled.declared_L
    else:
        raise UsageError("certify needs --L, --lambda, or a declared_L in the path file")
    cert = lipschitz_certificate(space, sampled, L, None)
    report = {"command": "certify", "samples": len(sampled.ts), "certificate": cert.to_json()}
    return JobResult(EXIT_OK if cert.passed else EXIT_FAILED, report)


def _extract(spec: JobSpec, space: GroundSpace) -> JobResult:
    sampled = _load_path(space, spec)
    a = spec.inputs.a
    if a is None:
        raise UsageError("extract needs a start point --a")
    a_pt = [a] if isinstance(a, (int, float)) else a
    if isinstance(a_pt, list) and len(a_pt) == 1 and isinstance(a_pt[0], list):
        a_pt = a_pt[0]
    comp = extract_component_path(space, sampled, a_pt, None)
    report = {"command": "extract", "component": comp.to_json()}
    L = sampled.declared_L
    if math.isfinite(L):
        report["declared_L"] = L
        report["within_declared"] = comp.lipschitz <= L * (1 + REL_TOL) + 1e-12
    status = EXIT_OK if report.get("within_declared", True) else EXIT_FAILED
    return JobResult(status, report)


def _counterexample(spec: JobSpec, space: GroundSpace) -> JobResult:
    inp = spec.inputs
    kind = inp.kind or "taxicab-fs2"
    if kind == "taxicab-fs2":
        rep = taxicab_fs2_obstruction(inp.delta if inp.delta is not None else 0.01)
        report = {"command": "counterexample", "kind": kind, "space": TaxicabCross().to_config(), **rep.to_json()}
        return JobResult(EXIT_OK if rep.obstruction else EXIT_FAILED, report)
    base = space if isinstance(space, EuclideanSpace) else EuclideanSpace(1)
    n = inp.n if inp.n is not None else 3
    eps = inp.eps if inp.eps is not None else 1.0
    inst = generate_spaced_pair(base, n=n, s=inp.s, epsilon=eps, variant=inp.variant)
    min_rel = brute_force_min_relation(base, inst.x, inst.y, 1.0)
    tl = two_leg_quasiconvex_path(base, inst.x, inst.y, n)
    report: dict[str, Any] = {
        "command": "counterexample",
        "kind": kind,
        "space": base.to_config(),
        "instance": inst.to_json(),
        "hausdorff": hausdorff_distance(base, inst.x, inst.y),
        "min_proximal_relation": {
            "cardinality": min_rel.cardinality,
            "relation": min_rel.relation.to_json() if min_rel.relation else None,
        },
        "two_leg_midpoint_lambda": midpoint_lambda_bound(base, inst.x, inst.y, tl.path),
    }
    ok = min_rel.cardinality is not None and min_rel.cardinality >= n + 1
    if inst.variant == "groups":
        delta = inp.delta if inp.delta is not None else eps / 20
        rep = verify_spaced_pair(base, inst, delta)
        report["verification"] = rep.to_json()
        ok = ok and rep.passed
    return JobResult(EXIT_OK if ok else EXIT_FAILED, report)


_COMMANDS = {
    "hausdorff": _hausdorff,
    "relation": _relation,
    "synth": _synth,
    "two-leg": _two_leg,
    "interpolate": _interpolate,
    "certify": _certify,
    "extract": _extract,
    "counterexample": _counterexample,
}


def run(spec: JobSpec) -> JobResult:
    """Execute a validated job. Raises :class:`UsageError` for bad input."""
    space = _space(spec)
    try:
        result = _COMMANDS[spec.command](spec, space)
    except CapViolationError as exc:
        return JobResult(EXIT_FAILED, header() | {"command": spec.command, "error": str(exc)})
    except (PreconditionError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(str(exc)) from None
    result.report = header() | {"space": space.to_config()} | {
        k: _num(v) for k, v in result.report.items()
    }
    if spec.output.report:
        result.artifacts[spec.output.report] = dumps(result.report)
    return result


def write_artifacts(result: JobResult) -> None:
    for target, text in sorted(result.artifacts.items()):
        write_atomic(target, text)
