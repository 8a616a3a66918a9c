"""JSON and CSV formats for sets, sampled paths, certificates and plot data."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import __version__
from .hyperspace import FiniteSubset, canonicalize, from_json
from .metric import GroundSpace
from .paths import SampledHausdorffPath, dyadic_grid

SCHEMA_VERSION = 1


def header() -> dict[str, Any]:
    return {"schema": SCHEMA_VERSION, "tool": "hyperpaths", "version": __version__}


def dumps(payload: dict[str, Any]) -> str:
    """Deterministic JSON text (sorted keys, trailing newline)."""
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- sampled paths -----------------------------------------------------


def sampled_to_json(path: SampledHausdorffPath) -> dict[str, Any]:
    out: dict[str, Any] = {
        "samples": [{"t": t, "set": s.to_json()} for t, s in zip(path.ts, path.sets)]
    }
    if np.isfinite(path.declared_L):
        out["declared_L"] = path.declared_L
    return out


def sampled_from_json(space: GroundSpace, obj: dict[str, Any]) -> SampledHausdorffPath:
    samples = obj["samples"]
    ts = [float(s["t"]) for s in samples]
    sets = [from_json(space, s["set"]) for s in samples]
    return SampledHausdorffPath(tuple(ts), tuple(sets), float(obj.get("declared_L", np.nan)))


def sampled_to_csv(path: SampledHausdorffPath) -> str:
    """One row per sample: ``t, k, p1_c1, ..., pk_cd``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for t, s in zip(path.ts, path.sets):
        w.writerow([repr(t), len(s), *[repr(float(c)) for c in s.coords.reshape(-1)]])
    return buf.getvalue()


def sampled_from_csv(space: GroundSpace, text: str) -> SampledHausdorffPath:
    ts: list[float] = []
    sets: list[FiniteSubset] = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or row[0].startswith("#"):
            continue
        try:
            t, k = float(row[0]), int(row[1])
            vals = [float(v) for v in row[2:]]
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: malformed sample row ({exc})") from None
        if len(vals) != k * space.dim:
            raise ValueError(
                f"line {lineno}: expected {k * space.dim} coordinates for {k} point(s), got {len(vals)}"
            )
        ts.append(t)
        sets.append(canonicalize(space, np.array(vals).reshape(k, space.dim)))
    return SampledHausdorffPath(tuple(ts), tuple(sets))


def sample_to_path(path: Any, depth: int) -> SampledHausdorffPath:
    ts = dyadic_grid(depth)
    return SampledHausdorffPath(
        tuple(ts), tuple(path.evaluate(float(t)) for t in ts), float(path.declared_L)
    )


# -- plot data ---------------------------------------------------------


def plot_polylines_csv(space: GroundSpace, named_bundles: Iterable[tuple[str, Any]], depth: int) -> str:
    """Polyline per leg: ``bundle, pair_i, pair_j, t, coords...`` rows."""
    ts = dyadic_grid(depth)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    dim = space.dim
    w.writerow(["bundle", "i", "j", "t", *[f"c{c}" for c in range(dim)]])
    for name, bundle in named_bundles:
        for (i, j), leg in zip(bundle.relation.pairs, bundle.legs):
            for t in ts:
                p = leg.at(space, float(t))
                w.writerow([name, i, j, repr(float(t)), *[repr(float(c)) for c in p]])
    return buf.getvalue()
