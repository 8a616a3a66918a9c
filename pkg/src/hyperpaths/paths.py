"""Hausdorff paths in FS_n(X): synthesis, evaluation and certification.

A :class:`PathBundle` is a finite family of piecewise-geodesic ground paths
indexed by a relation; its value at ``t`` is the set of leg positions.
Paths are certified on dyadic grids ``{l / 2**depth}``: lengths are sums of
Hausdorff steps (lower bounds that grow with depth) and Lipschitz
estimates are maxima of difference quotients over all grid pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Protocol, Sequence

import numpy as np

from .errors import CapabilityError, CapViolationError, DomainError, PreconditionError
from .hyperspace import (
    FiniteSubset,
    canonicalize,
    consecutive_hausdorff,
    directed_distances,
    hausdorff_distance,
    hausdorff_matrix,
)
from .metric import TAU, EuclideanSpace, GroundPoint, GroundSpace, ScaledQuasiconvex, TaxicabCross
from .relations import Relation, build_proximal_complete, reduce_relation

DEFAULT_DEPTH = 8
#: Relative slack allowed when comparing an estimate to a declared constant.
REL_TOL = 1e-6


class HausdorffPath(Protocol):
    source: FiniteSubset
    target: FiniteSubset
    declared_L: float

    def evaluate(self, t: float) -> FiniteSubset: ...


def dyadic_grid(depth: int) -> np.ndarray:
    if depth < 0:
        raise DomainError("depth must be nonnegative")
    return np.arange(2**depth + 1, dtype=float) / float(2**depth)


@dataclass(frozen=True)
class Leg:
    """Piecewise-geodesic ground path through ``points`` at parameters ``knots``."""

    points: np.ndarray
    knots: tuple[float, ...] = (0.0, 1.0)

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] != len(self.knots) or pts.shape[0] < 2:
            raise ValueError("a leg needs one breakpoint per knot and at least two knots")
        k = self.knots
        if k[0] != 0.0 or k[-1] != 1.0 or any(b <= a for a, b in zip(k, k[1:])):
            raise ValueError("leg knots must increase strictly from 0 to 1")
        object.__setattr__(self, "points", pts)

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    def at(self, space: GroundSpace, t: float) -> GroundPoint:
        if t <= 0.0:
            return tuple(self.points[0])
        if t >= 1.0:
            return tuple(self.points[-1])
        i = int(np.searchsorted(self.knots, t, side="right")) - 1
        a, b = self.knots[i], self.knots[i + 1]
        return space.geodesic_point(self.points[i], self.points[i + 1], (t - a) / (b - a))


@dataclass(frozen=True)
class PathBundle:
    space: GroundSpace
    relation: Relation
    legs: tuple[Leg, ...]
    cap: int
    declared_L: float

    @property
    def source(self) -> FiniteSubset:
        return self.relation.source

    @property
    def target(self) -> FiniteSubset:
        return self.relation.target

    @cached_property
    def straight_ends(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Stacked leg endpoints when every leg is a single geodesic, else None."""
        if any(len(leg.knots) != 2 for leg in self.legs):
            return None
        return np.vstack([leg.start for leg in self.legs]), np.vstack([leg.end for leg in self.legs])

    def evaluate(self, t: float) -> FiniteSubset:
        return evaluate(self.space, self, t)


@dataclass(frozen=True)
class ConcatenatedPath:
    """``first`` on [0, 1/2] and ``second`` on [1/2, 1], each at double speed."""

    first: Any
    second: Any

    def __post_init__(self) -> None:
        if self.first.target != self.second.source:
            raise PreconditionError("concatenated paths must share the junction set")

    @property
    def source(self) -> FiniteSubset:
        return self.first.source

    @property
    def target(self) -> FiniteSubset:
        return self.second.target

    @property
    def declared_L(self) -> float:
        return 2.0 * max(self.first.declared_L, self.second.declared_L)

    def evaluate(self, t: float) -> FiniteSubset:
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"path parameter {t} outside [0, 1]")
        if t <= 0.5:
            return self.first.evaluate(2.0 * t)
        return self.second.evaluate(2.0 * t - 1.0)


@dataclass(frozen=True)
class SampledHausdorffPath:
    ts: tuple[float, ...]
    sets: tuple[FiniteSubset, ...]
    declared_L: float = math.nan

    def __post_init__(self) -> None:
        ts = tuple(float(t) for t in self.ts)
        if len(ts) != len(self.sets) or len(ts) < 2:
            raise ValueError("need one set per sample and at least two samples")
        if ts[0] != 0.0 or ts[-1] != 1.0 or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("sample parameters must increase strictly from 0 to 1")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "sets", tuple(self.sets))

    @property
    def source(self) -> FiniteSubset:
        return self.sets[0]

    @property
    def target(self) -> FiniteSubset:
        return self.sets[-1]

    def evaluate(self, t: float) -> FiniteSubset:
        i = int(np.searchsorted(self.ts, t))
        for k in (i - 1, i):
            if 0 <= k < len(self.ts) and abs(self.ts[k] - t) <= 1e-12:
                return self.sets[k]
        raise DomainError(f"sampled path has no sample at t={t}")


def sample_path(path: HausdorffPath, ts: Sequence[float]) -> list[FiniteSubset]:
    return [path.evaluate(float(t)) for t in ts]


# -- synthesis ---------------------------------------------------------


def synthesize_bundle(
    space: GroundSpace, x: FiniteSubset, y: FiniteSubset, R: Relation, cap: int
) -> PathBundle:
    """One constant-speed geodesic leg per pair of a complete relation.

    The declared Lipschitz constant is ``lam_space * max_{(i,j)} d(x_i, y_j)``.
    """
    if R.source != x or R.target != y:
        raise PreconditionError("relation endpoints do not match x and y")
    if not R.is_complete():
        raise PreconditionError("synthesize_bundle requires a complete relation")
    if cap < max(len(x), len(y)):
        raise PreconditionError(f"cap {cap} is below max(|x|, |y|) = {max(len(x), len(y))}")
    legs = tuple(Leg(np.vstack([x.coords[i], y.coords[j]])) for i, j in R.pairs)
    longest = max(space.distance(x.coords[i], y.coords[j]) for i, j in R.pairs)
    return PathBundle(space, R, legs, int(cap), space.lam * longest)


def evaluate(space: GroundSpace, bundle: PathBundle, t: float) -> FiniteSubset:
    """Canonical set of leg positions at ``t``; raises if it exceeds the cap."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"path parameter {t} outside [0, 1]")
    if t == 0.0:
        return bundle.source
    if t == 1.0:
        return bundle.target
    ends = bundle.straight_ends
    if ends is not None:
        pts = space.geodesic_points(ends[0], ends[1], t)
    else:
        pts = np.array([leg.at(space, t) for leg in bundle.legs], dtype=float)
    out = canonicalize(space, pts)
    if len(out) > bundle.cap:
        raise CapViolationError(
            f"bundle evaluates to {len(out)} points at t={t}, above the cap {bundle.cap}"
        )
    return out


def _locate(space: GroundSpace, S: FiniteSubset, p: np.ndarray) -> int:
    d = space.pairwise(p.reshape(1, -1), S.coords)[0]
    i = int(np.argmin(d))
    if d[i] > TAU:  # pragma: no cover - callers pass points of S
        raise PreconditionError("point not found in set")
    return i


@dataclass(frozen=True)
class TwoLegPath:
    """Result of the two-leg construction through an intermediate set ``z``."""

    leg1: PathBundle
    leg2: PathBundle
    z: FiniteSubset
    relation: Relation
    x_moving: tuple[int, ...] = field(default=())
    x_staying: tuple[int, ...] = field(default=())
    y_moving: tuple[int, ...] = field(default=())
    y_staying: tuple[int, ...] = field(default=())

    @property
    def path(self) -> ConcatenatedPath:
        return ConcatenatedPath(self.leg1, self.leg2)

    @property
    def source(self) -> FiniteSubset:
        return self.leg1.source

    @property
    def target(self) -> FiniteSubset:
        return self.leg2.target

    @property
    def declared_L(self) -> float:
        return self.path.declared_L

    def evaluate(self, t: float) -> FiniteSubset:
        return self.path.evaluate(t)


def two_leg_quasiconvex_path(space: GroundSpace, x: FiniteSubset, y: FiniteSubset, n: int) -> TwoLegPath:
    """Join x to y inside FS_n through ``z = x'' u y''`` with two synthesized legs.

    From a reduced proximal complete relation R, ``x'`` are the points of x
    with a single partner (sent along ``f``) and ``y'`` the points of y with a
    single partner that are not matched one-to-one (pulled back along ``g``).
    ``x'' = g(y')`` stays put on the first leg, ``y'' = f(x')`` on the second.
    Both legs are ``lam * d_H(x, y)``-Lipschitz, so the concatenation has
    length at most ``2 * lam * d_H(x, y)``.
    """
    if len(x) > n or len(y) > n:
        raise PreconditionError(f"|x|={len(x)} and |y|={len(y)} must not exceed n={n}")
    R = reduce_relation(space, build_proximal_complete(space, x, y))
    if x == y:
        ident = Relation.of(x, x, [(i, i) for i in range(len(x))])
        b = synthesize_bundle(space, x, x, ident, n)
        return TwoLegPath(b, b, x, R, (), tuple(range(len(x))), (), tuple(range(len(y))))

    left, right = R.left_degrees(), R.right_degrees()
    f = {i: j for i, j in R.pairs if left[i] == 1}
    g = {j: i for i, j in R.pairs if right[j] == 1}
    y0 = {j for j, i in g.items() if f.get(i) == j}
    x_prime = sorted(f)
    y_prime = sorted(j for j in g if j not in y0)
    x_dprime = sorted({g[j] for j in y_prime})
    y_dprime = sorted({f[i] for i in x_prime})

    z = canonicalize(space, np.vstack([x.coords[x_dprime], y.coords[y_dprime]]))
    zx = {i: _locate(space, z, x.coords[i]) for i in x_dprime}
    zy = {j: _locate(space, z, y.coords[j]) for j in y_dprime}

    R1 = Relation.of(x, z, [(i, zy[f[i]]) for i in x_prime] + [(i, zx[i]) for i in x_dprime])
    R2 = Relation.of(z, y, [(zx[g[j]], j) for j in y_prime] + [(zy[j], j) for j in y_dprime])
    leg1 = synthesize_bundle(space, x, z, R1, n)
    leg2 = synthesize_bundle(space, z, y, R2, n)
    return TwoLegPath(
        leg1, leg2, z, R, tuple(x_prime), tuple(x_dprime), tuple(y_prime), tuple(y_dprime)
    )


# -- canonical interpolation ------------------------------------------


def _net_base(space: GroundSpace) -> GroundSpace:
    base = space.base if isinstance(space, ScaledQuasiconvex) else space
    if not isinstance(base, (EuclideanSpace, TaxicabCross)):
        raise CapabilityError(f"epsilon-nets are not available for space kind {space.kind!r}")
    return base


def _lattice(base: GroundSpace, A: FiniteSubset, B: FiniteSubset, radius: float, eps: float) -> np.ndarray:
    both = np.vstack([A.coords, B.coords])
    if isinstance(base, TaxicabCross):
        lo = int(math.floor((both.min() - radius) / eps))
        hi = int(math.ceil((both.max() + radius) / eps))
        ks = np.arange(lo, hi + 1, dtype=float) * eps
        ks = ks[ks != 0.0]
        zeros = np.zeros_like(ks)
        return np.vstack([[[0.0, 0.0]], np.column_stack([ks, zeros]), np.column_stack([zeros, ks])])
    lo_a, hi_a = A.coords.min(axis=0) - radius, A.coords.max(axis=0) + radius
    lo_b, hi_b = B.coords.min(axis=0) - radius, B.coords.max(axis=0) + radius
    lo, hi = np.maximum(lo_a, lo_b), np.minimum(hi_a, hi_b)
    axes = [
        np.arange(math.floor(l / eps), math.ceil(h / eps) + 1, dtype=float) * eps
        for l, h in zip(lo, hi)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.reshape(-1) for m in mesh]) + 0.0


class _NetSetup:
    def __init__(self, space: GroundSpace, A: FiniteSubset, B: FiniteSubset, lam: float, eps: float):
        if not lam > 1.0:
            raise DomainError(f"canonical interpolation needs lambda > 1, got {lam}")
        if not eps > 0.0:
            raise DomainError("net resolution must be positive")
        base = _net_base(space)
        self.space = space
        self.eps = eps
        self.L = lam * hausdorff_distance(space, A, B)
        pts = _lattice(base, A, B, self.L + eps, eps)
        dA = directed_distances(space, pts, A.coords)
        dB = directed_distances(space, pts, B.coords)
        keep = (dA <= self.L + eps) & (dB <= self.L + eps)
        self.pts, self.dA, self.dB = pts[keep], dA[keep], dB[keep]

    def at(self, t: float) -> FiniteSubset:
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"path parameter {t} outside [0, 1]")
        mask = (self.dA <= t * self.L + self.eps) & (self.dB <= (1.0 - t) * self.L + self.eps)
        if not mask.any():  # pragma: no cover - a net of spacing eps always hits the region
            raise RuntimeError(f"empty net intersection at t={t}")
        return canonicalize(self.space, self.pts[mask])


def canonical_interpolation(
    space: GroundSpace, A: FiniteSubset, B: FiniteSubset, lam: float, t: float, net_resolution: float
) -> FiniteSubset:
    """Net approximation of ``N_{tL}(A) n N_{(1-t)L}(B)`` with ``L = lam * d_H(A, B)``.

    Net points within ``net_resolution`` of each neighbourhood boundary are
    kept, so the result is within ``net_resolution`` of the exact set.
    """
    return _NetSetup(space, A, B, lam, net_resolution).at(float(t))


def canonical_interpolation_path(
    space: GroundSpace,
    A: FiniteSubset,
    B: FiniteSubset,
    lam: float,
    ts: Sequence[float],
    net_resolution: float,
) -> SampledHausdorffPath:
    """Sample the canonical interpolation at every parameter in ``ts``."""
    setup = _NetSetup(space, A, B, lam, net_resolution)
    sets = [setup.at(float(t)) for t in ts]
    return SampledHausdorffPath(tuple(ts), tuple(sets), setup.L)


# -- certification -----------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    length_lower_bound: float
    lipschitz_estimate: float
    quasiconvexity_ratio: float
    endpoint_distance: float
    declared_L: float
    grid_depth: int | None
    grid_resolution: int
    passed: bool

    def to_json(self) -> dict[str, Any]:
        out = dict(self.__dict__)
        for k, v in out.items():
            if isinstance(v, float) and not math.isfinite(v):
                out[k] = str(v)
        return out


def _grid(path: Any, depth: int | None) -> np.ndarray:
    if depth is None:
        if not isinstance(path, SampledHausdorffPath):
            raise DomainError("depth is required for paths that are not sampled")
        return np.array(path.ts)
    return dyadic_grid(depth)


def path_length_estimate(space: GroundSpace, path: Any, depth: int | None = DEFAULT_DEPTH) -> float:
    """Length of the inscribed polygon over the dyadic partition of ``depth``.

    With ``depth=None`` a sampled path uses its own sample parameters.
    """
    sets = sample_path(path, _grid(path, depth))
    return float(sum(consecutive_hausdorff(space, sets).tolist()))


def _ratio(length: float, dh: float) -> float:
    if dh > 0.0:
        return length / dh
    return 1.0 if length <= TAU else math.inf


def lipschitz_certificate(
    space: GroundSpace, path: Any, declared_L: float, grid_depth: int | None = DEFAULT_DEPTH
) -> Certificate:
    """Grid evidence for the claim that ``path`` is ``declared_L``-Lipschitz.

    The estimate is the largest ``d_H(g(t), g(t')) / |t - t'|`` over all
    pairs of grid parameters; the certificate passes when it does not exceed
    ``declared_L * (1 + 1e-6)``.
    """
    ts = _grid(path, grid_depth)
    sets = sample_path(path, ts)
    H = hausdorff_matrix(space, sets)
    dt = np.abs(ts[:, None] - ts[None, :])
    np.fill_diagonal(dt, 1.0)
    estimate = float((H / dt).max())
    length = float(np.sum(H[np.arange(len(ts) - 1), np.arange(1, len(ts))]))
    dh = float(H[0, -1])
    # absolute 1e-12 absorbs float noise on constant paths
    passed = estimate <= declared_L * (1.0 + REL_TOL) + 1e-12
    return Certificate(
        length_lower_bound=length,
        lipschitz_estimate=estimate,
        quasiconvexity_ratio=_ratio(length, dh),
        endpoint_distance=dh,
        declared_L=float(declared_L),
        grid_depth=grid_depth,
        grid_resolution=len(ts) - 1,
        passed=bool(passed),
    )


def constant_speed_reparametrize(
    space: GroundSpace, path: Any, depth: int = DEFAULT_DEPTH
) -> SampledHausdorffPath:
    """Re-knot samples so chord length per unit parameter is constant.

    Sampled paths keep their sets and get new parameters proportional to
    cumulative chord length; other paths are first sampled on the dyadic
    grid of ``depth``. Zero-length input is returned unchanged.
    """
    if isinstance(path, SampledHausdorffPath):
        sampled = path
    else:
        ts = dyadic_grid(depth)
        sampled = SampledHausdorffPath(tuple(ts), tuple(sample_path(path, ts)), path.declared_L)
    chords = consecutive_hausdorff(space, sampled.sets)
    total = float(chords.sum())
    if total <= TAU:
        return sampled
    # repeated sets would give repeated parameters; keep the first of each run
    keep = np.concatenate([[True], chords > 0.0])
    cum = np.concatenate([[0.0], np.cumsum(chords)])[keep]
    sets = [s for s, k in zip(sampled.sets, keep) if k]
    new_ts = cum / total
    new_ts[-1] = 1.0
    return SampledHausdorffPath(tuple(new_ts), tuple(sets), total)


def speed_deviation(space: GroundSpace, path: SampledHausdorffPath) -> float:
    """Largest relative deviation of chord/step from the mean speed."""
    ts = np.array(path.ts)
    chords = consecutive_hausdorff(space, path.sets)
    speeds = chords / np.diff(ts)
    mean = chords.sum()
    if mean <= 0.0:
        return 0.0
    return float(np.max(np.abs(speeds - mean)) / mean)


# -- component extraction ---------------------------------------------


@dataclass(frozen=True)
class ComponentPath:
    ts: tuple[float, ...]
    points: tuple[GroundPoint, ...]
    lipschitz: float

    def to_json(self) -> dict[str, Any]:
        return {
            "samples": [[t, list(p)] for t, p in zip(self.ts, self.points)],
            "lipschitz": self.lipschitz,
        }


def extract_component_path(
    space: GroundSpace, path: Any, a: Sequence[float], depth: int | None = DEFAULT_DEPTH
) -> ComponentPath:
    """Greedy Lipschitz selection through the sampled sets starting at ``a``.

    Each step moves to a nearest point of the next sampled set (smallest
    canonical index on ties), so every step is at most the Hausdorff step.
    """
    ts = _grid(path, depth)
    sets = sample_path(path, ts)
    a_arr = np.asarray(space.canonical_point(a), dtype=float)
    d0 = space.pairwise(a_arr.reshape(1, -1), sets[0].coords)[0]
    i = int(np.argmin(d0))
    if d0[i] > TAU:
        raise PreconditionError(f"start point {tuple(a_arr)} is not in the initial set")
    cur = sets[0].coords[i]
    chosen = [cur]
    worst = 0.0
    for k in range(1, len(sets)):
        d = space.pairwise(cur.reshape(1, -1), sets[k].coords)[0]
        j = int(np.argmin(d))
        worst = max(worst, float(d[j]) / float(ts[k] - ts[k - 1]))
        cur = sets[k].coords[j]
        chosen.append(cur)
    return ComponentPath(
        tuple(float(t) for t in ts), tuple(tuple(float(c) for c in p) for p in chosen), worst
    )
