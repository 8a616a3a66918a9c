"""Sharpness constructions: spaced pairs in FS_n and the taxicab FS^2 obstruction.

A spaced pair x, y has no z in FS_n with ``max(d_H(x, z), d_H(z, y)) <
d_H(x, y)``; the midpoint of any lambda-quasigeodesic from x to y then
forces ``lambda >= 2``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError
from .hyperspace import FiniteSubset, canonicalize, hausdorff_distance
from .metric import TAU, EuclideanSpace, GroundSpace, TaxicabCross

#: Gap between consecutive groups, in units of epsilon.
GROUP_GAP = 8.0
#: Grid constant c in the acceptance threshold ``d_H - delta * c``.
GRID_CONSTANT = 5.0


@dataclass(frozen=True)
class SpacedPairInstance:
    space: GroundSpace
    x: FiniteSubset
    y: FiniteSubset
    epsilon: float
    groups: tuple[FiniteSubset, ...]
    group_sizes: tuple[int, ...]
    s: int
    n: int
    variant: str = "groups"

    @property
    def k(self) -> int:
        return len(self.groups)

    def to_json(self) -> dict[str, Any]:
        return {
            "space": self.space.to_config(),
            "x": self.x.to_json(),
            "y": self.y.to_json(),
            "epsilon": self.epsilon,
            "groups": [g.to_json() for g in self.groups],
            "group_sizes": list(self.group_sizes),
            "s": self.s,
            "n": self.n,
            "variant": self.variant,
        }


def _embed(space: EuclideanSpace, coords: list[float]) -> np.ndarray:
    out = np.zeros((len(coords), space.d))
    out[:, 0] = coords
    return out


def generate_spaced_pair(
    space: GroundSpace | None = None,
    n: int = 3,
    s: int = 2,
    epsilon: float = 1.0,
    variant: str = "groups",
) -> SpacedPairInstance:
    """Place x and y along the first coordinate axis as a spaced pair.

    ``variant="groups"`` builds s three-point groups (diameter 2*eps, lone
    point at the middle) and k - s two-point groups (diameter eps), where
    ``2n = s + 2k``; groups are ``GROUP_GAP * eps`` apart.
    ``variant="two-group"`` builds ``{x_1..x_{n-1}, y_n}`` and
    ``{y_1..y_{n-1}, x_n}``, each a star of radius eps, which forces a proximal
    relation of size ``2n - 2``; it needs a plane when n > 3.
    """
    space = space if space is not None else EuclideanSpace(1)
    if not isinstance(space, EuclideanSpace):
        raise DomainError("spaced pairs are generated in Euclidean spaces")
    if n < 3:
        raise DomainError("spaced pairs need n >= 3")
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    eps = float(epsilon)
    if variant == "two-group":
        return _two_group(space, n, eps)
    if variant != "groups":
        raise DomainError(f"unknown variant {variant!r}")
    if s < 2 or s % 2 or (2 * n - s) % 2:
        raise DomainError(f"s={s} must be even and at least 2")
    k = (2 * n - s) // 2
    if k < s:
        raise DomainError(f"(n={n}, s={s}) gives k={k} groups, fewer than the s={s} triples")

    xs: list[float] = []
    ys: list[float] = []
    groups: list[list[float]] = []
    sizes: list[int] = []
    pos = 0.0
    for g in range(k):
        if g < s:
            # alternate which set supplies the two outer points
            outer, lone = (xs, ys) if g % 2 == 0 else (ys, xs)
            outer.extend([pos, pos + 2 * eps])
            lone.append(pos + eps)
            groups.append([pos, pos + eps, pos + 2 * eps])
            width = 2 * eps
        else:
            xs.append(pos)
            ys.append(pos + eps)
            groups.append([pos, pos + eps])
            width = eps
        sizes.append(len(groups[-1]))
        pos += width + GROUP_GAP * eps
    return SpacedPairInstance(
        space=space,
        x=canonicalize(space, _embed(space, xs)),
        y=canonicalize(space, _embed(space, ys)),
        epsilon=eps,
        groups=tuple(canonicalize(space, _embed(space, g)) for g in groups),
        group_sizes=tuple(sizes),
        s=s,
        n=n,
    )


def _two_group(space: EuclideanSpace, n: int, eps: float) -> SpacedPairInstance:
    m = n - 1
    if m > 2 and space.d < 2:
        raise DomainError("the two-group variant needs dimension >= 2 when n > 3")
    angles = 2 * math.pi * np.arange(m) / m
    ring = np.zeros((m, space.d))
    ring[:, 0] = eps * np.cos(angles)
    if space.d > 1:
        ring[:, 1] = eps * np.sin(angles)
    ring = np.round(ring, 15) + 0.0
    shift = np.zeros(space.d)
    shift[0] = 2 * eps + GROUP_GAP * eps
    centre = np.zeros((1, space.d))
    x = np.vstack([ring, centre + shift])
    y = np.vstack([ring + shift, centre])
    group_a = np.vstack([ring, centre])
    group_b = np.vstack([ring + shift, centre + shift])
    return SpacedPairInstance(
        space=space,
        x=canonicalize(space, x),
        y=canonicalize(space, y),
        epsilon=eps,
        groups=(canonicalize(space, group_a), canonicalize(space, group_b)),
        group_sizes=(n, n),
        s=0,
        n=n,
        variant="two-group",
    )


@dataclass(frozen=True)
class SpacedPairReport:
    hausdorff: float
    delta: float
    grid_constant: float
    min_max_value: float
    certified_lower_bound: float
    threshold: float
    implied_lambda_lower_bound: float
    group_min_values: tuple[tuple[float, ...], ...]
    covering_counts: tuple[int, ...]
    covering_total: int
    counting_witness: bool
    passed: bool
    lattice_sizes: tuple[int, ...] = field(default=())

    def to_json(self) -> dict[str, Any]:
        return {
            "hausdorff": self.hausdorff,
            "grid": {
                "delta": self.delta,
                "grid_constant": self.grid_constant,
                "lattice_sizes": list(self.lattice_sizes),
            },
            "min_max_value": self.min_max_value,
            "certified_lower_bound": self.certified_lower_bound,
            "threshold": self.threshold,
            "implied_lambda_lower_bound": self.implied_lambda_lower_bound,
            "group_min_values": [list(v) for v in self.group_min_values],
            "covering_counts": list(self.covering_counts),
            "covering_total": self.covering_total,
            "counting_witness": self.counting_witness,
            "passed": self.passed,
        }


def _group_values(
    space: GroundSpace, inst: SpacedPairInstance, group: FiniteSubset, lattice: np.ndarray
) -> list[float]:
    """Best local objective with 1..|group| lattice points near ``group``."""
    cover = space.pairwise(group.coords, lattice)
    # a z-point s adds max(dist(s, x), dist(s, y)) to the objective
    pen = np.maximum(
        space.pairwise(lattice, inst.x.coords).min(axis=1),
        space.pairwise(lattice, inst.y.coords).min(axis=1),
    )
    best = []
    for c in range(1, len(group) + 1):
        combos = np.array(list(itertools.combinations(range(lattice.shape[0]), c)), dtype=np.intp)
        value = np.empty(len(combos))
        chunk = 200_000
        for lo in range(0, len(combos), chunk):
            cb = combos[lo : lo + chunk]
            reach = cover[:, cb].min(axis=2).max(axis=0)
            value[lo : lo + chunk] = np.maximum(reach, pen[cb].max(axis=1))
        best.append(float(value.min()))
    return best


def verify_spaced_pair(
    space: GroundSpace,
    inst: SpacedPairInstance,
    delta: float,
    grid_constant: float = GRID_CONSTANT,
) -> SpacedPairReport:
    """Grid search for a set z in FS_n close to both x and y.

    Candidate points lie on a delta-lattice along the instance's line within
    epsilon of some group: projecting onto the line never increases the
    objective, points farther than epsilon from x u y already cost more than
    d_H, and the groups' neighbourhoods are disjoint so the search splits
    into independent per-group searches combined over allocations of at
    most n points. Snapping an optimal z to the lattice moves each point by
    at most delta/2, so ``min_max - delta/2`` lower-bounds the true minimum.
    """
    if inst.variant != "groups":
        raise DomainError("grid verification applies to the grouped construction")
    eps = inst.epsilon
    if delta > eps / 4:
        raise DomainError(f"grid spacing {delta} is coarser than epsilon/4 = {eps / 4}")
    if not delta > 0:
        raise DomainError("grid spacing must be positive")
    dh = hausdorff_distance(space, inst.x, inst.y)
    d = inst.x.coords.shape[1]

    lattices = []
    for g in inst.groups:
        lo, hi = g.coords[:, 0].min() - eps, g.coords[:, 0].max() + eps
        ks = np.arange(math.ceil(lo / delta - 1e-9), math.floor(hi / delta + 1e-9) + 1)
        lat = np.zeros((len(ks), d))
        lat[:, 0] = ks * delta
        lattices.append(lat)

    tables: list[list[float]] = []
    for gi, (g, lat) in enumerate(zip(inst.groups, lattices)):
        others = np.vstack([lt for j, lt in enumerate(lattices) if j != gi])
        # no point of this group's lattice: members are served from other groups
        empty = float(space.pairwise(g.coords, others).min(axis=1).max())
        tables.append([empty] + _group_values(space, inst, g, lat))

    def value(c: int, table: list[float]) -> float:
        return table[min(c, len(table) - 1)]

    best = math.inf
    for alloc in itertools.product(*[range(len(t)) for t in tables]):
        if sum(alloc) <= inst.n:
            best = min(best, max(value(c, t) for c, t in zip(alloc, tables)))

    counts = tuple(
        next((c for c in range(len(t)) if t[c] < dh - TAU), len(t)) for t in tables
    )
    total = sum(counts)
    certified = best - delta / 2
    threshold = dh - delta * grid_constant
    return SpacedPairReport(
        hausdorff=dh,
        delta=delta,
        grid_constant=grid_constant,
        min_max_value=best,
        certified_lower_bound=certified,
        threshold=threshold,
        implied_lambda_lower_bound=2.0 * certified / dh,
        group_min_values=tuple(tuple(t[1:]) for t in tables),
        covering_counts=counts,
        covering_total=total,
        counting_witness=total >= inst.n + 1,
        passed=certified >= threshold and total >= inst.n + 1,
        lattice_sizes=tuple(len(lt) for lt in lattices),
    )


def midpoint_lambda_bound(space: GroundSpace, x: FiniteSubset, y: FiniteSubset, path: Any) -> float:
    """Smallest lambda compatible with the midpoint of a constant-speed path."""
    mid = path.evaluate(0.5)
    worst = max(hausdorff_distance(space, x, mid), hausdorff_distance(space, mid, y))
    return 2.0 * worst / hausdorff_distance(space, x, y)


@dataclass(frozen=True)
class TaxicabReport:
    A: FiniteSubset
    B: FiniteSubset
    hausdorff: float
    delta: float
    radius: float
    feasible: tuple[tuple[float, float], ...]
    max_offset: float
    contained_in_origin_ball: bool
    sanity_radius: float
    sanity_extent: float
    obstruction: bool

    def to_json(self) -> dict[str, Any]:
        return {
            "A": self.A.to_json(),
            "B": self.B.to_json(),
            "hausdorff": self.hausdorff,
            "delta": self.delta,
            "radius": self.radius,
            "feasible_region": [list(p) for p in self.feasible],
            "max_offset_from_origin": self.max_offset,
            "contained_in_origin_ball": self.contained_in_origin_ball,
            "sanity": {"radius": self.sanity_radius, "extent": self.sanity_extent},
            "obstruction": self.obstruction,
        }


def _cross_scan(space: TaxicabCross, A: FiniteSubset, B: FiniteSubset, r: float, delta: float) -> np.ndarray:
    reach = float(np.abs(np.vstack([A.coords, B.coords])).max()) + r
    ks = np.arange(-math.ceil(reach / delta), math.ceil(reach / delta) + 1) * delta
    ks = ks[ks != 0.0]
    z = np.zeros_like(ks)
    pts = np.vstack([[[0.0, 0.0]], np.column_stack([ks, z]), np.column_stack([z, ks])])
    dA = space.pairwise(pts, A.coords).min(axis=1)
    dB = space.pairwise(pts, B.coords).min(axis=1)
    return pts[(dA <= r + TAU) & (dB <= r + TAU)]


def taxicab_fs2_obstruction(delta: float = 0.01, sanity_radius: float = 1.5) -> TaxicabReport:
    """Scan ``N_1(A) n N_1(B)`` on the taxicab cross for A = {(1,0),(0,1)}, B = -A.

    Any geodesic midpoint between A and B must lie in that intersection;
    the scan shows it is the origin alone, so no two-point midpoint exists.
    """
    space = TaxicabCross()
    A = canonicalize(space, [(1.0, 0.0), (0.0, 1.0)])
    B = canonicalize(space, [(-1.0, 0.0), (0.0, -1.0)])
    dh = hausdorff_distance(space, A, B)
    feas = _cross_scan(space, A, B, dh / 2, delta)
    offsets = np.abs(feas).sum(axis=1)
    max_off = float(offsets.max()) if len(feas) else math.inf
    wide = _cross_scan(space, A, B, sanity_radius, delta)
    extent = float(np.abs(wide).sum(axis=1).max()) if len(wide) else 0.0
    contained = len(feas) > 0 and max_off <= delta
    return TaxicabReport(
        A=A,
        B=B,
        hausdorff=dh,
        delta=delta,
        radius=dh / 2,
        feasible=tuple((float(p[0]), float(p[1])) for p in feas),
        max_offset=max_off,
        contained_in_origin_ball=contained,
        sanity_radius=sanity_radius,
        sanity_extent=extent,
        obstruction=contained and dh == 2.0,
    )
