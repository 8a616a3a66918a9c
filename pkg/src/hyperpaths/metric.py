"""Ground geodesic spaces: exact distances and points along geodesics.

Every ground point is a tuple of floats. Coordinate spaces use their
coordinates directly; graph spaces use ``(edge_id, offset)``. Arrays of
points are ``(k, dim)`` float64 arrays with one point per row.

Scalar and vectorised distances use the same arithmetic in the same order,
so ``distance(p, q) == pairwise(P, Q)[i, j]`` holds bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import DomainError, InvalidPointError

#: Point-identification tolerance in ground distance units.
TAU = 1e-9
_UNDERFLOW_SNAP = 1e-100

GroundPoint = tuple[float, ...]


def _check_t(t: float) -> float:
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"geodesic parameter t={t} outside [0, 1]")
    return t


class GroundSpace:
    """Base class for ground metric spaces with a geodesic oracle."""

    kind: str = "abstract"
    #: Quasiconvexity constant of the space (1 for geodesic spaces).
    lam: float = 1.0
    #: Minkowski exponent for KD-tree acceleration, or None if unsupported.
    kd_p: float | None = None
    #: True when the space supports lattice epsilon-nets.
    supports_nets: bool = False

    @property
    def dim(self) -> int:
        raise NotImplementedError

    # -- points ---------------------------------------------------------
    def canonical_point(self, p: Sequence[float]) -> GroundPoint:
        """Validate ``p`` and return its canonical coordinates."""
        raise NotImplementedError

    def canonical_array(self, P: Any) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        if P.ndim == 1 and self.dim == 1:
            P = P.reshape(-1, 1)
        if P.ndim != 2 or P.shape[1] != self.dim:
            raise InvalidPointError(
                f"expected points with {self.dim} coordinate(s), got array of shape {P.shape}"
            )
        return np.array([self.canonical_point(row) for row in P], dtype=float).reshape(-1, self.dim)

    # -- metric ---------------------------------------------------------
    def distance(self, p: Sequence[float], q: Sequence[float]) -> float:
        raise NotImplementedError

    def pairwise(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        """Distance matrix between the rows of ``P`` and the rows of ``Q``."""
        return np.array([[self.distance(p, q) for q in Q] for p in P], dtype=float).reshape(
            len(P), len(Q)
        )

    def paired(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        """Row-wise ``distance(P[i], Q[i])``, bit-identical to ``pairwise`` entries."""
        return np.array([self.distance(p, q) for p, q in zip(P, Q)], dtype=float)

    # -- geodesics ------------------------------------------------------
    def geodesic_point(self, p: Sequence[float], q: Sequence[float], t: float) -> GroundPoint:
        raise NotImplementedError

    def geodesic_points(self, P: np.ndarray, Q: np.ndarray, t: float) -> np.ndarray:
        """Row-wise ``geodesic_point(P[i], Q[i], t)``."""
        t = _check_t(t)
        if t == 0.0:
            return np.array(P, dtype=float, copy=True)
        if t == 1.0:
            return np.array(Q, dtype=float, copy=True)
        out = [self.geodesic_point(p, q, t) for p, q in zip(P, Q)]
        return np.array(out, dtype=float).reshape(len(P), self.dim)

    def to_config(self) -> dict[str, Any]:
        raise NotImplementedError


def _finite(p: Sequence[float], dim: int) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.shape[0] != dim:
        raise InvalidPointError(f"expected {dim} coordinate(s), got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidPointError(f"non-finite coordinates {tuple(arr)}")
    return arr


@dataclass(frozen=True)
class EuclideanSpace(GroundSpace):
    """Euclidean space R^d."""

    d: int = 2
    kind = "euclidean"
    kd_p = 2.0
    supports_nets = True

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be positive")

    @property
    def dim(self) -> int:
        return self.d

    def canonical_point(self, p: Sequence[float]) -> GroundPoint:
        return tuple(float(c) for c in self.canonical_array(_finite(p, self.d).reshape(1, -1))[0])

    def canonical_array(self, P: Any) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        if P.ndim == 1 and self.d == 1:
            P = P.reshape(-1, 1)
        if P.ndim != 2 or P.shape[1] != self.d:
            raise InvalidPointError(
                f"expected points with {self.d} coordinate(s), got array of shape {P.shape}"
            )
        A = np.abs(P)
        if A.size and not A.max() < np.inf:  # also catches NaN
            raise InvalidPointError("non-finite coordinates")
        # squares of differences below ~1e-154 underflow, which would give
        # distinct points distance 0; such coordinates are far below TAU
        tiny = A < _UNDERFLOW_SNAP
        if tiny.any():
            P = np.where(tiny, 0.0, P)
        return P + 0.0  # folds -0.0 into 0.0

    def distance(self, p: Sequence[float], q: Sequence[float]) -> float:
        s = 0.0
        for a, b in zip(p, q):
            diff = float(a) - float(b)
            s += diff * diff
        return math.sqrt(s)

    def pairwise(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        # accumulate coordinate by coordinate, same order as distance()
        diff = P[:, 0][:, None] - Q[:, 0][None, :]
        s = diff * diff
        for c in range(1, self.d):
            diff = P[:, c][:, None] - Q[:, c][None, :]
            s += diff * diff
        return np.sqrt(s, out=s)

    def paired(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        diff = P[:, 0] - Q[:, 0]
        s = diff * diff
        for c in range(1, self.d):
            diff = P[:, c] - Q[:, c]
            s += diff * diff
        return np.sqrt(s, out=s)

    def geodesic_point(self, p: Sequence[float], q: Sequence[float], t: float) -> GroundPoint:
        t = _check_t(t)
        if t == 0.0:
            return tuple(float(c) for c in p)
        if t == 1.0:
            return tuple(float(c) for c in q)
        return tuple(float(a) + t * (float(b) - float(a)) for a, b in zip(p, q))

    def geodesic_points(self, P: np.ndarray, Q: np.ndarray, t: float) -> np.ndarray:
        t = _check_t(t)
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        if t == 0.0:
            return P.copy()
        if t == 1.0:
            return Q.copy()
        return P + t * (Q - P)

    def to_config(self) -> dict[str, Any]:
        return {"kind": "euclidean", "dim": self.d}


@dataclass(frozen=True)
class TaxicabCross(GroundSpace):
    """Union of the two coordinate axes of R^2 with the taxicab metric.

    Geodesics between points on different axes pass through the origin;
    points on a common axis are joined by the straight segment.
    """

    kind = "taxicab-cross"
    kd_p = 1.0
    supports_nets = True

    @property
    def dim(self) -> int:
        return 2

    def canonical_point(self, p: Sequence[float]) -> GroundPoint:
        x, y = _finite(p, 2)
        if abs(x) <= TAU and abs(y) <= TAU:
            return (0.0, 0.0)
        if abs(y) <= TAU:
            return (float(x) + 0.0, 0.0)
        if abs(x) <= TAU:
            return (0.0, float(y) + 0.0)
        raise InvalidPointError(f"point {(float(x), float(y))} is not on the coordinate axes")

    def distance(self, p: Sequence[float], q: Sequence[float]) -> float:
        return abs(float(p[0]) - float(q[0])) + abs(float(p[1]) - float(q[1]))

    def pairwise(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        return np.abs(P[:, 0][:, None] - Q[:, 0][None, :]) + np.abs(
            P[:, 1][:, None] - Q[:, 1][None, :]
        )

    def paired(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        return np.abs(P[:, 0] - Q[:, 0]) + np.abs(P[:, 1] - Q[:, 1])

    @staticmethod
    def _axis(p: Sequence[float]) -> int | None:
        if p[0] == 0.0 and p[1] == 0.0:
            return None
        return 0 if p[1] == 0.0 else 1

    def geodesic_point(self, p: Sequence[float], q: Sequence[float], t: float) -> GroundPoint:
        t = _check_t(t)
        p = (float(p[0]), float(p[1]))
        q = (float(q[0]), float(q[1]))
        if t == 0.0:
            return p
        if t == 1.0:
            return q
        ap, aq = self._axis(p), self._axis(q)
        if ap is None or aq is None or ap == aq:
            return (p[0] + t * (q[0] - p[0]) + 0.0, p[1] + t * (q[1] - p[1]) + 0.0)
        np_, nq = abs(p[0]) + abs(p[1]), abs(q[0]) + abs(q[1])
        s = t * (np_ + nq)
        if s <= np_:
            f = 1.0 - s / np_
            return (p[0] * f + 0.0, p[1] * f + 0.0)
        f = (s - np_) / nq
        return (q[0] * f + 0.0, q[1] * f + 0.0)

    def to_config(self) -> dict[str, Any]:
        return {"kind": "taxicab-cross"}


@dataclass(frozen=True)
class WeightedGraph(GroundSpace):
    """Metric graph: edges are intervals of their weight, glued at vertices.

    Points are ``(edge_id, offset)`` with ``0 <= offset <= weight``, offset
    measured from the edge's first endpoint. Vertices are stored on their
    smallest-id incident edge.
    """

    n_vertices: int = 0
    edges: tuple[tuple[int, int, float], ...] = ()
    kind = "graph"
    _apsp: np.ndarray = field(init=False, repr=False, compare=False)
    _adj: np.ndarray = field(init=False, repr=False, compare=False)
    _arr: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        edges = tuple((int(u), int(v), float(w)) for u, v, w in self.edges)
        object.__setattr__(self, "edges", edges)
        n = int(self.n_vertices)
        if n < 1 or not edges:
            raise ValueError("graph needs at least one vertex and one edge")
        adj = np.full((n, n), np.inf)
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a missing vertex")
            if u == v:
                raise ValueError("self-loops are not supported")
            if not (w > 0.0 and math.isfinite(w)):
                raise ValueError(f"edge weight {w} must be positive and finite")
            adj[u, v] = adj[v, u] = min(adj[u, v], w)
        dense = np.where(np.isfinite(adj), adj, 0.0)
        ncomp, _ = connected_components(dense, directed=False)
        if ncomp != 1:
            raise ValueError("graph must be connected")
        apsp = shortest_path(dense, method="D", directed=False)
        apsp = np.minimum(apsp, apsp.T)  # exact symmetry despite per-source rounding
        object.__setattr__(self, "_apsp", apsp)
        object.__setattr__(self, "_adj", adj)
        arr = np.array(edges, dtype=float)
        object.__setattr__(
            self, "_arr", (arr[:, 0].astype(int), arr[:, 1].astype(int), arr[:, 2])
        )

    @property
    def dim(self) -> int:
        return 2

    @property
    def apsp(self) -> np.ndarray:
        return self._apsp

    def vertex(self, v: int) -> GroundPoint:
        """Canonical point for vertex ``v``."""
        for eid, (u, w_, wt) in enumerate(self.edges):
            if u == v:
                return (float(eid), 0.0)
            if w_ == v:
                return (float(eid), wt)
        raise InvalidPointError(f"vertex {v} has no incident edge")

    def canonical_point(self, p: Sequence[float]) -> GroundPoint:
        e, s = _finite(p, 2)
        if e != int(e) or not (0 <= int(e) < len(self.edges)):
            raise InvalidPointError(f"unknown edge id {e}")
        u, v, w = self.edges[int(e)]
        if s < -TAU or s > w + TAU:
            raise InvalidPointError(f"offset {s} outside edge {int(e)} of length {w}")
        if s <= TAU:
            return self.vertex(u)
        if s >= w - TAU:
            return self.vertex(v)
        return (float(int(e)), float(s))

    def distance(self, p: Sequence[float], q: Sequence[float]) -> float:
        e1, s1 = int(p[0]), float(p[1])
        e2, s2 = int(q[0]), float(q[1])
        u1, v1, w1 = self.edges[e1]
        u2, v2, w2 = self.edges[e2]
        D = self._apsp
        # offsets are summed first so that swapping p and q gives the same bits
        best = min(
            (s1 + s2) + D[u1, u2],
            (s1 + (w2 - s2)) + D[u1, v2],
            ((w1 - s1) + s2) + D[v1, u2],
            ((w1 - s1) + (w2 - s2)) + D[v1, v2],
        )
        if e1 == e2:
            best = min(best, abs(s1 - s2))
        return float(best)

    def _broadcast_distance(self, e1, s1, e2, s2) -> np.ndarray:
        U, V, W = self._arr
        D = self._apsp
        u1, v1, w1 = U[e1], V[e1], W[e1]
        u2, v2, w2 = U[e2], V[e2], W[e2]
        best = np.minimum(
            np.minimum((s1 + s2) + D[u1, u2], (s1 + (w2 - s2)) + D[u1, v2]),
            np.minimum(((w1 - s1) + s2) + D[v1, u2], ((w1 - s1) + (w2 - s2)) + D[v1, v2]),
        )
        same = e1 == e2
        return np.where(same, np.minimum(best, np.abs(s1 - s2)), best)

    def pairwise(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        return self._broadcast_distance(
            P[:, 0].astype(int)[:, None], P[:, 1][:, None],
            Q[:, 0].astype(int)[None, :], Q[:, 1][None, :],
        )

    def paired(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        return self._broadcast_distance(P[:, 0].astype(int), P[:, 1], Q[:, 0].astype(int), Q[:, 1])

    # -- geodesics ------------------------------------------------------
    def _vertex_path(self, a: int, b: int) -> list[int]:
        """Lexicographically smallest shortest vertex path from a to b."""
        D, adj = self._apsp, self._adj
        path = [a]
        cur = a
        scale = max(1.0, float(D[a, b]))
        while cur != b:
            for w in range(self.n_vertices):
                if w != cur and np.isfinite(adj[cur, w]):
                    if abs(adj[cur, w] + D[w, b] - D[cur, b]) <= 1e-12 * scale:
                        path.append(w)
                        cur = w
                        break
            else:  # pragma: no cover - APSP guarantees a successor
                raise RuntimeError("shortest path reconstruction failed")
        return path

    def _edge_between(self, a: int, b: int) -> int:
        w = self._adj[a, b]
        for eid, (u, v, wt) in enumerate(self.edges):
            if {u, v} == {a, b} and wt == w:
                return eid
        raise RuntimeError(f"no edge between {a} and {b}")  # pragma: no cover

    def _route(self, p: Sequence[float], q: Sequence[float]) -> list[tuple[int, float, float]]:
        """Segments ``(edge, from_offset, to_offset)`` of the chosen geodesic."""
        e1, s1 = int(p[0]), float(p[1])
        e2, s2 = int(q[0]), float(q[1])
        u1, v1, w1 = self.edges[e1]
        u2, v2, w2 = self.edges[e2]
        D = self._apsp
        cands: list[tuple[float, tuple[int, ...], list[tuple[int, float, float]]]] = []
        if e1 == e2:
            cands.append((abs(s1 - s2), (), [(e1, s1, s2)]))
        for a, off_a, end_a in ((u1, s1, 0.0), (v1, w1 - s1, w1)):
            for b, off_b, end_b in ((u2, s2, 0.0), (v2, w2 - s2, w2)):
                length = off_a + D[a, b] + off_b
                verts = self._vertex_path(a, b)
                segs = [(e1, s1, end_a)]
                for x0, x1 in zip(verts, verts[1:]):
                    eid = self._edge_between(x0, x1)
                    eu, _, ew = self.edges[eid]
                    segs.append((eid, 0.0, ew) if eu == x0 else (eid, ew, 0.0))
                segs.append((e2, end_b, s2))
                cands.append((float(length), tuple(verts), segs))
        best = min(c[0] for c in cands)
        tied = [c for c in cands if c[0] <= best + TAU]
        tied.sort(key=lambda c: c[1])
        return [seg for seg in tied[0][2] if seg[1] != seg[2]]

    def geodesic_point(self, p: Sequence[float], q: Sequence[float], t: float) -> GroundPoint:
        t = _check_t(t)
        if t == 0.0:
            return (float(p[0]), float(p[1]))
        if t == 1.0:
            return (float(q[0]), float(q[1]))
        segs = self._route(p, q)
        total = sum(abs(b - a) for _, a, b in segs)
        remaining = t * total
        for eid, a, b in segs:
            seg_len = abs(b - a)
            if remaining <= seg_len:
                off = a + remaining if b >= a else a - remaining
                return self.canonical_point((eid, off))
            remaining -= seg_len
        return (float(q[0]), float(q[1]))

    def to_config(self) -> dict[str, Any]:
        return {
            "kind": "graph",
            "vertices": self.n_vertices,
            "edges": [[u, v, w] for u, v, w in self.edges],
        }


@dataclass(frozen=True)
class ScaledQuasiconvex(GroundSpace):
    """A geodesic base space carrying a declared quasiconvexity constant.

    Distances and geodesics come from ``base`` unchanged; only ``lam`` is
    reported differently, which scales every declared Lipschitz constant.
    """

    base: GroundSpace = field(default_factory=lambda: EuclideanSpace(2))
    lam: float = 1.0
    kind = "scaled"

    def __post_init__(self) -> None:
        if not self.lam >= 1.0:
            raise ValueError("quasiconvexity constant must be >= 1")

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def kd_p(self) -> float | None:  # type: ignore[override]
        return self.base.kd_p

    @property
    def supports_nets(self) -> bool:  # type: ignore[override]
        return self.base.supports_nets

    def canonical_point(self, p: Sequence[float]) -> GroundPoint:
        return self.base.canonical_point(p)

    def canonical_array(self, P: Any) -> np.ndarray:
        return self.base.canonical_array(P)

    def distance(self, p: Sequence[float], q: Sequence[float]) -> float:
        return self.base.distance(p, q)

    def pairwise(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        return self.base.pairwise(P, Q)

    def paired(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        return self.base.paired(P, Q)

    def geodesic_point(self, p: Sequence[float], q: Sequence[float], t: float) -> GroundPoint:
        return self.base.geodesic_point(p, q, t)

    def geodesic_points(self, P: np.ndarray, Q: np.ndarray, t: float) -> np.ndarray:
        return self.base.geodesic_points(P, Q, t)

    def to_config(self) -> dict[str, Any]:
        return {"kind": "scaled", "base": self.base.to_config(), "lambda": self.lam}


def ground_distance(space: GroundSpace, p: Sequence[float], q: Sequence[float]) -> float:
    """Distance between two points of ``space`` after validating both."""
    return space.distance(space.canonical_point(p), space.canonical_point(q))


def geodesic_point(space: GroundSpace, p: Sequence[float], q: Sequence[float], t: float) -> GroundPoint:
    """Point at parameter ``t`` on the space's constant-speed geodesic from p to q."""
    _check_t(t)
    return space.geodesic_point(space.canonical_point(p), space.canonical_point(q), t)


_SHORT_NAMES = {"cross": "taxicab-cross", "taxicab": "taxicab-cross", "taxicab-cross": "taxicab-cross"}


def space_from_config(cfg: Any) -> GroundSpace:
    """Build a space from a config dict or a short name like ``r2`` or ``cross``."""
    if isinstance(cfg, str):
        name = cfg.strip().lower()
        if name in _SHORT_NAMES:
            return TaxicabCross()
        if name.startswith("r") and name[1:].isdigit():
            return EuclideanSpace(int(name[1:]))
        raise ValueError(f"unknown space name {cfg!r}")
    if not isinstance(cfg, dict):
        raise ValueError("space config must be a name or an object")
    kind = cfg.get("kind")
    required = {"graph": ("vertices", "edges"), "scaled": ("base", "lambda")}.get(kind, ())
    missing = [k for k in required if k not in cfg]
    if missing:
        raise ValueError(f"{kind} space config is missing {', '.join(missing)}")
    if kind == "euclidean":
        return EuclideanSpace(int(cfg.get("dim", 2)))
    if kind in ("taxicab-cross", "cross"):
        return TaxicabCross()
    if kind == "graph":
        return WeightedGraph(int(cfg["vertices"]), tuple(tuple(e) for e in cfg["edges"]))
    if kind == "scaled":
        return ScaledQuasiconvex(space_from_config(cfg["base"]), float(cfg["lambda"]))
    raise ValueError(f"unknown space kind {kind!r}")
