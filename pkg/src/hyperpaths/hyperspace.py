"""Finite subsets of a ground space as points of FS_n(X).

A :class:`FiniteSubset` is always canonical: points validated by the space,
sorted lexicographically by coordinates, and deduplicated at tolerance
``TAU``. Canonical form makes ``hausdorff_distance(A, B) == 0`` equivalent
to ``A == B`` bit for bit.
"""

from __future__ import annotations

from typing import Any, Iterator, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, InvalidSetError
from .metric import TAU, GroundPoint, GroundSpace

# matrix route below this many point pairs, KD-tree route above
_MATRIX_LIMIT = 4_000_000


class FiniteSubset:
    """Canonical nonempty finite point set (immutable)."""

    __slots__ = ("_coords", "_hash")

    def __init__(self, coords: np.ndarray):
        coords = np.ascontiguousarray(coords, dtype=float)
        if coords.ndim != 2 or coords.shape[0] == 0:
            raise InvalidSetError("finite subset must be a nonempty 2-d array of points")
        coords.setflags(write=False)
        self._coords = coords
        self._hash: int | None = None

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def points(self) -> tuple[GroundPoint, ...]:
        return tuple(tuple(float(c) for c in row) for row in self._coords)

    def __len__(self) -> int:
        return self._coords.shape[0]

    def __iter__(self) -> Iterator[GroundPoint]:
        return iter(self.points)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteSubset):
            return NotImplemented
        return self._coords.shape == other._coords.shape and bool(
            np.array_equal(self._coords, other._coords)
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._coords.shape, self._coords.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        pts = [p[0] if len(p) == 1 else p for p in self.points]
        return f"FiniteSubset({pts})"

    def to_json(self) -> dict[str, Any]:
        return {"points": [list(p) for p in self.points]}


def _dedup(space: GroundSpace, P: np.ndarray) -> np.ndarray:
    k = P.shape[0]
    if k <= 1:
        return P
    if k <= 256:
        D = space.pairwise(P, P)
        if np.count_nonzero(D <= TAU) == k:  # only the diagonal
            return P
        keep = np.ones(k, dtype=bool)
        for i in range(k):
            if keep[i]:
                dup = D[i, i + 1 :] <= TAU
                keep[i + 1 :] &= ~dup
        return P[keep]
    if space.kd_p is not None:
        pairs = cKDTree(P).query_pairs(TAU, p=space.kd_p, output_type="ndarray")
        if len(pairs) == 0:
            return P
        keep = np.ones(k, dtype=bool)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        for i, j in pairs[order]:
            if keep[i]:
                keep[j] = False
        return P[keep]
    keep = np.ones(k, dtype=bool)
    for i in range(k):
        if keep[i] and i + 1 < k:
            dup = space.pairwise(P[i : i + 1], P[i + 1 :])[0] <= TAU
            keep[i + 1 :] &= ~dup
    return P[keep]


def canonicalize(space: GroundSpace, points: Any) -> FiniteSubset:
    """Build the canonical finite subset of ``space`` spanned by ``points``.

    ``points`` may be a FiniteSubset, an ``(k, dim)`` array, or a sequence of
    points (bare numbers are accepted for one-dimensional spaces).
    """
    if isinstance(points, FiniteSubset):
        points = points.coords
    P = np.asarray(points, dtype=float)
    if P.size == 0:
        raise InvalidSetError("finite subset must be nonempty")
    P = space.canonical_array(P)
    order = np.lexsort(P.T[::-1])
    return FiniteSubset(_dedup(space, P[order]))


def from_json(space: GroundSpace, obj: Any) -> FiniteSubset:
    """Parse ``{"points": [...]}`` or a bare list of points."""
    if isinstance(obj, dict):
        if set(obj) != {"points"}:
            raise InvalidSetError(f"unexpected keys {sorted(set(obj) - {'points'})}")
        obj = obj["points"]
    if not isinstance(obj, list):
        raise InvalidSetError("points must be a list")
    return canonicalize(space, obj)


def union(space: GroundSpace, *sets: FiniteSubset) -> FiniteSubset:
    return canonicalize(space, np.vstack([s.coords for s in sets]))


def dist_point_set(space: GroundSpace, p: Sequence[float], A: FiniteSubset) -> float:
    """Distance from a ground point to the nearest point of ``A``."""
    p_arr = np.asarray(space.canonical_point(p), dtype=float).reshape(1, -1)
    return float(space.pairwise(p_arr, A.coords).min())


def directed_distances(space: GroundSpace, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """``dist(p, Q)`` for every row p of ``P``."""
    if P.shape[0] * Q.shape[0] <= _MATRIX_LIMIT:
        return space.pairwise(P, Q).min(axis=1)
    if space.kd_p is not None:
        d, _ = cKDTree(Q).query(P, k=1, p=space.kd_p)
        return np.asarray(d, dtype=float)
    step = max(1, _MATRIX_LIMIT // Q.shape[0])
    return np.concatenate(
        [space.pairwise(P[i : i + step], Q).min(axis=1) for i in range(0, P.shape[0], step)]
    )


def hausdorff_distance(space: GroundSpace, A: FiniteSubset, B: FiniteSubset) -> float:
    """Hausdorff distance: the larger of the two directed sup-inf distances."""
    if A.coords.shape[0] * B.coords.shape[0] <= _MATRIX_LIMIT:
        D = space.pairwise(A.coords, B.coords)
        return float(max(D.min(axis=1).max(), D.min(axis=0).max()))
    return float(
        max(
            directed_distances(space, A.coords, B.coords).max(),
            directed_distances(space, B.coords, A.coords).max(),
        )
    )


def consecutive_hausdorff(space: GroundSpace, sets: Sequence[FiniteSubset]) -> np.ndarray:
    """``d_H(sets[i], sets[i + 1])`` for every i, computed in one batch.

    Each set is padded to a common size by repeating its first point, which
    leaves every Hausdorff distance unchanged.
    """
    if len(sets) < 2:
        return np.zeros(0)
    m = max(len(s) for s in sets)
    if (len(sets) - 1) * m * m > _MATRIX_LIMIT:
        return np.array([hausdorff_distance(space, a, b) for a, b in zip(sets, sets[1:])])
    dim = sets[0].coords.shape[1]
    A = np.empty((len(sets), m, dim))
    for i, S in enumerate(sets):
        k = len(S)
        A[i, :k] = S.coords
        A[i, k:] = S.coords[0]
    shape = (len(sets) - 1, m, m, dim)
    P = np.broadcast_to(A[:-1, :, None, :], shape).reshape(-1, dim)
    Q = np.broadcast_to(A[1:, None, :, :], shape).reshape(-1, dim)
    D = space.paired(P, Q).reshape(shape[:3])
    return np.maximum(D.min(axis=2).max(axis=1), D.min(axis=1).max(axis=1))


def hausdorff_matrix(space: GroundSpace, sets: Sequence[FiniteSubset]) -> np.ndarray:
    """All-pairs Hausdorff distances among ``sets`` (symmetric, zero diagonal)."""
    sizes = np.array([len(s) for s in sets])
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    allp = np.vstack([s.coords for s in sets])
    M = allp.shape[0]
    N = len(sets)
    # to_set[p, j] = dist(point p, sets[j])
    to_set = np.empty((M, N))
    step = max(1, _MATRIX_LIMIT // max(M, 1))
    for r0 in range(0, M, step):
        D = space.pairwise(allp[r0 : r0 + step], allp)
        to_set[r0 : r0 + step] = np.minimum.reduceat(D, starts, axis=1)
    directed = np.maximum.reduceat(to_set, starts, axis=0)
    H = np.maximum(directed, directed.T)
    np.fill_diagonal(H, 0.0)
    return H


def diameter(space: GroundSpace, A: FiniteSubset) -> float:
    """Largest pairwise distance within ``A`` (0 for singletons)."""
    if len(A) == 1:
        return 0.0
    return float(space.pairwise(A.coords, A.coords).max())


def in_closed_neighborhood(space: GroundSpace, p: Sequence[float], A: FiniteSubset, r: float) -> bool:
    """Whether ``p`` lies in the closed r-neighbourhood of ``A`` (up to TAU)."""
    if r < 0:
        raise DomainError(f"radius {r} must be nonnegative")
    return dist_point_set(space, p, A) <= r + TAU


def union_bound_check(
    space: GroundSpace, A: FiniteSubset, B: FiniteSubset, C: FiniteSubset, D: FiniteSubset
) -> bool:
    """Check ``d_H(A u B, C u D) <= max(d_H(A, C), d_H(B, D))``."""
    lhs = hausdorff_distance(space, union(space, A, B), union(space, C, D))
    rhs = max(hausdorff_distance(space, A, C), hausdorff_distance(space, B, D))
    return lhs <= rhs + TAU

