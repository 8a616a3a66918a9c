"""Endpoint relations R between two finite sets x and y.

Pairs are index pairs ``(i, j)`` into ``x.points`` and ``y.points``. A
relation is complete when every point of both sets is touched, reduced
when each pair has an endpoint of degree one, and lambda-proximal when no
pair is longer than ``lambda * d_H(x, y)``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np

from .errors import CapacityError, PreconditionError
from .hyperspace import FiniteSubset, hausdorff_distance
from .metric import TAU, GroundSpace

#: Largest number of candidate pairs the exhaustive search will enumerate.
MAX_CANDIDATE_PAIRS = 20


@dataclass(frozen=True)
class Relation:
    source: FiniteSubset
    target: FiniteSubset
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        pairs = tuple(sorted({(int(i), int(j)) for i, j in self.pairs}))
        if len(pairs) != len(self.pairs):
            raise ValueError("relation contains duplicate pairs")
        n, m = len(self.source), len(self.target)
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < m):
                raise ValueError(f"pair {(i, j)} out of range for |x|={n}, |y|={m}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def of(cls, source: FiniteSubset, target: FiniteSubset, pairs: Any) -> "Relation":
        """Build a relation, silently merging duplicate pairs."""
        return cls(source, target, tuple(sorted({(int(i), int(j)) for i, j in pairs})))

    def __len__(self) -> int:
        return len(self.pairs)

    def left_degrees(self) -> Counter:
        return Counter(i for i, _ in self.pairs)

    def right_degrees(self) -> Counter:
        return Counter(j for _, j in self.pairs)

    def is_complete(self) -> bool:
        return len(self.left_degrees()) == len(self.source) and len(self.right_degrees()) == len(
            self.target
        )

    def to_json(self) -> dict[str, Any]:
        return {"pairs": [[i, j] for i, j in self.pairs]}


@dataclass(frozen=True)
class RelationClassification:
    left_complete: bool
    right_complete: bool
    complete: bool
    reduced: bool
    reduced_complete: bool
    proximality_factor: float
    cardinality: int

    def to_json(self) -> dict[str, Any]:
        out = dict(self.__dict__)
        if math.isinf(self.proximality_factor):
            out["proximality_factor"] = "inf"
        return out


def _pair_lengths(space: GroundSpace, R: Relation) -> np.ndarray:
    if not R.pairs:
        return np.zeros(0)
    idx = np.array(R.pairs)
    P = R.source.coords[idx[:, 0]]
    Q = R.target.coords[idx[:, 1]]
    return np.array([space.distance(p, q) for p, q in zip(P, Q)])


def proximality_factor(space: GroundSpace, R: Relation) -> float:
    """``max_{(a,b) in R} d(a, b) / d_H(x, y)`` with the identity convention at d_H = 0."""
    dh = hausdorff_distance(space, R.source, R.target)
    lengths = _pair_lengths(space, R)
    longest = float(lengths.max()) if lengths.size else 0.0
    if dh == 0.0:
        identity = R.source == R.target and R.pairs == tuple((i, i) for i in range(len(R.source)))
        return 1.0 if identity else math.inf
    return longest / dh


def classify(space: GroundSpace, R: Relation) -> RelationClassification:
    left, right = R.left_degrees(), R.right_degrees()
    lc = len(left) == len(R.source)
    rc = len(right) == len(R.target)
    reduced = all(left[i] <= 1 or right[j] <= 1 for i, j in R.pairs)
    return RelationClassification(
        left_complete=lc,
        right_complete=rc,
        complete=lc and rc,
        reduced=reduced,
        reduced_complete=lc and rc and reduced,
        proximality_factor=proximality_factor(space, R),
        cardinality=len(R),
    )


def _nearest(D: np.ndarray) -> np.ndarray:
    # np.argmin returns the first minimiser: ties go to the smallest index
    return np.argmin(D, axis=1)


def build_proximal_complete(space: GroundSpace, x: FiniteSubset, y: FiniteSubset) -> Relation:
    """Nearest-neighbour relation ``{(i, alpha(i))} u {(beta(j), j)}``.

    Each point is matched to a nearest point of the other set, so every pair
    is at most ``d_H(x, y)`` long and ``|R| <= |x| + |y|``.
    """
    D = space.pairwise(x.coords, y.coords)
    alpha = _nearest(D)
    beta = _nearest(D.T)
    pairs = {(i, int(alpha[i])) for i in range(len(x))}
    pairs |= {(int(beta[j]), j) for j in range(len(y))}
    return Relation.of(x, y, pairs)


def _inessential(pairs: set[tuple[int, int]]) -> list[tuple[int, int]]:
    left = Counter(i for i, _ in pairs)
    right = Counter(j for _, j in pairs)
    return sorted(p for p in pairs if left[p[0]] >= 2 and right[p[1]] >= 2)


def reduce_relation(space: GroundSpace, R: Relation) -> Relation:
    """Drop inessential pairs, lexicographically first each round, until reduced."""
    if not R.is_complete():
        raise PreconditionError("reduce_relation requires a complete relation")
    pairs = set(R.pairs)
    while True:
        cand = _inessential(pairs)
        if not cand:
            return Relation.of(R.source, R.target, pairs)
        pairs.discard(cand[0])


def trim_to_bound(space: GroundSpace, R: Relation) -> Relation:
    """Shrink a nearest-neighbour relation to at most ``|x| + |y| - 2`` pairs.

    The two pairs duplicating the longest nearest-neighbour matches are
    removed first when they are inessential; any remaining excess is removed
    as further inessential pairs. Removing only inessential pairs keeps the
    relation complete, and a reduced complete relation with both sides of
    size >= 2 has at least two connected components, so the bound is met.
    """
    x, y = R.source, R.target
    if len(x) < 2 or len(y) < 2:
        raise PreconditionError("trim_to_bound requires |x| >= 2 and |y| >= 2")
    if not R.is_complete():
        raise PreconditionError("trim_to_bound requires a complete relation")
    bound = len(x) + len(y) - 2
    if len(R) <= bound:
        return R
    pairs = set(R.pairs)

    D = space.pairwise(x.coords, y.coords)
    alpha, beta = _nearest(D), _nearest(D.T)
    i0 = int(np.argmax(D[np.arange(len(x)), alpha]))
    j0 = int(np.argmax(D[beta, np.arange(len(y))]))
    preferred = [(int(beta[alpha[i0]]), int(alpha[i0])), (int(beta[j0]), int(alpha[beta[j0]]))]
    for p in preferred:
        if len(pairs) <= bound:
            break
        if p in pairs and p in _inessential(pairs):
            pairs.discard(p)

    while len(pairs) > bound:
        cand = _inessential(pairs)
        if not cand:  # pragma: no cover - excluded by the component count argument
            raise RuntimeError("no inessential pair left above the cardinality bound")
        pairs.discard(cand[0])
    return Relation.of(x, y, pairs)


def _union_mask(masks: list[int]) -> int:
    acc = 0
    for m in masks:
        acc |= m
    return acc


class MinRelation(NamedTuple):
    relation: Relation | None
    cardinality: int | None

    @property
    def feasible(self) -> bool:
        return self.relation is not None


def brute_force_min_relation(
    space: GroundSpace, x: FiniteSubset, y: FiniteSubset, proximality_bound: float
) -> MinRelation:
    """Smallest complete relation among pairs no longer than ``bound * d_H(x, y)``.

    Subsets of candidate pairs are enumerated by increasing size in
    lexicographic order; the first complete one is returned. Returns
    ``MinRelation(None, None)`` when no complete relation exists within the
    bound. Raises :class:`CapacityError` above ``MAX_CANDIDATE_PAIRS``
    candidates.
    """
    dh = hausdorff_distance(space, x, y)
    D = space.pairwise(x.coords, y.coords)
    limit = proximality_bound * dh + TAU
    cand = [(i, j) for i in range(len(x)) for j in range(len(y)) if D[i, j] <= limit]
    if len(cand) > MAX_CANDIDATE_PAIRS:
        raise CapacityError(
            f"{len(cand)} candidate pairs exceed the enumeration budget of {MAX_CANDIDATE_PAIRS}"
        )
    n, m = len(x), len(y)
    full = (1 << (n + m)) - 1
    masks = [(1 << i) | (1 << (n + j)) for i, j in cand]
    if _union_mask(masks) != full:
        return MinRelation(None, None)
    for k in range(max(n, m), len(cand) + 1):
        for combo in itertools.combinations(range(len(cand)), k):
            acc = 0
            for c in combo:
                acc |= masks[c]
            if acc == full:
                return MinRelation(Relation.of(x, y, [cand[c] for c in combo]), k)
    return MinRelation(None, None)  # pragma: no cover - the full candidate set is complete
