"""Finite subsets and ordered tuples over a Hadamard backend.

``FiniteSubset`` models an element of the space of nonempty subsets with at
most n points under the Hausdorff metric; ``PointTuple`` models an element
of the n-fold product space.  Conversions between the two are the bridge
the retraction machinery is built on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import (
    GeometryError,
    Point,
    SpaceDescriptor,
    SpaceMismatchError,
    point_from_json,
    point_sort_key,
    point_to_json,
    space_from_json,
    space_to_json,
)


@dataclass(frozen=True)
class PointTuple:
    """Ordered tuple of points, an element of the product space."""

    space: SpaceDescriptor
    coords: tuple[Point, ...]

    def __post_init__(self) -> None:
        coords = tuple(self.coords)
        if not coords:
            raise GeometryError("a tuple needs at least one coordinate")
        for p in coords:
            if p.kind != self.space.kind:
                raise SpaceMismatchError(f"coordinate of kind {p.kind!r} in {self.space.kind!r} tuple")
        object.__setattr__(self, "coords", coords)

    def __len__(self) -> int:
        return len(self.coords)

    def to_json(self):
        return {
            "space": space_to_json(self.space),
            "coords": [point_to_json(self.space, p) for p in self.coords],
        }

    @staticmethod
    def from_json(obj) -> "PointTuple":
        if not isinstance(obj, dict) or "space" not in obj or "coords" not in obj:
            raise GeometryError('tuple JSON must carry "space" and "coords"')
        space = space_from_json(obj["space"])
        return PointTuple(space, tuple(point_from_json(space, c) for c in obj["coords"]))


@dataclass(frozen=True)
class FiniteSubset:
    """Canonical nonempty finite subset: deduplicated, deterministically ordered.

    Stored points are pairwise more than ``dedup_tolerance`` apart and sorted
    by their canonical serialization, so value equality is set equality.
    Build instances with :func:`make_subset` (or :func:`to_set`), which merge
    near-duplicates; the constructor itself rejects non-canonical input.
    """

    space: SpaceDescriptor
    points: tuple[Point, ...]
    # construction record only; two subsets with the same points are equal
    dedup_tolerance: float = field(default=0.0, compare=False)

    def __post_init__(self) -> None:
        points = tuple(self.points)
        if not points:
            raise GeometryError("a finite subset needs at least one point")
        if self.dedup_tolerance < 0.0:
            raise GeometryError("dedup tolerance must be >= 0")
        for p in points:
            if p.kind != self.space.kind:
                raise SpaceMismatchError(f"point of kind {p.kind!r} in {self.space.kind!r} subset")
        keys = [point_sort_key(self.space, p) for p in points]
        if any(a > b for a, b in zip(keys, keys[1:])):
            raise GeometryError("points are not in canonical order; use make_subset")
        for i in range(len(points) - 1):
            for j in range(i + 1, len(points)):
                if self.space.distance(points[i], points[j]) <= self.dedup_tolerance:
                    raise GeometryError("points closer than the dedup tolerance; use make_subset")
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return len(self.points)

    def to_json(self):
        return {
            "space": space_to_json(self.space),
            "points": [point_to_json(self.space, p) for p in self.points],
        }

    @staticmethod
    def from_json(obj) -> "FiniteSubset":
        if not isinstance(obj, dict) or "space" not in obj or "points" not in obj:
            raise GeometryError('subset JSON must carry "space" and "points"')
        space = space_from_json(obj["space"])
        return make_subset(space, [point_from_json(space, c) for c in obj["points"]], 0.0)


def _clusters(space: SpaceDescriptor, points: list[Point], tol: float) -> list[list[int]]:
    # Single linkage: indices within tol are chained into one cluster.
    # Discovery order follows the input order, so results are deterministic.
    n = len(points)
    seen = [False] * n
    out = []
    for i in range(n):
        if seen[i]:
            continue
        cluster = [i]
        seen[i] = True
        frontier = [i]
        while frontier:
            a = frontier.pop(0)
            for b in range(n):
                if not seen[b] and space.distance(points[a], points[b]) <= tol:
                    seen[b] = True
                    cluster.append(b)
                    frontier.append(b)
        out.append(cluster)
    return out


def make_subset(space: SpaceDescriptor, points, dedup_tolerance: float = 0.0) -> FiniteSubset:
    """Canonicalize raw points into a ``FiniteSubset``.

    Points within ``dedup_tolerance`` of each other (by chained single
    linkage) are replaced by one representative, built by folding the
    cluster through pairwise geodesic midpoints in discovery order.
    """
    pts = [space.canonicalize(p) for p in points]
    if not pts:
        raise GeometryError("a finite subset needs at least one point")
    if dedup_tolerance < 0.0:
        raise GeometryError("dedup tolerance must be >= 0")
    while True:
        clusters = _clusters(space, pts, dedup_tolerance)
        if len(clusters) == len(pts):
            break
        merged = []
        for cluster in clusters:
            rep = pts[cluster[0]]
            for idx in cluster[1:]:
                rep = space.geodesic_point(rep, pts[idx], 0.5)
            merged.append(rep)
        pts = merged  # folded representatives may themselves sit within tol
    pts.sort(key=lambda p: point_sort_key(space, p))
    return FiniteSubset(space, tuple(pts), dedup_tolerance)


def _check_same_space(a, b) -> None:
    if a.space != b.space:
        raise SpaceMismatchError("operands live in different spaces")


def hausdorff_distance(a: FiniteSubset, b: FiniteSubset) -> float:
    """Hausdorff distance: the larger of the two directed max-min distances."""
    _check_same_space(a, b)
    space = a.space
    worst = 0.0
    for p in a.points:
        worst = max(worst, min(space.distance(p, q) for q in b.points))
    for q in b.points:
        worst = max(worst, min(space.distance(p, q) for p in a.points))
    return worst


def product_distance(x: PointTuple, y: PointTuple) -> float:
    """l2 product metric: sqrt of the sum of squared coordinate distances."""
    _check_same_space(x, y)
    if len(x) != len(y):
        raise GeometryError(f"tuple lengths differ: {len(x)} vs {len(y)}")
    return math.sqrt(sum(x.space.distance(p, q) ** 2 for p, q in zip(x.coords, y.coords)))


def min_gap(x: PointTuple) -> float:
    """Smallest pairwise coordinate distance; needs at least two coordinates."""
    if len(x) < 2:
        raise GeometryError("min gap needs at least two coordinates")
    space = x.space
    pts = x.coords
    return min(
        space.distance(pts[i], pts[j])
        for i in range(len(pts) - 1)
        for j in range(i + 1, len(pts))
    )


def max_spread(x: PointTuple) -> float:
    """Largest pairwise coordinate distance; needs at least two coordinates."""
    if len(x) < 2:
        raise GeometryError("max spread needs at least two coordinates")
    space = x.space
    pts = x.coords
    return max(
        space.distance(pts[i], pts[j])
        for i in range(len(pts) - 1)
        for j in range(i + 1, len(pts))
    )


def to_set(x: PointTuple, tol: float) -> FiniteSubset:
    """Collapse a tuple to the subset of its coordinates, merging within tol."""
    return make_subset(x.space, x.coords, tol)


def embed(a: FiniteSubset) -> FiniteSubset:
    """Identity inclusion of a subset into any larger-cardinality subset space.

    Subsets are represented the same way at every cardinality bound, so the
    embedding is the identity; it exists to make that contract explicit.
    """
    return a


def order_tuple(a: FiniteSubset, pad_to: int) -> PointTuple:
    """Deterministic numbering of a subset as a ``pad_to``-tuple.

    The closest pair comes first (ties broken by serialized order), the
    remaining points follow in canonical order, and the last point repeats
    to reach length ``pad_to``.  Singletons repeat their only point.
    """
    if pad_to < 1:
        raise GeometryError("pad_to must be >= 1")
    if len(a) > pad_to:
        raise GeometryError(f"cannot number {len(a)} points as a {pad_to}-tuple")
    pts = list(a.points)
    if len(pts) >= 2:
        space = a.space
        best = None
        for i in range(len(pts) - 1):
            for j in range(i + 1, len(pts)):
                d = space.distance(pts[i], pts[j])
                if best is None or d < best[0]:
                    best = (d, i, j)
        _, i, j = best
        first = [pts[i], pts[j]]
        rest = [p for k, p in enumerate(pts) if k not in (i, j)]
        pts = first + rest
    coords = pts + [pts[-1]] * (pad_to - len(pts))
    return PointTuple(a.space, tuple(coords))
