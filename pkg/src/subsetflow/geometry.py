"""Hadamard-space backends: distances, geodesics, and CAT(0) self-audits.

Three concrete spaces of nonpositive curvature are provided: Euclidean
space, the hyperboloid model of hyperbolic space, and metric trees.  All
space and point values are immutable, and every operation is a pure
function of its arguments, so the module is safe to use from concurrent
samplers.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import ClassVar, NamedTuple, Union

# Tolerance for the Minkowski constraint <x,x> = -1 on hyperboloid input.
HYPERBOLOID_CONSTRAINT_TOL = 1e-9

# Random hyperboloid points are capped at this distance from the apex so
# cosh factors stay well conditioned in double precision.
HYPERBOLOID_SAMPLE_CAP = 3.0

# Below this separation the sinh interpolation formula degenerates to 0/0;
# an affine blend plus reprojection is exact to well past double precision.
_SMALL_ANGLE = 1e-8


class GeometryError(ValueError):
    """Invalid point, space, or operation parameter."""


class SpaceMismatchError(GeometryError):
    """A point was used with a space of a different kind."""


class Point(NamedTuple):
    """Backend-tagged point.

    ``data`` holds a coordinate tuple for the euclidean and hyperboloid
    backends and an ``(edge_id, offset)`` pair for trees.
    """

    kind: str
    data: tuple


def _check_kind(space, p: Point) -> None:
    if not isinstance(p, Point) or p.kind != space.kind:
        got = getattr(p, "kind", type(p).__name__)
        raise SpaceMismatchError(f"point of kind {got!r} used with {space.kind!r} space")


def _check_t(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise GeometryError(f"geodesic parameter must lie in [0, 1], got {t}")


@dataclass(frozen=True)
class EuclideanSpace:
    """R^dim with the usual metric; geodesics are straight segments."""

    dim: int
    kind: ClassVar[str] = "euclidean"

    def __post_init__(self) -> None:
        if not isinstance(self.dim, int) or self.dim < 1:
            raise GeometryError(f"dimension must be a positive integer, got {self.dim!r}")

    def point(self, coords) -> Point:
        data = tuple(float(c) for c in coords)
        if len(data) != self.dim:
            raise GeometryError(f"expected {self.dim} coordinates, got {len(data)}")
        if not all(math.isfinite(c) for c in data):
            raise GeometryError("coordinates must be finite")
        return Point(self.kind, data)

    def distance(self, p: Point, q: Point) -> float:
        _check_kind(self, p)
        _check_kind(self, q)
        return math.dist(p.data, q.data)

    def geodesic_point(self, p: Point, q: Point, t: float) -> Point:
        _check_kind(self, p)
        _check_kind(self, q)
        _check_t(t)
        if t == 0.0 or p == q:
            return p
        if t == 1.0:
            return q
        return Point(self.kind, tuple(a + t * (b - a) for a, b in zip(p.data, q.data)))

    def random_point(self, rng: random.Random) -> Point:
        return Point(self.kind, tuple(rng.gauss(0.0, 1.0) for _ in range(self.dim)))

    def canonicalize(self, p: Point) -> Point:
        return p

    def point_to_json(self, p: Point):
        _check_kind(self, p)
        return list(p.data)

    def point_from_json(self, obj) -> Point:
        if not isinstance(obj, (list, tuple)):
            raise GeometryError("euclidean point JSON must be a coordinate array")
        return self.point(obj)

    def to_json(self):
        return {"kind": self.kind, "dim": self.dim}


@dataclass(frozen=True)
class HyperboloidSpace:
    """Hyperbolic space as the upper sheet of <x,x> = -1 in Minkowski R^{dim+1}.

    Points carry dim+1 coordinates with x0 > 0, accepted when the constraint
    holds within ``HYPERBOLOID_CONSTRAINT_TOL``.  Every interpolation is
    reprojected onto the sheet before it is returned.
    """

    dim: int
    kind: ClassVar[str] = "hyperboloid"

    def __post_init__(self) -> None:
        if not isinstance(self.dim, int) or self.dim < 1:
            raise GeometryError(f"dimension must be a positive integer, got {self.dim!r}")

    @staticmethod
    def minkowski(u: tuple, v: tuple) -> float:
        s = -u[0] * v[0]
        for a, b in zip(u[1:], v[1:]):
            s += a * b
        return s

    def point(self, coords) -> Point:
        data = tuple(float(c) for c in coords)
        if len(data) != self.dim + 1:
            raise GeometryError(f"expected {self.dim + 1} coordinates, got {len(data)}")
        if not all(math.isfinite(c) for c in data):
            raise GeometryError("coordinates must be finite")
        if data[0] <= 0.0:
            raise GeometryError("hyperboloid points need a positive time coordinate")
        if abs(self.minkowski(data, data) + 1.0) > HYPERBOLOID_CONSTRAINT_TOL:
            raise GeometryError("point is off the hyperboloid sheet")
        return Point(self.kind, data)

    def distance(self, p: Point, q: Point) -> float:
        _check_kind(self, p)
        _check_kind(self, q)
        # Algebraically arcosh(-<p,q>), but evaluated through the Minkowski
        # norm of the difference: the arcosh form loses half the significant
        # digits for separations near sqrt(eps), which merge detection needs.
        diff = tuple(a - b for a, b in zip(p.data, q.data))
        md = -diff[0] * diff[0]
        for c in diff[1:]:
            md += c * c
        if md <= 0.0:
            return 0.0
        return 2.0 * math.asinh(0.5 * math.sqrt(md))

    def _project(self, raw: tuple) -> Point:
        s = raw[0] * raw[0]
        for c in raw[1:]:
            s -= c * c
        if s <= 0.0 or raw[0] <= 0.0:
            raise GeometryError("interpolation left the hyperboloid sheet")
        inv = 1.0 / math.sqrt(s)
        return Point(self.kind, tuple(c * inv for c in raw))

    def geodesic_point(self, p: Point, q: Point, t: float) -> Point:
        _check_kind(self, p)
        _check_kind(self, q)
        _check_t(t)
        if t == 0.0 or p == q:
            return p
        if t == 1.0:
            return q
        theta = self.distance(p, q)
        if theta < _SMALL_ANGLE:
            raw = tuple(a + t * (b - a) for a, b in zip(p.data, q.data))
        else:
            sh = math.sinh(theta)
            wp = math.sinh((1.0 - t) * theta) / sh
            wq = math.sinh(t * theta) / sh
            raw = tuple(wp * a + wq * b for a, b in zip(p.data, q.data))
        return self._project(raw)

    def random_point(self, rng: random.Random) -> Point:
        gauss = [rng.gauss(0.0, 1.0) for _ in range(self.dim)]
        r = math.sqrt(sum(g * g for g in gauss))
        if r < 1e-12:
            return Point(self.kind, (1.0,) + (0.0,) * self.dim)
        length = min(r, HYPERBOLOID_SAMPLE_CAP)
        scale = math.sinh(length) / r
        return Point(self.kind, (math.cosh(length),) + tuple(g * scale for g in gauss))

    def canonicalize(self, p: Point) -> Point:
        return p

    def point_to_json(self, p: Point):
        _check_kind(self, p)
        return list(p.data)

    def point_from_json(self, obj) -> Point:
        if not isinstance(obj, (list, tuple)):
            raise GeometryError("hyperboloid point JSON must be a coordinate array")
        return self.point(obj)

    def to_json(self):
        return {"kind": self.kind, "dim": self.dim}


@dataclass(frozen=True)
class TreeEdge:
    id: int
    from_node: int
    to_node: int
    length: float

    def __post_init__(self) -> None:
        if self.from_node == self.to_node:
            raise GeometryError(f"edge {self.id} is a self-loop")
        if not (math.isfinite(self.length) and self.length > 0.0):
            raise GeometryError(f"edge {self.id} needs a positive finite length")

    def other(self, node: int) -> int:
        return self.to_node if node == self.from_node else self.from_node

    def endpoint_offset(self, node: int) -> float:
        return 0.0 if node == self.from_node else self.length


@dataclass(frozen=True)
class TreeTopology:
    """A finite combinatorial tree with positive edge lengths."""

    edges: tuple[TreeEdge, ...]
    nodes: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        edges = tuple(self.edges)
        if not edges:
            raise GeometryError("a tree space needs at least one edge")
        ids = [e.id for e in edges]
        if len(set(ids)) != len(ids):
            raise GeometryError("edge ids must be unique")
        nodes = sorted({e.from_node for e in edges} | {e.to_node for e in edges})
        if len(edges) != len(nodes) - 1:
            raise GeometryError("edge count must be node count minus one (acyclic, connected)")
        adjacency: dict[int, list[int]] = {v: [] for v in nodes}
        for e in edges:
            adjacency[e.from_node].append(e.to_node)
            adjacency[e.to_node].append(e.from_node)
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            u = stack.pop()
            for v in adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != len(nodes):
            raise GeometryError("tree is not connected")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "nodes", tuple(nodes))

    def to_json(self):
        return [
            {"id": e.id, "from": e.from_node, "to": e.to_node, "length": e.length}
            for e in self.edges
        ]

    @staticmethod
    def from_json(obj) -> "TreeTopology":
        if not isinstance(obj, (list, tuple)):
            raise GeometryError("tree edges JSON must be an array")
        edges = []
        for item in obj:
            try:
                edges.append(
                    TreeEdge(
                        id=int(item["id"]),
                        from_node=int(item["from"]),
                        to_node=int(item["to"]),
                        length=float(item["length"]),
                    )
                )
            except (KeyError, TypeError) as exc:
                raise GeometryError(f"malformed tree edge entry: {item!r}") from exc
        return TreeTopology(tuple(edges))


@dataclass(frozen=True)
class TreeSpace:
    """A metric tree; points live on edges as (edge_id, offset) pairs.

    Offsets are measured from an edge's ``from`` endpoint.  A vertex has
    one canonical representation: the lowest-id incident edge, with the
    offset at whichever end of that edge the vertex occupies.  All node
    distances and next-hop pointers are precomputed, so the instance is
    immutable after construction.
    """

    topology: TreeTopology
    _edge_by_id: dict = field(init=False, repr=False, compare=False)
    _vertex_rep: dict = field(init=False, repr=False, compare=False)
    _node_dist: dict = field(init=False, repr=False, compare=False)
    _next_edge: dict = field(init=False, repr=False, compare=False)
    kind: ClassVar[str] = "tree"

    def __post_init__(self) -> None:
        topo = self.topology
        edge_by_id = {e.id: e for e in topo.edges}
        incident: dict[int, list[TreeEdge]] = {v: [] for v in topo.nodes}
        for e in topo.edges:
            incident[e.from_node].append(e)
            incident[e.to_node].append(e)
        vertex_rep = {}
        for v, edges in incident.items():
            e = min(edges, key=lambda e: e.id)
            vertex_rep[v] = Point(self.kind, (e.id, e.endpoint_offset(v)))
        # One BFS per target node yields distances plus, for every other
        # node, the first edge on the unique path toward that target.
        node_dist: dict[int, dict[int, float]] = {}
        next_edge: dict[int, dict[int, TreeEdge]] = {v: {} for v in topo.nodes}
        for target in topo.nodes:
            dist = {target: 0.0}
            stack = [target]
            while stack:
                u = stack.pop()
                for e in incident[u]:
                    w = e.other(u)
                    if w not in dist:
                        dist[w] = dist[u] + e.length
                        next_edge[w][target] = e
                        stack.append(w)
            node_dist[target] = dist
        object.__setattr__(self, "_edge_by_id", edge_by_id)
        object.__setattr__(self, "_vertex_rep", vertex_rep)
        object.__setattr__(self, "_node_dist", node_dist)
        object.__setattr__(self, "_next_edge", next_edge)

    def point(self, place) -> Point:
        try:
            edge_id, offset = place
        except (TypeError, ValueError) as exc:
            raise GeometryError("tree point is an (edge_id, offset) pair") from exc
        edge = self._edge_by_id.get(edge_id)
        if edge is None:
            raise GeometryError(f"unknown edge id {edge_id!r}")
        offset = float(offset)
        if not (math.isfinite(offset) and 0.0 <= offset <= edge.length):
            raise GeometryError(f"offset {offset} outside [0, {edge.length}] on edge {edge_id}")
        return self.canonicalize(Point(self.kind, (edge.id, offset)))

    def canonicalize(self, p: Point) -> Point:
        edge = self._edge_by_id[p.data[0]]
        offset = p.data[1]
        if offset == 0.0:
            return self._vertex_rep[edge.from_node]
        if offset == edge.length:
            return self._vertex_rep[edge.to_node]
        return p

    def distance(self, p: Point, q: Point) -> float:
        _check_kind(self, p)
        _check_kind(self, q)
        e1, o1 = p.data
        e2, o2 = q.data
        if e1 == e2:
            return abs(o1 - o2)
        try:
            a = self._edge_by_id[e1]
            b = self._edge_by_id[e2]
        except KeyError as exc:
            raise SpaceMismatchError(f"edge id {exc.args[0]!r} does not belong to this tree") from exc
        dist = self._node_dist
        best = o1 + dist[a.from_node][b.from_node] + o2
        best = min(best, o1 + dist[a.from_node][b.to_node] + (b.length - o2))
        best = min(best, (a.length - o1) + dist[a.to_node][b.from_node] + o2)
        best = min(best, (a.length - o1) + dist[a.to_node][b.to_node] + (b.length - o2))
        return best

    def _walk_from_node(self, start: int, target_edge: TreeEdge, target_offset: float,
                        target_node: int, s: float) -> Point:
        # Walk arclength s from a vertex toward a point on target_edge whose
        # nearer endpoint (along this route) is target_node.
        u = start
        while u != target_node:
            e = self._next_edge[u][target_node]
            if s < e.length:
                off = s if u == e.from_node else e.length - s
                return self.canonicalize(Point(self.kind, (e.id, off)))
            s -= e.length
            u = e.other(u)
        if target_node == target_edge.from_node:
            off = min(s, target_offset)
        else:
            off = max(target_edge.length - s, target_offset)
        return self.canonicalize(Point(self.kind, (target_edge.id, off)))

    def geodesic_point(self, p: Point, q: Point, t: float) -> Point:
        _check_kind(self, p)
        _check_kind(self, q)
        _check_t(t)
        if t == 0.0 or p == q:
            return p
        if t == 1.0:
            return q
        e1, o1 = p.data
        e2, o2 = q.data
        if e1 == e2:
            return self.canonicalize(Point(self.kind, (e1, o1 + t * (o2 - o1))))
        try:
            a = self._edge_by_id[e1]
            b = self._edge_by_id[e2]
        except KeyError as exc:
            raise SpaceMismatchError(f"edge id {exc.args[0]!r} does not belong to this tree") from exc
        dist = self._node_dist
        routes = []
        for na, ra in ((a.from_node, o1), (a.to_node, a.length - o1)):
            for nb, rb in ((b.from_node, o2), (b.to_node, b.length - o2)):
                routes.append((ra + dist[na][nb] + rb, ra, na, nb, rb))
        total, ra, na, nb, _ = min(routes, key=lambda r: r[0])
        s = t * total
        if s <= ra:
            off = o1 - s if na == a.from_node else o1 + s
            return self.canonicalize(Point(self.kind, (e1, min(max(off, 0.0), a.length))))
        return self._walk_from_node(na, b, o2, nb, s - ra)

    def random_point(self, rng: random.Random) -> Point:
        edges = self.topology.edges
        weights = [e.length for e in edges]
        e = rng.choices(edges, weights=weights)[0]
        return self.canonicalize(Point(self.kind, (e.id, rng.uniform(0.0, e.length))))

    def point_to_json(self, p: Point):
        _check_kind(self, p)
        return {"edge": p.data[0], "offset": p.data[1]}

    def point_from_json(self, obj) -> Point:
        if not isinstance(obj, dict) or "edge" not in obj or "offset" not in obj:
            raise GeometryError('tree point JSON must be {"edge": ..., "offset": ...}')
        return self.point((obj["edge"], obj["offset"]))

    def to_json(self):
        return {"kind": self.kind, "edges": self.topology.to_json()}


SpaceDescriptor = Union[EuclideanSpace, HyperboloidSpace, TreeSpace]


def make_space(kind: str, dim: int | None = None, tree: TreeTopology | None = None) -> SpaceDescriptor:
    if kind == "euclidean":
        if dim is None:
            raise GeometryError("euclidean space needs a dimension")
        return EuclideanSpace(dim)
    if kind == "hyperboloid":
        if dim is None:
            raise GeometryError("hyperboloid space needs a dimension")
        return HyperboloidSpace(dim)
    if kind == "tree":
        if tree is None:
            raise GeometryError("tree space needs a topology")
        return TreeSpace(tree)
    raise GeometryError(f"unknown space kind {kind!r}")


def space_to_json(space: SpaceDescriptor):
    return space.to_json()


def space_from_json(obj) -> SpaceDescriptor:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise GeometryError('space JSON must carry a "kind"')
    kind = obj["kind"]
    if kind in ("euclidean", "hyperboloid"):
        if "dim" not in obj:
            raise GeometryError(f"{kind} space JSON needs a dim")
        dim = obj["dim"]
        if not isinstance(dim, int):
            raise GeometryError("dim must be an integer")
        return make_space(kind, dim=dim)
    if kind == "tree":
        if "edges" not in obj:
            raise GeometryError("tree space JSON needs an edges array")
        return make_space(kind, tree=TreeTopology.from_json(obj["edges"]))
    raise GeometryError(f"unknown space kind {kind!r}")


def distance(space: SpaceDescriptor, p: Point, q: Point) -> float:
    """Geodesic distance between two points of ``space``."""
    return space.distance(p, q)


def geodesic_point(space: SpaceDescriptor, p: Point, q: Point, t: float) -> Point:
    """The point a fraction ``t`` of the way along the geodesic from p to q."""
    return space.geodesic_point(p, q, t)


def point_to_json(space: SpaceDescriptor, p: Point):
    return space.point_to_json(p)


def point_from_json(space: SpaceDescriptor, obj) -> Point:
    return space.point_from_json(obj)


def point_sort_key(space: SpaceDescriptor, p: Point) -> str:
    """Canonical serialization, used wherever a deterministic order is needed."""
    return json.dumps(space.point_to_json(p), sort_keys=True)


@dataclass(frozen=True)
class Cat0AuditReport:
    """Worst slack seen for each nonpositive-curvature inequality.

    Positive entries mean a violation; honest backends stay at or below
    floating-point noise.  ``skipped`` counts degenerate comparison
    triangles (a zero side) that were excluded.
    """

    trials: int
    skipped: int
    cat0_inequality: float
    comparison_points: float
    geodesic_convexity: float

    @property
    def max_violation(self) -> float:
        return max(self.cat0_inequality, self.comparison_points, self.geodesic_convexity)

    def to_json(self):
        return {
            "trials": self.trials,
            "skipped": self.skipped,
            "cat0_inequality": self.cat0_inequality,
            "comparison_points": self.comparison_points,
            "geodesic_convexity": self.geodesic_convexity,
        }


def cat0_audit(space: SpaceDescriptor, sampler_seed: int, trials: int) -> Cat0AuditReport:
    """Stress the backend against three defining CAT(0) inequalities.

    Per trial: the quadratic comparison inequality along a random geodesic,
    the planar comparison-point inequality for a random triangle, and joint
    convexity of the metric along two random geodesics.
    """
    if trials < 1:
        raise GeometryError("trials must be >= 1")
    worst_quad = -math.inf
    worst_comp = -math.inf
    worst_conv = -math.inf
    skipped = 0
    for i in range(trials):
        rng = random.Random(f"{sampler_seed}:{i}:cat0")

        z = space.random_point(rng)
        x0 = space.random_point(rng)
        x1 = space.random_point(rng)
        t = rng.random()
        xt = space.geodesic_point(x0, x1, t)
        d01 = space.distance(x0, x1)
        slack = space.distance(z, xt) ** 2 - (
            (1.0 - t) * space.distance(z, x0) ** 2
            + t * space.distance(z, x1) ** 2
            - t * (1.0 - t) * d01 * d01
        )
        worst_quad = max(worst_quad, slack)

        p = space.random_point(rng)
        q = space.random_point(rng)
        r = space.random_point(rng)
        s = rng.random()
        u = rng.random()
        side_q = space.distance(p, q)
        side_r = space.distance(p, r)
        if side_q < 1e-12 or side_r < 1e-12:
            skipped += 1
        else:
            side_qr = space.distance(q, r)
            cos_a = (side_q**2 + side_r**2 - side_qr**2) / (2.0 * side_q * side_r)
            cos_a = min(1.0, max(-1.0, cos_a))
            sin_a = math.sqrt(max(0.0, 1.0 - cos_a * cos_a))
            x = space.geodesic_point(p, q, u)
            y = space.geodesic_point(p, r, s)
            flat = math.hypot(u * side_q - s * side_r * cos_a, s * side_r * sin_a)
            worst_comp = max(worst_comp, space.distance(x, y) - flat)

        y0 = space.random_point(rng)
        y1 = space.random_point(rng)
        v = rng.random()
        lhs = space.distance(space.geodesic_point(x0, x1, v), space.geodesic_point(y0, y1, v))
        rhs = (1.0 - v) * space.distance(x0, y0) + v * space.distance(x1, y1)
        worst_conv = max(worst_conv, lhs - rhs)

    return Cat0AuditReport(
        trials=trials,
        skipped=skipped,
        cat0_inequality=worst_quad,
        comparison_points=worst_comp,
        geodesic_convexity=worst_conv,
    )
