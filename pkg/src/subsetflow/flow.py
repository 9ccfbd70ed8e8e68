"""Proximal splitting flow for the total pairwise separation of a tuple.

The objective on the n-fold product space is the sum of all pairwise
coordinate distances.  Its gradient-flow semigroup is approximated by
cyclic sweeps of two-coordinate resolvents, each of which has a closed
form: both coordinates move toward each other along their geodesic, and
land together on the midpoint once they are close enough.  Marching the
sweeps forward in time until a gap collapses is what the retraction in
:mod:`subsetflow.retraction` is made of.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .geometry import EuclideanSpace, GeometryError, Point, SpaceDescriptor
from .subset_space import PointTuple, min_gap, product_distance

# Fraction of the guaranteed merge horizon the march may overshoot before
# the closest pair is snapped together by force.
MERGE_SLACK = 1e-3


@dataclass(frozen=True)
class FlowConfig:
    """Knobs for the splitting flow and the merge march.

    sweeps_per_run: resolvent sweeps used to cover one flow run; the merge
    march uses the same count to cover its half-gap horizon.
    merge_tolerance: a gap at or below this fraction of the starting min
    gap counts as merged.
    max_doublings: how many times an adaptive run may double its sweep count.
    richardson_tolerance: successive-run distance at which the adaptive run
    declares convergence.
    """

    sweeps_per_run: int = 256
    merge_tolerance: float = 1e-6
    max_doublings: int = 8
    richardson_tolerance: float = 1e-7

    def __post_init__(self) -> None:
        if self.sweeps_per_run < 1:
            raise GeometryError("sweeps_per_run must be >= 1")
        if not 0.0 < self.merge_tolerance < 1.0:
            raise GeometryError("merge_tolerance must lie in (0, 1)")
        if self.max_doublings < 0:
            raise GeometryError("max_doublings must be >= 0")
        if self.richardson_tolerance <= 0.0:
            raise GeometryError("richardson_tolerance must be positive")


@dataclass(frozen=True)
class FlowReport:
    """Outcome of an adaptive flow run.

    Traces come from the finest run and hold one row per sweep, starting at
    time zero.  The objective trace must never increase along a run; the
    constructor enforces that within floating noise.
    """

    final: PointTuple
    elapsed_time: float
    sweeps_used: int
    converged: bool
    min_gap_trace: tuple[tuple[float, float], ...]
    objective_trace: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        values = [f for _, f in self.objective_trace]
        for a, b in zip(values, values[1:]):
            if b > a + 1e-9:
                raise GeometryError(f"objective increased along the flow: {a} -> {b}")

    def to_json(self):
        return {
            "final": self.final.to_json(),
            "elapsed_time": self.elapsed_time,
            "sweeps_used": self.sweeps_used,
            "converged": self.converged,
            "min_gap_trace": [[t, g] for t, g in self.min_gap_trace],
            "objective_trace": [[t, f] for t, f in self.objective_trace],
        }

    def trace_csv(self) -> str:
        lines = ["time,delta,F"]
        for (t, g), (_, f) in zip(self.min_gap_trace, self.objective_trace):
            lines.append(f"{t!r},{g!r},{f!r}")
        return "\n".join(lines) + "\n"


def sum_pairwise_distances(x: PointTuple) -> float:
    """The flow objective: total distance over all coordinate pairs."""
    if len(x) < 2:
        raise GeometryError("the objective needs at least two coordinates")
    space = x.space
    pts = x.coords
    return sum(
        space.distance(pts[i], pts[j])
        for i in range(len(pts) - 1)
        for j in range(i + 1, len(pts))
    )


def _pairwise_stats(space: SpaceDescriptor, coords: list[Point]) -> tuple[float, float]:
    gap = math.inf
    total = 0.0
    n = len(coords)
    for i in range(n - 1):
        p = coords[i]
        for j in range(i + 1, n):
            d = space.distance(p, coords[j])
            total += d
            if d < gap:
                gap = d
    return gap, total


def _pair_step(space: SpaceDescriptor, coords: list[Point], i: int, j: int, lam: float) -> None:
    p = coords[i]
    q = coords[j]
    if p == q:
        return
    d = space.distance(p, q)
    if d <= 2.0 * lam:
        mid = space.geodesic_point(p, q, 0.5)
        coords[i] = mid
        coords[j] = mid
    else:
        s = lam / d
        coords[i] = space.geodesic_point(p, q, s)
        coords[j] = space.geodesic_point(q, p, s)


def pair_resolvent(x: PointTuple, i: int, j: int, lam: float) -> PointTuple:
    """Resolvent of the single pair term d(x_i, x_j) at step size lam.

    Both coordinates move distance min(lam, d/2) toward each other along
    their geodesic; all other coordinates are untouched.
    """
    n = len(x)
    if not 0 <= i < n or not 0 <= j < n:
        raise GeometryError(f"pair indices ({i}, {j}) out of range for a {n}-tuple")
    if i == j:
        raise GeometryError("pair indices must differ")
    if i > j:
        raise GeometryError("pair indices must be given as i < j")
    if lam <= 0.0:
        raise GeometryError("step size must be positive")
    coords = list(x.coords)
    _pair_step(x.space, coords, i, j, lam)
    return PointTuple(x.space, tuple(coords))


def _sweep_inplace(space: SpaceDescriptor, coords: list[Point], lam: float) -> None:
    # Pairs ordered by the larger index, then the smaller: (0,1), (0,2),
    # (1,2), (0,3), ...  The composition applies (0,1) first.
    n = len(coords)
    for j in range(1, n):
        for i in range(j):
            _pair_step(space, coords, i, j, lam)


def sweep(x: PointTuple, lam: float) -> PointTuple:
    """One full cycle of pair resolvents over every coordinate pair."""
    if lam <= 0.0:
        raise GeometryError("step size must be positive")
    coords = list(x.coords)
    _sweep_inplace(x.space, coords, lam)
    return PointTuple(x.space, tuple(coords))


def splitting_flow(x: PointTuple, t: float, k: int) -> PointTuple:
    """Time-t flow approximated by k resolvent sweeps of step t/k."""
    if t < 0.0:
        raise GeometryError("flow time must be >= 0")
    if k < 1:
        raise GeometryError("sweep count must be >= 1")
    if t == 0.0 or len(x) < 2:
        return x
    lam = t / k
    coords = list(x.coords)
    for _ in range(k):
        _sweep_inplace(x.space, coords, lam)
    return PointTuple(x.space, tuple(coords))


def _traced_run(space, coords: list[Point], t: float, k: int):
    lam = t / k
    gap, total = _pairwise_stats(space, coords)
    gap_trace = [(0.0, gap)]
    obj_trace = [(0.0, total)]
    for m in range(1, k + 1):
        _sweep_inplace(space, coords, lam)
        gap, total = _pairwise_stats(space, coords)
        now = m * lam
        gap_trace.append((now, gap))
        obj_trace.append((now, total))
    return gap_trace, obj_trace


def flow_adaptive(x: PointTuple, t: float, cfg: FlowConfig) -> FlowReport:
    """Run the splitting flow, doubling the sweep count until stable.

    Successive runs use k, 2k, 4k, ... sweeps; the run stops once two
    consecutive results agree within ``cfg.richardson_tolerance`` in the
    product metric, or after ``cfg.max_doublings`` doublings, in which case
    the report carries ``converged=False`` and the finest result.
    """
    if t < 0.0:
        raise GeometryError("flow time must be >= 0")
    space = x.space
    if t == 0.0 or len(x) < 2:
        gap = min_gap(x) if len(x) >= 2 else math.inf
        total = sum_pairwise_distances(x) if len(x) >= 2 else 0.0
        return FlowReport(
            final=x,
            elapsed_time=t,
            sweeps_used=0,
            converged=True,
            min_gap_trace=((0.0, gap),),
            objective_trace=((0.0, total),),
        )
    k = cfg.sweeps_per_run
    coords = list(x.coords)
    gap_trace, obj_trace = _traced_run(space, coords, t, k)
    prev = PointTuple(space, tuple(coords))
    sweeps_used = k
    converged = False
    for _ in range(cfg.max_doublings):
        k *= 2
        coords = list(x.coords)
        gap_trace, obj_trace = _traced_run(space, coords, t, k)
        cur = PointTuple(space, tuple(coords))
        sweeps_used += k
        if product_distance(prev, cur) <= cfg.richardson_tolerance:
            converged = True
            prev = cur
            break
        prev = cur
    else:
        if cfg.max_doublings == 0:
            converged = True  # nothing to compare against; single-run mode
    return FlowReport(
        final=prev,
        elapsed_time=t,
        sweeps_used=sweeps_used,
        converged=converged,
        min_gap_trace=tuple(gap_trace),
        objective_trace=tuple(obj_trace),
    )


def merge_time(x: PointTuple, cfg: FlowConfig) -> tuple[float, PointTuple]:
    """March the flow forward until some pair of coordinates merges.

    Returns the first time a pairwise gap falls to ``merge_tolerance``
    times the starting min gap, together with the state there.  The march
    never runs past half the starting gap (plus a small slack): if nothing
    has merged by then, the closest pair is snapped to its midpoint, so the
    returned time is always at most ``min_gap(x)/2 * (1 + MERGE_SLACK)``.
    """
    if len(x) < 2:
        raise GeometryError("merging needs at least two coordinates")
    space = x.space
    delta = min_gap(x)
    if delta == 0.0:
        return 0.0, x
    threshold = cfg.merge_tolerance * delta
    lam = delta / (2.0 * cfg.sweeps_per_run)
    max_sweeps = int(cfg.sweeps_per_run * (1.0 + MERGE_SLACK))
    coords = list(x.coords)
    elapsed = 0.0
    for _ in range(max_sweeps):
        _sweep_inplace(space, coords, lam)
        elapsed += lam
        gap, _ = _pairwise_stats(space, coords)
        if gap <= threshold:
            return elapsed, PointTuple(space, tuple(coords))
    # Force-merge the closest pair at the horizon.
    n = len(coords)
    best = None
    for i in range(n - 1):
        for j in range(i + 1, n):
            d = space.distance(coords[i], coords[j])
            if best is None or d < best[0]:
                best = (d, i, j)
    _, i, j = best
    mid = space.geodesic_point(coords[i], coords[j], 0.5)
    coords[i] = mid
    coords[j] = mid
    return elapsed, PointTuple(space, tuple(coords))


# ---------------------------------------------------------------------------
# Reference resolvent of the full objective (validation only).


def _set_partitions(n: int):
    # Standard restricted-growth enumeration of partitions of range(n).
    if n == 0:
        yield []
        return
    parts = [[0]]

    def rec(i):
        if i == n:
            yield [list(b) for b in parts]
            return
        for b in parts:
            b.append(i)
            yield from rec(i + 1)
            b.pop()
        parts.append([i])
        yield from rec(i + 1)
        parts.pop()

    yield from rec(1)


def _reduced_minimize(pts: np.ndarray, blocks: list[list[int]], lam: float):
    """Exactly minimize the objective restricted to a coincidence pattern.

    Variables are one point per block; the reduced objective is smooth and
    strongly convex whenever the optimal blocks stay apart, and a damped
    Newton iteration drives the gradient below 1e-10 there.  Returns
    (value, block points) or None when blocks collide, in which case a
    coarser pattern dominates this one anyway.
    """
    dim = pts.shape[1]
    m = len(blocks)
    sizes = np.array([len(b) for b in blocks], dtype=float)
    means = np.array([pts[b].mean(axis=0) for b in blocks])
    # Sum of squared distances from each block's members to its mean is a
    # constant of the pattern; fold it in so values are comparable.
    base = sum(float(((pts[b] - means[i]) ** 2).sum()) for i, b in enumerate(blocks)) / (2.0 * lam)
    if m == 1:
        return base, means

    weights = np.outer(sizes, sizes)

    def value(u):
        v = base
        for a in range(m - 1):
            for b in range(a + 1, m):
                v += weights[a, b] * float(np.linalg.norm(u[a] - u[b]))
        v += float((sizes * ((u - means) ** 2).sum(axis=1)).sum()) / (2.0 * lam)
        return v

    def grad_hess(u):
        g = (sizes[:, None] / lam) * (u - means)
        h = np.zeros((m * dim, m * dim))
        for a in range(m):
            h[a * dim:(a + 1) * dim, a * dim:(a + 1) * dim] += (sizes[a] / lam) * np.eye(dim)
        for a in range(m - 1):
            for b in range(a + 1, m):
                diff = u[a] - u[b]
                r = float(np.linalg.norm(diff))
                if r < 1e-9:
                    return None, None
                unit = diff / r
                g[a] += weights[a, b] * unit
                g[b] -= weights[a, b] * unit
                block = (weights[a, b] / r) * (np.eye(dim) - np.outer(unit, unit))
                h[a * dim:(a + 1) * dim, a * dim:(a + 1) * dim] += block
                h[b * dim:(b + 1) * dim, b * dim:(b + 1) * dim] += block
                h[a * dim:(a + 1) * dim, b * dim:(b + 1) * dim] -= block
                h[b * dim:(b + 1) * dim, a * dim:(a + 1) * dim] -= block
        return g, h

    u = means.copy()
    val = value(u)
    for _ in range(100):
        g, h = grad_hess(u)
        if g is None:
            return None
        gnorm = float(np.linalg.norm(g))
        if gnorm <= 1e-10:
            break
        step = np.linalg.solve(h, -g.reshape(-1)).reshape(m, dim)
        descent = float((g.reshape(-1) * step.reshape(-1)).sum())
        if -descent <= 64.0 * np.finfo(float).eps * max(1.0, abs(val)):
            # The predicted decrease is below the float resolution of the
            # value, so an Armijo test would accept zero-progress steps.
            # Finish with pure Newton steps gated on gradient contraction.
            g2, _ = grad_hess(u + step)
            if g2 is None or not float(np.linalg.norm(g2)) < 0.5 * gnorm:
                break
            u = u + step
            val = value(u)
            continue
        alpha = 1.0
        moved = False
        while alpha > 1e-14:
            cand = u + alpha * step
            cand_val = value(cand)
            if cand_val <= val + 1e-4 * alpha * descent:
                u = cand
                val = cand_val
                moved = True
                break
            alpha *= 0.5
        if not moved:
            break
    g, _ = grad_hess(u)
    if g is None or float(np.linalg.norm(g)) > 1e-8:
        return None
    return val, u


def full_resolvent_oracle(x: PointTuple, lam: float) -> PointTuple:
    """Exact resolvent of the full objective; euclidean reference only.

    Minimizes  sum of pairwise distances + product_distance(x, .)^2 / (2 lam)
    by enumerating coincidence patterns of the coordinates and solving each
    smooth reduced problem by Newton iteration.  A pattern can only be
    optimal if its merged coordinates started within 2(n-1)*lam of each
    other, which prunes the enumeration hard for small steps.  Restricted
    to n*dim <= 8 to keep the enumeration honest-sized.
    """
    space = x.space
    if not isinstance(space, EuclideanSpace):
        raise GeometryError("the reference resolvent supports only the euclidean backend")
    if lam <= 0.0:
        raise GeometryError("step size must be positive")
    n = len(x)
    if n < 2:
        return x
    if n * space.dim > 8:
        raise GeometryError("reference resolvent is limited to n*dim <= 8")
    pts = np.array([p.data for p in x.coords], dtype=float)
    reach = 2.0 * (n - 1) * lam * (1.0 + 1e-9) + 1e-12

    best_val = math.inf
    best = None
    for blocks in _set_partitions(n):
        feasible = True
        for b in blocks:
            for ai, bi in itertools.combinations(b, 2):
                if float(np.linalg.norm(pts[ai] - pts[bi])) > reach:
                    feasible = False
                    break
            if not feasible:
                break
        if not feasible:
            continue
        solved = _reduced_minimize(pts, blocks, lam)
        if solved is None:
            continue
        val, u = solved
        if val < best_val:
            best_val = val
            best = (blocks, u)

    if best is None:
        # The pattern of the true optimum always solves; reaching this means
        # a numerical breakdown worth hearing about, not silent garbage.
        raise GeometryError("reference resolvent failed to certify any coincidence pattern")
    blocks, u = best
    out = [None] * n
    for bi, block in enumerate(blocks):
        p = space.point(u[bi])
        for idx in block:
            out[idx] = p
    return PointTuple(space, tuple(out))
