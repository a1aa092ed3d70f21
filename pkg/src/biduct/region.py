"""Rate-region geometry: origin-anchored rectangles, their convex hull, and channel sweeps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import TwoWayChannel
from .optimize import (
    Budget,
    EnsembleFamily,
    OptimizationReport,
    double_superdense_ensemble,
    maximize_weighted_delta_chi,
    one_way_capacity,
    superdense_ensemble,
)

INNER = "INNER"
OUTER = "OUTER"


@dataclass(frozen=True)
class RateRectangle:
    """[0, r_fwd] x [0, r_bwd] in bits per channel use."""

    r_fwd: float
    r_bwd: float
    certificate_id: str | None = None
    note: str = ""

    def __post_init__(self):
        if self.r_fwd < 0 or self.r_bwd < 0:
            raise ValueError("rectangle extents must be nonnegative")


def rect_from_deltas(d_fwd: float, d_bwd: float, certificate_id: str | None = None) -> RateRectangle:
    """Clip negative Holevo gains to zero, recording the raw values."""
    note = ""
    if d_fwd < 0 or d_bwd < 0:
        note = f"clipped from ({d_fwd:.6g}, {d_bwd:.6g})"
    return RateRectangle(max(d_fwd, 0.0), max(d_bwd, 0.0), certificate_id, note)


@dataclass(frozen=True)
class RateRegion:
    """Downward-closed convex region described by its upper-right boundary polyline."""

    vertices: tuple[tuple[float, float], ...]
    kind: str
    rectangles: tuple[RateRectangle, ...] = ()
    meta: dict = field(default_factory=dict, compare=False)
    heuristic: bool = False

    @property
    def max_fwd(self) -> float:
        return max(v[0] for v in self.vertices)

    @property
    def max_bwd(self) -> float:
        return max(v[1] for v in self.vertices)

    def boundary_height(self, x: float) -> float:
        """Largest r_bwd on the boundary at forward rate x (-inf outside [0, max_fwd])."""
        if x < -1e-15 or x > self.max_fwd + 1e-15:
            return -np.inf
        best = -np.inf
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:]):
            if x2 - x1 > 1e-15 and x1 - 1e-15 <= x <= x2 + 1e-15:
                t = np.clip((x - x1) / (x2 - x1), 0.0, 1.0)
                best = max(best, y1 + t * (y2 - y1))
            elif abs(x2 - x1) <= 1e-15 and abs(x - x1) <= 1e-15:
                best = max(best, y1, y2)
        if len(self.vertices) == 1:
            vx, vy = self.vertices[0]
            best = vy if abs(x - vx) <= 1e-15 or x <= vx else best
        if best == -np.inf and x <= self.vertices[0][0] + 1e-15:
            best = self.vertices[0][1]
        return best

    def contains_point(self, x: float, y: float, tol: float = 1e-9) -> bool:
        if x < -tol or y < -tol:
            return False
        return y <= self.boundary_height(min(max(x, 0.0), self.max_fwd)) + tol \
            and x <= self.max_fwd + tol

    def contains_region(self, other: "RateRegion", tol: float = 1e-9) -> bool:
        return all(self.contains_point(vx, vy, tol) for vx, vy in other.vertices)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull_of_rectangles(rects: Sequence[RateRectangle]) -> tuple[tuple[float, float], ...]:
    """Upper-right boundary of conv({origin} U rectangles), dominated corners removed."""
    if not rects:
        raise ValueError("need at least one rectangle")
    xmax = max(r.r_fwd for r in rects)
    ymax = max(r.r_bwd for r in rects)
    if xmax <= 0.0 and ymax <= 0.0:
        return ((0.0, 0.0),)
    pts = {(0.0, ymax), (xmax, 0.0)}
    for r in rects:
        pts.add((r.r_fwd, r.r_bwd))
    # Keep only the highest point at each forward rate, scanned left to right.
    ordered = sorted(pts, key=lambda p: (p[0], -p[1]))
    filtered: list[tuple[float, float]] = []
    for p in ordered:
        if filtered and abs(p[0] - filtered[-1][0]) < 1e-15:
            continue
        filtered.append(p)
    # Monotone upper hull; popping on >= removes collinear interior corners.
    upper: list[tuple[float, float]] = []
    for p in filtered:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) >= -1e-15:
            upper.pop()
        upper.append(p)
    if upper[-1][1] > 0.0:
        upper.append((xmax, 0.0))
    # Merge near-duplicate vertices (optimizer noise), preserving the endpoints.
    cleaned = [upper[0]]
    for p in upper[1:-1]:
        if abs(p[0] - cleaned[-1][0]) < 1e-9 and abs(p[1] - cleaned[-1][1]) < 1e-9:
            continue
        cleaned.append(p)
    last = upper[-1]
    if len(upper) > 1:
        if abs(last[0] - cleaned[-1][0]) < 1e-9 and abs(last[1] - cleaned[-1][1]) < 1e-9:
            if len(cleaned) > 1:
                cleaned[-1] = last
            else:
                cleaned.append(last)
        else:
            cleaned.append(last)
    return tuple(cleaned)


def region_from_rectangles(rects: Sequence[RateRectangle], kind: str,
                           meta: dict | None = None, heuristic: bool = False) -> RateRegion:
    return RateRegion(
        vertices=hull_of_rectangles(rects), kind=kind, rectangles=tuple(rects),
        meta=meta or {}, heuristic=heuristic,
    )


def _segment_distance(p, a, b) -> float:
    ap = (p[0] - a[0], p[1] - a[1])
    ab = (b[0] - a[0], b[1] - a[1])
    denom = ab[0] * ab[0] + ab[1] * ab[1]
    t = 0.0 if denom == 0 else np.clip((ap[0] * ab[0] + ap[1] * ab[1]) / denom, 0.0, 1.0)
    dx = p[0] - (a[0] + t * ab[0])
    dy = p[1] - (a[1] + t * ab[1])
    return float(np.hypot(dx, dy))


def point_to_region(p: tuple[float, float], r: RateRegion) -> float:
    """Euclidean distance from a point to the (closed) region."""
    if r.contains_point(p[0], p[1], tol=0.0):
        return 0.0
    boundary = [(0.0, 0.0), (0.0, r.max_bwd)] + list(r.vertices) + [(r.max_fwd, 0.0), (0.0, 0.0)]
    return min(
        _segment_distance(p, boundary[i], boundary[i + 1]) for i in range(len(boundary) - 1)
    )


def hausdorff_distance(a: RateRegion, b: RateRegion) -> float:
    """Hausdorff distance between two convex downward-closed regions.

    For convex sets the supremum of the distance-to-the-other-set is attained
    at an extreme point, so checking vertices (plus the axis corners) is exact.
    """
    gap = 0.0
    for first, second in ((a, b), (b, a)):
        pts = list(first.vertices) + [(0.0, 0.0), (first.max_fwd, 0.0), (0.0, first.max_bwd)]
        for p in pts:
            gap = max(gap, point_to_region(p, second))
    return gap


def symmetric_rate(r: RateRegion, tol: float = 1e-12) -> float:
    """Largest t with (t, t) in the region (boundary crossing of the diagonal)."""
    lo, hi = 0.0, max(r.max_fwd, r.max_bwd)
    if r.contains_point(hi, hi, tol):
        return hi
    for _ in range(80):
        mid = (lo + hi) / 2
        if r.contains_point(mid, mid, tol):
            lo = mid
        else:
            hi = mid
    return lo


DEFAULT_WEIGHTS = tuple(np.round(np.linspace(0.0, 1.0, 11), 10))


def _product_cuts(dims) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """Standard party cut plus the cross cut (Alice prepares on A (x) B')."""
    return [
        (("A", "Ap"), ("B", "Bp")),
        (("A", "Bp"), ("B", "Ap")),
    ]


def _sweep_reports(channel: TwoWayChannel, budget: Budget, kinds: Sequence[str],
                   weights: Sequence[float]) -> tuple[list[RateRectangle], list[OptimizationReport]]:
    """Scalarized sweep shared by the inner and outer estimators.

    The outer sweep reruns the inner (product-family) points with identical
    seeds before widening to arbitrary ensembles, so every inner rectangle is
    also an outer rectangle and containment holds structurally.
    """
    budget.require_seed()
    dims = channel.dims
    d = max(dims.a_in, dims.b_in)
    anc = (d, d)
    m = (dims.a_in * dims.b_in) ** 2
    rects: list[RateRectangle] = []
    reports: list[OptimizationReport] = []

    warm_common: list = []
    for direction in ("forward", "backward"):
        try:
            warm_common.append(superdense_ensemble(channel, direction, ancilla_dims=anc))
        except ValueError:
            pass
    try:
        warm_common.append(double_superdense_ensemble(channel, ancilla_dims=anc))
    except ValueError:
        pass
    if channel.classical_pmf is not None:
        warm_common.extend(
            _classical_sweep_warm(channel, anc, joints="ARBITRARY" in kinds)
        )

    interior = [w for w in weights if 0.0 < w < 1.0]
    for wi, lam in enumerate(interior):
        lam_candidates: list[OptimizationReport] = []
        for ci, cut in enumerate(_product_cuts(dims)):
            fam = EnsembleFamily("PRODUCT", m=m, ancilla_dims=anc, cut=cut)
            rep = maximize_weighted_delta_chi(
                channel, lam, fam, budget, warm_ensembles=warm_common, stream=(wi, ci)
            )
            lam_candidates.append(rep)
        if "ARBITRARY" in kinds:
            fam = EnsembleFamily("ARBITRARY", m=m, ancilla_dims=anc)
            seeds = [r.certificate for r in lam_candidates] + warm_common
            rep = maximize_weighted_delta_chi(channel, lam, fam, budget, seeds, stream=(wi, 9))
            lam_candidates.append(rep)
        for rep in lam_candidates:
            rects.append(
                rect_from_deltas(rep.extra["delta_fwd"], rep.extra["delta_bwd"], f"lambda={lam:g}")
            )
            reports.append(rep)

    # Run the axis endpoints last, seeded with every interior certificate, so the
    # region's intercepts equal the dedicated one-way estimates exactly.
    certs = [r.certificate for r in reports]
    fwd = one_way_capacity(channel, "forward", budget, extra_warm=certs)
    bwd = one_way_capacity(channel, "backward", budget, extra_warm=certs)
    rects.append(rect_from_deltas(fwd.best_value, 0.0, "one-way forward"))
    rects.append(rect_from_deltas(0.0, bwd.best_value, "one-way backward"))
    reports.extend([fwd, bwd])
    return rects, reports


def _classical_sweep_warm(channel: TwoWayChannel, anc: tuple[int, int],
                          joints: bool = False) -> list:
    """Classical message ensembles at Shannon-optimal input distributions."""
    from .classical import (
        ClassicalTwoWayChannel,
        classical_message_ensemble,
        shannon_optimal_joints,
        shannon_optimal_products,
    )

    w = ClassicalTwoWayChannel(channel.classical_pmf)
    out = []
    for p_a, q_b in shannon_optimal_products(w):
        out.append(classical_message_ensemble(w, np.outer(p_a, q_b), ancilla_dims=anc))
    if joints:
        for p_ab in shannon_optimal_joints(w):
            out.append(classical_message_ensemble(w, p_ab, ancilla_dims=anc))
    return out


def inner_region(channel: TwoWayChannel, budget: Budget,
                 weights: Sequence[float] = DEFAULT_WEIGHTS, channel_id: str = "") -> RateRegion:
    """Achievable-region estimate from product-decomposed ensembles (both cuts)."""
    rects, _ = _sweep_reports(channel, budget, kinds=("PRODUCT",), weights=weights)
    meta = {"channel": channel_id, "family": "PRODUCT", "budget": _budget_meta(budget)}
    return region_from_rectangles(rects, INNER, meta=meta, heuristic=False)


def outer_region(channel: TwoWayChannel, budget: Budget,
                 weights: Sequence[float] = DEFAULT_WEIGHTS, channel_id: str = "") -> RateRegion:
    """Heuristic outer-bound estimate: arbitrary ensembles, local search only.

    Each per-use supremum is lower-bounded by local search, so the reported
    region under-estimates the true outer bound; the flag records that.
    """
    rects, _ = _sweep_reports(channel, budget, kinds=("PRODUCT", "ARBITRARY"), weights=weights)
    meta = {"channel": channel_id, "family": "ARBITRARY", "budget": _budget_meta(budget)}
    return region_from_rectangles(rects, OUTER, meta=meta, heuristic=True)


def _budget_meta(budget: Budget) -> dict:
    return {
        "restarts": budget.restarts,
        "max_iters": budget.max_iters,
        "seed": budget.seed,
        "ancilla_levels": list(budget.ancilla_levels) if budget.ancilla_levels else None,
    }
