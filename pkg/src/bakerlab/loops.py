"""Closed polylines under iteration: refinement, winding, contractibility.

Contractibility in the invariant domain is decided through the disk cover
of its complement: the complement sits inside the closed delta-disks around
the pole translates (plus infinity), so a loop staying epsilon-clear of the
translates is null-homotopic exactly when it winds zero times around every
pole.  Reports are only marked certified when that clearance holds along
the whole polyline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AmbiguousWindingError,
    PoleProximityError,
    RefinementLimitError,
    UncertifiedPointError,
)
from .mapfamily import (
    MapModel,
    _dist_pole_array,
    _dist_translates_array,
    _eval_f_array,
    poles_in_box,
)

_VERTEX_CAP = 10 ** 6
_PASS_CAP = 64


@dataclass
class LoopPath:
    """Closed polyline stored cyclically (no repeated closing vertex)."""

    vertices: np.ndarray
    max_gap: float

    def __post_init__(self) -> None:
        self.vertices = np.asarray(self.vertices, dtype=np.complex128).ravel()
        if len(self.vertices) < 3:
            raise ValueError("a loop needs at least 3 vertices")
        if not self.max_gap > 0.0:
            raise ValueError("max_gap must be positive")

    @classmethod
    def square(cls, center: complex, half_side: float, max_gap: float = 0.1) -> "LoopPath":
        c = complex(center)
        h = float(half_side)
        corners = [c + h + 1j * h, c - h + 1j * h, c - h - 1j * h, c + h - 1j * h]
        return cls(np.asarray(corners, dtype=np.complex128), max_gap)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def edge_lengths(self) -> np.ndarray:
        return np.abs(np.roll(self.vertices, -1) - self.vertices)

    def bounding_box(self) -> tuple[float, float, float, float]:
        v = self.vertices
        return (float(v.real.min()), float(v.real.max()),
                float(v.imag.min()), float(v.imag.max()))

    def reversed(self) -> "LoopPath":
        return LoopPath(self.vertices[::-1].copy(), self.max_gap)


def _refine_core(model: MapModel, vertices: np.ndarray, max_gap: float) -> np.ndarray:
    """Insert edge midpoints until source and image edges are below max_gap."""
    v = vertices
    for _ in range(_PASS_CAP):
        if np.any(_dist_pole_array(model, v) < 0.5 * model.epsilon):
            raise PoleProximityError("loop vertex within epsilon/2 of a pole")
        nxt = np.roll(v, -1)
        own = np.abs(nxt - v)
        f_v, _ = _eval_f_array(model, v)
        img = np.abs(np.roll(f_v, -1) - f_v)
        split = (own > max_gap) | (img > max_gap)
        if not split.any():
            return v
        if len(v) + int(split.sum()) > _VERTEX_CAP:
            raise RefinementLimitError(
                f"refinement would exceed {_VERTEX_CAP} vertices "
                "(loop approaching a pole)")
        mids = 0.5 * (v + nxt)
        v = np.insert(v, np.flatnonzero(split) + 1, mids[split])
    raise RefinementLimitError("refinement did not settle within the pass cap")


def refine_loop(model: MapModel, loop: LoopPath) -> LoopPath:
    """Refined copy whose own and image edge lengths are all below max_gap.

    With edges shorter than the loop's clearance from the poles, winding
    numbers of the polyline agree with those of the underlying curve.
    Idempotent on already-fine loops.
    """
    d_tilde = _dist_translates_array(model, loop.vertices)
    if np.any(d_tilde < 2.0 * model.epsilon - 1e-12):
        raise UncertifiedPointError(
            "loop leaves the certified seed region (2*epsilon collar)")
    return LoopPath(_refine_core(model, loop.vertices, loop.max_gap), loop.max_gap)


def push_forward(model: MapModel, loop: LoopPath) -> LoopPath:
    """Image loop under f: refine so image edges stay below max_gap, then map."""
    if np.any(_dist_pole_array(model, loop.vertices) < 0.5 * model.epsilon):
        raise PoleProximityError("loop vertex within epsilon/2 of a pole")
    refined = _refine_core(model, loop.vertices, loop.max_gap)
    values, _ = _eval_f_array(model, refined)
    return LoopPath(values, loop.max_gap)


def _min_dist_to_edges(vertices: np.ndarray, v: complex) -> float:
    a = vertices
    b = np.roll(vertices, -1)
    d = b - a
    den = (d * d.conjugate()).real
    num = ((v - a) * d.conjugate()).real
    t = np.where(den > 0.0, np.clip(np.divide(num, den, where=den > 0.0,
                                              out=np.zeros_like(num)), 0.0, 1.0), 0.0)
    proj = a + t * d
    return float(np.abs(v - proj).min())


def winding(loop: LoopPath, v: complex) -> int:
    """Winding number of the polyline around v by signed angle increments.

    Exact for polylines; refuses points within max_gap of an edge, where a
    sampled curve could wind between samples.
    """
    if _min_dist_to_edges(loop.vertices, v) <= loop.max_gap:
        raise AmbiguousWindingError(
            f"query point {v} is within max_gap of the polyline")
    rel = loop.vertices - v
    turns = float(np.angle(np.roll(rel, -1) / rel).sum()) / (2.0 * math.pi)
    n = round(turns)
    if abs(turns - n) > 1e-6:
        raise AmbiguousWindingError(
            f"angle sum {turns} is not close to an integer")
    return int(n)


@dataclass
class WindingRecord:
    pole: complex
    winding: int | None


@dataclass
class WindingReport:
    """Per-pole windings with the clearance certificate.

    contractible is True exactly when the loop is certified and every
    reported winding is zero; None when the report is not certified.
    """

    records: list[WindingRecord]
    certified: bool
    contractible: bool | None


def _loop_clearance(model: MapModel, loop: LoopPath) -> float:
    """Lower bound on the distance from the polyline to the pole translates."""
    d = _dist_translates_array(model, loop.vertices)
    lengths = loop.edge_lengths()
    per_edge = np.minimum(d, np.roll(d, -1)) - 0.5 * lengths
    return float(per_edge.min())


def contractibility(model: MapModel, loop: LoopPath,
                    pad: float = 1.0) -> WindingReport:
    """Decide null-homotopy of the loop through the disk-cover of the complement.

    Reports windings around every pole inside the loop's padded bounding
    box (farther poles are outside the hull and wind zero).  Certified only
    when the whole polyline keeps distance >= epsilon from the pole
    translates; otherwise the true complement is unknown and contractible
    is left undecided.
    """
    certified = _loop_clearance(model, loop) >= model.epsilon
    x0, x1, y0, y1 = loop.bounding_box()
    records: list[WindingRecord] = []
    all_zero = True
    for p in poles_in_box(model, x0 - pad, x1 + pad, y0 - pad, y1 + pad):
        try:
            w = winding(loop, complex(p))
        except AmbiguousWindingError:
            records.append(WindingRecord(complex(p), None))
            certified = False
            continue
        records.append(WindingRecord(complex(p), w))
        all_zero = all_zero and w == 0
    contractible = (all_zero if certified else None)
    return WindingReport(records=records, certified=certified,
                         contractible=contractible)


@dataclass
class PersistenceStep:
    """Half-distance step condition along one image of the loop."""

    n: int
    holds: bool
    n_vertices: int
    n_violations: int
    worst_ratio: float     # max over vertices of |f(v)-v| / lower_dist(v)


@dataclass
class PersistenceReport:
    """Winding stability under iteration, gated by the half-distance condition.

    Wherever consecutive images move by less than half the certified
    boundary distance at every vertex, per-pole windings of consecutive
    images must agree; violations (there should be none) are listed.
    """

    steps: list[PersistenceStep]
    windings: list[dict[complex, int | None]]
    n_stable_from: int | None
    violations: list[tuple[int, complex]] = field(default_factory=list)
    ambiguous: list[tuple[int, complex]] = field(default_factory=list)


def persistence_check(model: MapModel, loop: LoopPath, n_max: int,
                      pad: float = 1.0) -> PersistenceReport:
    """Track the half-distance condition and winding tables for n <= n_max."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    refined = [refine_loop(model, loop)]
    steps: list[PersistenceStep] = []
    for n in range(n_max):
        current = refined[-1]
        v = current.vertices
        f_v, _ = _eval_f_array(model, v)
        step_abs = np.abs(f_v - v)
        lower = _dist_translates_array(model, v) - model.delta
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(lower > 0.0, step_abs / lower, math.inf)
        holds = bool(np.all(ratio < 0.5))
        steps.append(PersistenceStep(
            n=n, holds=holds, n_vertices=len(v),
            n_violations=int(np.sum(~(ratio < 0.5))),
            worst_ratio=float(ratio.max()),
        ))
        nxt = push_forward(model, current)
        refined.append(nxt)

    boxes = np.array([lp.bounding_box() for lp in refined])
    x0, x1 = boxes[:, 0].min() - pad, boxes[:, 1].max() + pad
    y0, y1 = boxes[:, 2].min() - pad, boxes[:, 3].max() + pad
    poles = [complex(p) for p in poles_in_box(model, x0, x1, y0, y1)]

    windings: list[dict[complex, int | None]] = []
    for lp in refined:
        table: dict[complex, int | None] = {}
        for p in poles:
            try:
                table[p] = winding(lp, p)
            except AmbiguousWindingError:
                table[p] = None
        windings.append(table)

    n_stable_from = None
    for n in range(n_max - 1, -1, -1):
        if steps[n].holds:
            n_stable_from = n
        else:
            break

    violations: list[tuple[int, complex]] = []
    ambiguous: list[tuple[int, complex]] = []
    for n in range(n_max):
        if not steps[n].holds:
            continue
        for p in poles:
            w0, w1 = windings[n][p], windings[n + 1][p]
            if w0 is None or w1 is None:
                ambiguous.append((n, p))
            elif w0 != w1:
                violations.append((n, p))

    return PersistenceReport(steps=steps, windings=windings,
                             n_stable_from=n_stable_from,
                             violations=violations, ambiguous=ambiguous)
