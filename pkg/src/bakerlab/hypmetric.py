"""Certified bounds on hyperbolic densities and distances.

Upper bounds come from the quasihyperbolic comparison rho(z) <= 2/dist(z,
boundary) applied to certified boundary-distance enclosures.  Lower bounds
come from a pointwise density floor of the twice-punctured plane integrated
along an explicit path; by the Schwarz-Pick contraction they lower-bound
the metric of any domain avoiding both punctures.  Every result is a
MetricBound carrying its provenance; nothing here is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CertificationError, UncertifiedPointError
from .mapfamily import (
    MapModel,
    _dist_translates_array,
    dist_to_boundary_interval,
)

# Density floor constant of the twice-punctured plane:
# rho(u) >= 1/(|u| (K + |log|u||)) with K = Gamma(1/4)^4 / (4 pi^2).
TWO_PUNCTURE_CONSTANT = math.gamma(0.25) ** 4 / (4.0 * math.pi * math.pi)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class MetricBound:
    """One-sided bound on a hyperbolic quantity with provenance."""

    kind: str    # "density_upper" | "distance_upper" | "distance_lower"
    value: float
    basis: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", float(self.value))
        if self.value < 0.0:
            raise ValueError("metric bounds are nonnegative")


def log_upper_bound(length: float, lower_dist: float) -> float:
    """The bound -2*ln(1 - length/lower_dist), valid when length < lower_dist."""
    if not 0.0 <= length < lower_dist:
        raise ValueError("requires 0 <= length < lower_dist")
    return -2.0 * math.log1p(-length / lower_dist)


def density_upper(model: MapModel, z: complex) -> MetricBound:
    """Upper bound 2 / (certified lower boundary distance) on the density."""
    iv = dist_to_boundary_interval(model, z)
    if iv.lower <= 0.0:
        return MetricBound("density_upper", math.inf,
                           "lower boundary distance degenerated to zero")
    return MetricBound("density_upper", 2.0 / iv.lower,
                       "2 / certified lower boundary distance")


def hyp_distance_upper(model: MapModel, z: complex, w: complex,
                       pieces: int = 64) -> MetricBound:
    """Certified upper bound on the hyperbolic distance between z and w.

    Takes the smaller of the endpoint log bounds
    -2*ln(1 - |z-w|/lower_dist) and a composite quasihyperbolic integral
    over the straight segment with per-piece worst-case distances, then
    floors the result at -2*ln(1 - |z-w|/upper_dist) so that
    1 - exp(-value/2) >= |z-w|/upper_dist always holds (a number above a
    valid upper bound is still an upper bound).
    """
    length = abs(z - w)
    if length == 0.0:
        return MetricBound("distance_upper", 0.0, "coincident points")

    intervals = []
    for a in (z, w):
        try:
            intervals.append(dist_to_boundary_interval(model, a))
        except UncertifiedPointError:
            intervals.append(None)

    log_bounds = [log_upper_bound(length, iv.lower)
                  for iv in intervals
                  if iv is not None and iv.lower > length]
    if not log_bounds:
        raise CertificationError(
            "segment not certified inside the domain: |z-w| is not below "
            "the certified boundary distance at either endpoint")

    candidates = list(log_bounds)
    integral = _segment_quasihyperbolic_integral(model, z, w, pieces)
    if integral is not None:
        candidates.append(integral)
    value = min(candidates)

    floors = [log_upper_bound(length, iv.upper)
              for iv in intervals
              if iv is not None and iv.upper > length]
    value = max(value, *floors)
    basis = "min(endpoint log bounds, %d-piece quasihyperbolic integral), " \
            "floored for two-sided consistency" % pieces
    return MetricBound("distance_upper", value, basis)


def _segment_quasihyperbolic_integral(model: MapModel, z: complex, w: complex,
                                      pieces: int) -> float | None:
    """Composite bound of the integral of 2/dist along [z, w], or None.

    Each piece uses the worst-case lower distance implied by the 1-Lipschitz
    translate distance at its endpoints; the bound is only valid when every
    piece stays certified (positive lower distance).
    """
    ts = np.linspace(0.0, 1.0, pieces + 1)
    samples = z + ts * (w - z)
    d_tilde = _dist_translates_array(model, samples)
    seg = abs(w - z) / pieces
    piece_lower = 0.5 * (d_tilde[:-1] + d_tilde[1:] - seg) - model.delta
    if np.any(piece_lower <= 0.0):
        return None
    return float(np.sum(2.0 * seg / piece_lower))


def hyp_step_upper_series(model: MapModel, orbit) -> list[MetricBound]:
    """Supplementary upper bounds on consecutive-iterate hyperbolic distances.

    Diagnostics only: upper bounds cannot witness positive lower limits, so
    classification never consumes this series.  Entries where the step is
    not certified inside the domain carry an infinite bound.
    """
    pts = orbit.points
    out: list[MetricBound] = []
    for n in range(len(pts) - 1):
        try:
            out.append(hyp_distance_upper(model, complex(pts[n]),
                                          complex(pts[n + 1])))
        except CertificationError:
            out.append(MetricBound("distance_upper", math.inf,
                                   "step not certified inside the domain"))
    return out


# ---------------------------------------------------------------------------
# two-puncture lower bound
# ---------------------------------------------------------------------------

def puncture_density_floor(u: np.ndarray) -> np.ndarray:
    """Pointwise density floor of the plane punctured at 0 and 1.

    max over both punctures of 1/(s (K + |log s|)) with s the distance to
    the puncture; each centered version is valid on the whole domain and is
    invariant under the inversion symmetry.
    """
    u = np.asarray(u, dtype=np.complex128)
    out = np.zeros(u.shape, dtype=np.float64)
    for center in (0.0, 1.0):
        s = np.abs(u - center)
        with np.errstate(divide="ignore"):
            c = 1.0 / (s * (TWO_PUNCTURE_CONSTANT + np.abs(np.log(s))))
        out = np.maximum(out, c)
    return out


def _line_kink_params(a: complex, d: complex) -> list[float]:
    """Parameters in (0,1) where the floor density loses smoothness on a+t*d.

    Kinks sit where |u| = 1, |u-1| = 1 (log absolute value) and where
    Re(u) = 1/2 (branch switch of the max).
    """
    ts: list[float] = []
    dd = (d * d.conjugate()).real
    if dd == 0.0:
        return ts
    for center in (0.0, 1.0):
        ac = a - center
        b = 2.0 * (ac * d.conjugate()).real
        c0 = (ac * ac.conjugate()).real - 1.0
        disc = b * b - 4.0 * dd * c0
        if disc > 0.0:
            root = math.sqrt(disc)
            ts.extend(((-b - root) / (2.0 * dd), (-b + root) / (2.0 * dd)))
    if d.real != 0.0:
        ts.append((0.5 - a.real) / d.real)
    return sorted(t for t in ts if 1e-12 < t < 1.0 - 1e-12)


def _integrate_line(a: complex, b: complex, max_step: float) -> float:
    total = 0.0
    cuts = [0.0] + _line_kink_params(a, b - a) + [1.0]
    for t0, t1 in zip(cuts[:-1], cuts[1:]):
        u0 = a + t0 * (b - a)
        u1 = a + t1 * (b - a)
        length = abs(u1 - u0)
        if length == 0.0:
            continue
        n_sub = max(4, math.ceil(length / max_step))
        edges = np.linspace(0.0, 1.0, n_sub + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1] - edges[0])
        ts = mid[:, None] + half * _GL_NODES[None, :]
        pts = u0 + ts * (u1 - u0)
        vals = puncture_density_floor(pts)
        total += float((vals * _GL_WEIGHTS[None, :]).sum()) * half * length
    return total


def _integrate_arc(center: complex, radius: float, th0: float, th1: float,
                   max_step: float) -> float:
    length = abs(th1 - th0) * radius
    if length == 0.0:
        return 0.0
    n_sub = max(4, math.ceil(length / max_step))
    edges = np.linspace(th0, th1, n_sub + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    ths = mid[:, None] + half * _GL_NODES[None, :]
    pts = center + radius * np.exp(1j * ths)
    vals = puncture_density_floor(pts)
    return float((vals * _GL_WEIGHTS[None, :]).sum()) * abs(half) * radius


def detoured_path(a: complex, b: complex,
                  clearance: float = 1e-3) -> list[tuple]:
    """Straight segment from a to b, detoured around the punctures 0 and 1.

    Wherever the segment passes within the clearance radius of a puncture,
    the covered stretch is replaced by the counterclockwise circular arc of
    that radius.  The clearance shrinks near the endpoints so they stay on
    the path.  Pieces are ("line", a, b) or ("arc", center, radius, th0, th1).
    """
    if a == b:
        return []
    d = b - a
    dd = abs(d) ** 2
    events = []
    for center in (0.0, 1.0):
        rc = min(clearance, 0.45 * abs(a - center), 0.45 * abs(b - center))
        if rc <= 0.0:
            raise ValueError("path endpoint coincides with a puncture")
        t_foot = ((center - a) * d.conjugate()).real / dd
        t_clamped = min(max(t_foot, 0.0), 1.0)
        if abs(a + t_clamped * d - center) >= rc:
            continue
        # segment crosses the clearance circle twice (endpoints are outside)
        offset = math.sqrt(max(rc * rc - abs(a + t_foot * d - center) ** 2, 0.0)) / abs(d)
        events.append((t_foot - offset, t_foot + offset, center, rc))
    events.sort()
    for (t0, t1, _, _), (s0, s1, _, _) in zip(events, events[1:]):
        if s0 < t1:
            raise ValueError("detour regions overlap; clearance too large")

    pieces: list[tuple] = []
    cursor = 0.0
    for t0, t1, center, rc in events:
        u0 = a + t0 * d
        u1 = a + t1 * d
        if t0 > cursor:
            pieces.append(("line", a + cursor * d, u0))
        th0 = math.atan2((u0 - center).imag, (u0 - center).real)
        th1 = math.atan2((u1 - center).imag, (u1 - center).real)
        sweep = (th1 - th0) % (2.0 * math.pi)
        pieces.append(("arc", center, rc, th0, th0 + sweep))
        cursor = t1
    if cursor < 1.0:
        pieces.append(("line", a + cursor * d, b))
    return pieces


def integrate_density_floor(pieces: list[tuple], max_step: float = 0.005) -> float:
    """Composite Gauss-Legendre integral of the density floor along a path."""
    total = 0.0
    for piece in pieces:
        if piece[0] == "line":
            total += _integrate_line(piece[1], piece[2], max_step)
        else:
            total += _integrate_arc(piece[1], piece[2], piece[3], piece[4], max_step)
    return total


def hyp_distance_lower_two_punctures(z: complex, w: complex,
                                     p: complex, q: complex,
                                     clearance: float = 1e-3) -> MetricBound:
    """Lower bound on the twice-punctured-plane distance between z and w.

    Affinely normalizes the punctures to {0, 1} (the construction is exactly
    invariant under that change of variables), then integrates the pointwise
    density floor along the straight segment, detoured around any puncture
    the segment meets.  Whenever both punctures avoid a domain containing z
    and w, the same value lower-bounds that domain's metric.
    """
    if p == q:
        raise ValueError("punctures must be distinct")
    if z in (p, q) or w in (p, q):
        raise ValueError("endpoints must avoid the punctures")
    if z == w:
        return MetricBound("distance_lower", 0.0, "coincident points")
    a = (z - p) / (q - p)
    b = (w - p) / (q - p)
    pieces = detoured_path(a, b, clearance)
    value = integrate_density_floor(pieces)
    n_arcs = sum(1 for piece in pieces if piece[0] == "arc")
    basis = "two-puncture density floor along the straight segment"
    if n_arcs:
        basis += f" with {n_arcs} detour arc(s)"
    return MetricBound("distance_lower", value, basis)
