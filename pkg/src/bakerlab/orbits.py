"""Forward orbits with certified drift, step-ratio enclosures, translation charts.

Orbits are iterated in drift coordinates: the state is the deviation
u_n = f^n(z) - z - n, updated by u_{n+1} = u_n + e(f^n(z)).  The deviation
stays below epsilon/2 for certified models, so float roundoff in the
accumulator is bounded by steps * eps_machine * O(epsilon) instead of
growing with |f^n(z)|.  Points are reconstructed as z + n + u_n; that
reconstruction is also the evaluation argument, so the stored points are
exactly the arguments the series was evaluated at.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import polygamma

from .errors import CertificationError, PoleProximityError
from .parallel import map_ordered, worker_count
from .mapfamily import (
    BoundInterval,
    MapModel,
    PoleCase,
    NONZERO_INT_RECIP_SQ,
    _auto_radius,
    _dist_pole_array,
    _dist_translates_array,
    _err_numerator,
    _shell_tail,
    _window_for_radius,
    require_seed,
)

_EPS = float(np.finfo(np.float64).eps)

_MAX_ABEL_TERMS = 1 << 22
_MAX_ABEL_WINDOW = 1 << 14


@dataclass
class Orbit:
    """Finite forward orbit with drift and evaluation-error ledgers.

    drift is the primary accumulator; points[n] = start + n + drift[n] is
    the reconstruction used as the evaluation argument at every step.
    eval_err[n] bounds the certified distance between drift[n] and the true
    drift of the exact orbit (series truncation plus a crude 10*ulp-per-step
    roundoff majorant).
    """

    start: complex
    points: np.ndarray
    drift: np.ndarray
    step_err: np.ndarray
    eval_err: np.ndarray
    in_v: np.ndarray
    requested_steps: int
    truncated_at: int | None = None

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def complete(self) -> bool:
        return self.truncated_at is None and self.n_points == self.requested_steps + 1


@dataclass
class DriftReport:
    """Outcome of the drift certificate check."""

    ok: bool
    worst_margin: float
    failures: list[int] = field(default_factory=list)
    truncated: bool = False


@dataclass
class AbelValue:
    """Value of the translation chart psi with a certified tail bound."""

    value: complex
    tail_bound: float


def iterate(model: MapModel, z0: complex, n_steps: int) -> Orbit:
    """Forward orbit of length n_steps+1 started at z0.

    Requires dist(z0, pole translates) >= 2*epsilon.  Aborts early (with
    the truncation step recorded, never silently) if an iterate comes
    within epsilon/2 of a pole; nothing downstream is certifiable there.
    """
    require_seed(model, z0)
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    orbits = _iterate_batch_arrays(model, np.asarray([z0], dtype=np.complex128), n_steps)
    return orbits[0]


def iterate_batch(model: MapModel, seeds, n_steps: int) -> list[Orbit]:
    """Vectorized orbits for many seeds; semantics identical per seed.

    Seeds are independent, so the batch may be chunked across worker
    threads (BAKERLAB_THREADS); results do not depend on the chunking.
    """
    seeds = np.asarray(seeds, dtype=np.complex128).ravel()
    for z0 in seeds:
        require_seed(model, complex(z0))
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    workers = worker_count()
    if workers <= 1 or len(seeds) <= workers:
        return _iterate_batch_arrays(model, seeds, n_steps)
    chunks = np.array_split(seeds, workers)
    parts = map_ordered(lambda c: _iterate_batch_arrays(model, c, n_steps), chunks)
    return [orbit for part in parts for orbit in part]


def _scalar_pole_dist(case: PoleCase):
    """Per-case closed-form pole distance on python scalars (hot-loop path)."""
    hypot = math.hypot
    if case is PoleCase.CASE_I:
        return lambda z: hypot(z.real, z.imag - round(z.imag))
    if case is PoleCase.CASE_II:
        return lambda z: hypot(z.real - round(z.real), z.imag)
    if case is PoleCase.CASE_II_PLUS:
        return lambda z: hypot(z.real - max(round(z.real), 1.0), z.imag)
    return lambda z: hypot(z.real - round(z.real), z.imag - round(z.imag))


def _finalize_orbit(model: MapModel, seed: complex, pts, drift, step_err,
                    ledger, n_steps: int, truncated_at: int | None) -> Orbit:
    pts = np.asarray(pts, dtype=np.complex128)
    in_v = _dist_translates_array(model, pts) >= model.epsilon - 1e-12
    return Orbit(start=complex(seed), points=pts,
                 drift=np.asarray(drift, dtype=np.complex128),
                 step_err=np.asarray(step_err, dtype=np.float64),
                 eval_err=np.asarray(ledger, dtype=np.float64),
                 in_v=in_v, requested_steps=n_steps, truncated_at=truncated_at)


def _iterate_scalar(model: MapModel, z0: complex, n_steps: int) -> Orbit:
    guard = 0.5 * model.epsilon
    dist = _scalar_pole_dist(model.case)
    amp = model.coeff_amplitude != 0.0
    if amp:
        win = _window_for_radius(model, _auto_radius(model))
        poles, coeffs = win.poles, win.coeffs
        err_num = _err_numerator(model, win)
    d_cur = dist(z0)
    if d_cur < 1e3 * _EPS * max(1.0, abs(z0)):
        raise PoleProximityError("seed within machine distance of a pole")
    pts = [z0]
    drift = [0j]
    step_err = []
    ledger = [0.0]
    z, u, led = z0, 0j, 0.0
    truncated_at = None
    for n in range(n_steps):
        if amp:
            diff = z - poles
            e = complex((coeffs / (diff * diff)).sum())
            e_err = err_num / (d_cur * d_cur)
        else:
            e, e_err = 0j, 0.0
        u = u + e
        zn = (z0 + (n + 1)) + u
        pts.append(zn)
        drift.append(u)
        step_err.append(e_err)
        led = led + e_err + 10.0 * _EPS * abs(zn)
        ledger.append(led)
        d_cur = dist(zn)
        if d_cur < guard:
            truncated_at = n + 1
            break
        z = zn
    return _finalize_orbit(model, z0, pts, drift, step_err, ledger,
                           n_steps, truncated_at)


def _iterate_batch_arrays(model: MapModel, seeds: np.ndarray, n_steps: int) -> list[Orbit]:
    if len(seeds) == 1:
        return [_iterate_scalar(model, complex(seeds[0]), n_steps)]
    n_seeds = len(seeds)
    guard = 0.5 * model.epsilon
    amp = model.coeff_amplitude != 0.0
    if amp:
        win = _window_for_radius(model, _auto_radius(model))
        poles, coeffs = win.poles, win.coeffs
        err_num = _err_numerator(model, win)
    pts = np.empty((n_steps + 1, n_seeds), dtype=np.complex128)
    drift = np.zeros((n_steps + 1, n_seeds), dtype=np.complex128)
    step_err = np.zeros((n_steps, n_seeds), dtype=np.float64)
    ledger = np.zeros((n_steps + 1, n_seeds), dtype=np.float64)
    trunc = np.full(n_seeds, -1, dtype=np.int64)

    pts[0] = seeds
    u = np.zeros(n_seeds, dtype=np.complex128)
    active = np.ones(n_seeds, dtype=bool)
    all_active = True
    d_cur = _dist_pole_array(model, seeds)
    if np.any(d_cur < 1e3 * _EPS * np.maximum(1.0, np.abs(seeds))):
        raise PoleProximityError("seed within machine distance of a pole")
    for n in range(n_steps):
        if not active.any():
            pts[n + 1:, :] = np.nan
            break
        sel = slice(None) if all_active else active
        z_n = pts[n, sel]
        if amp:
            diff = z_n[:, None] - poles
            e_val = (coeffs / (diff * diff)).sum(axis=-1)
            e_err = err_num / (d_cur[sel] * d_cur[sel])
        else:
            e_val = np.zeros(len(z_n), dtype=np.complex128)
            e_err = np.zeros(len(z_n), dtype=np.float64)
        u_act = u[sel] + e_val
        z_next = (seeds[sel] + (n + 1)) + u_act
        u[sel] = u_act
        if not all_active:
            pts[n + 1, ~active] = np.nan
        pts[n + 1, sel] = z_next
        drift[n + 1, sel] = u_act
        step_err[n, sel] = e_err
        ledger[n + 1, sel] = ledger[n, sel] + e_err + 10.0 * _EPS * np.abs(z_next)
        # pole-proximity guard: abort the affected seeds, keep the rest
        d_next = _dist_pole_array(model, z_next)
        d_cur[sel] = d_next
        hit = d_next < guard
        if hit.any():
            idx = np.flatnonzero(active)[hit] if not all_active \
                else np.flatnonzero(hit)
            trunc[idx] = n + 1
            keep = active.copy()
            keep[idx] = False
            active = keep
            all_active = False

    out: list[Orbit] = []
    for s in range(n_seeds):
        last = n_steps if trunc[s] < 0 else int(trunc[s])
        out.append(_finalize_orbit(
            model, complex(seeds[s]), pts[: last + 1, s].copy(),
            drift[: last + 1, s].copy(), step_err[:last, s].copy(),
            ledger[: last + 1, s].copy(), n_steps,
            None if trunc[s] < 0 else int(trunc[s])))
    return out


def drift_certificate(orbit: Orbit, model: MapModel) -> DriftReport:
    """Check |drift[n]| < epsilon/2 - eval_err[n] and the collar flag per step.

    Returns the worst margin; any violation (or a truncated orbit) fails
    the certificate with the offending indices listed.
    """
    margins = 0.5 * model.epsilon - orbit.eval_err - np.abs(orbit.drift)
    bad = np.flatnonzero((margins <= 0.0) | ~orbit.in_v)
    truncated = orbit.truncated_at is not None
    ok = bad.size == 0 and not truncated and orbit.complete
    worst = float(margins.min()) if margins.size else math.inf
    return DriftReport(ok=ok, worst_margin=worst,
                       failures=[int(b) for b in bad], truncated=truncated)


def _boundary_interval_lenient(model: MapModel, d_pole: float, d_tilde: float) -> BoundInterval:
    # orbit points sit in the invariant domain by forward invariance, so the
    # pole distance is always a valid upper end; the lower end degenerates
    # to 0 when the point is inside the delta collar
    return BoundInterval(max(0.0, d_tilde - model.delta), d_pole)


def ratio_enclosure(step_abs: float, dist_iv: BoundInterval) -> BoundInterval:
    """Enclosure of step/dist given |step| and a distance enclosure."""
    if step_abs < 0.0:
        raise ValueError("step_abs must be nonnegative")
    upper = step_abs / dist_iv.lower if dist_iv.lower > 0.0 else math.inf
    lower = step_abs / dist_iv.upper if math.isfinite(dist_iv.upper) else 0.0
    return BoundInterval(lower, upper)


def step_ratio_series(model: MapModel, orbit: Orbit) -> list[BoundInterval]:
    """Per-step enclosures of |f^{n+1}(z) - f^n(z)| / dist(f^n(z), boundary).

    The upper end is flagged +inf whenever the point is not certified
    outside the delta collar (lower distance 0).
    """
    pts = orbit.points
    if len(pts) < 2:
        return []
    step_abs = np.abs(pts[1:] - pts[:-1])
    d_pole = _dist_pole_array(model, pts[:-1])
    d_tilde = _dist_translates_array(model, pts[:-1])
    out = []
    for n in range(len(step_abs)):
        iv = _boundary_interval_lenient(model, float(d_pole[n]), float(d_tilde[n]))
        out.append(ratio_enclosure(float(step_abs[n]), iv))
    return out


# ---------------------------------------------------------------------------
# translation chart (solution of psi(f(z)) = psi(z) + 1)
# ---------------------------------------------------------------------------

def _per_coeff_orbit_constant(case: PoleCase, epsilon: float) -> float:
    # whole-orbit bound of sum_k 1/dist(z_k, p)^2 per unit coefficient mass
    if case in (PoleCase.CASE_II, PoleCase.CASE_II_PLUS):
        c = 1.0 + 4.0 * NONZERO_INT_RECIP_SQ
    else:
        c = 1.0 + 16.0 * NONZERO_INT_RECIP_SQ
    return 4.0 * c / (epsilon * epsilon)


def _abel_window_radius(model: MapModel, far_budget: float) -> int:
    """Pole-window radius whose excluded mass certifies far_budget."""
    orbit_const = _per_coeff_orbit_constant(model.case, model.epsilon)
    radius = max(2, _auto_radius(model))
    while (model.coeff_amplitude
           * _shell_tail(model.case, model.coeff_decay, radius)
           * orbit_const) > far_budget:
        radius *= 2
        if radius > _MAX_ABEL_WINDOW:
            raise CertificationError(
                "cannot certify the far-pole contribution at this tolerance")
    return radius


def _series_tail_bound(model: MapModel, z: complex, n_terms: int,
                       radius: int, far_total: float) -> float:
    """Certified bound of sum_{k > n_terms} |e(f^k(z))|.

    Uses the drift tube f^k(z) = z + k + O(epsilon/2) together with the
    in-collar guarantee dist(f^k(z), poles) >= epsilon: for a pole p the
    k-th term is at most 1/max(epsilon, |k - Re(p-z)| - epsilon/2)^2 up to
    the coefficient, summed explicitly near the close pass and by a
    trigamma tail beyond it.  Poles outside the window contribute at most
    their total coefficient mass times the whole-orbit constant.
    """
    eps = model.epsilon
    win = _window_for_radius(model, radius)
    cp = win.poles.real - z.real
    hp = np.abs(z.imag - win.poles.imag)
    span = max(48, int(math.ceil(float(cp.max(initial=0.0)) - n_terms)) + 48)
    ks = np.arange(n_terms + 1, n_terms + 1 + span, dtype=np.float64)
    gap = np.maximum(np.abs(ks[None, :] - cp[:, None]), hp[:, None]) - 0.5 * eps
    lb = np.maximum(eps, gap)
    near = (1.0 / (lb * lb)).sum(axis=1)
    rest = polygamma(1, (n_terms + 1 + span) - cp - 0.5 * eps)
    return float((win.coeffs * (near + rest)).sum()) + far_total


def abel(model: MapModel, z: complex, tol: float = 1e-10) -> AbelValue:
    """Translation chart psi(z) = z + sum_{k>=0} e(f^k(z)), tail below tol.

    psi satisfies psi(f(z)) = psi(z) + 1 up to twice the tail bound plus the
    evaluation ledger.  Requires a certified seed; raises CertificationError
    when the tail cannot be certified (truncated orbit or runaway window).
    """
    require_seed(model, z)
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if model.coeff_amplitude == 0.0:
        return AbelValue(complex(z), 0.0)

    far_budget = 0.1 * tol
    radius = _abel_window_radius(model, far_budget)
    far_total = (model.coeff_amplitude
                 * _shell_tail(model.case, model.coeff_decay, radius)
                 * _per_coeff_orbit_constant(model.case, model.epsilon))

    n_terms = 64
    while _series_tail_bound(model, z, n_terms, radius, far_total) > tol:
        n_terms *= 2
        if n_terms > _MAX_ABEL_TERMS:
            raise CertificationError(
                f"series tail does not certify at tol={tol} within "
                f"{_MAX_ABEL_TERMS} terms")
    tail = _series_tail_bound(model, z, n_terms, radius, far_total)

    orbit = iterate(model, z, n_terms + 1)
    if orbit.truncated_at is not None:
        raise CertificationError(
            f"orbit truncated at step {orbit.truncated_at}; tail not certifiable")
    report = drift_certificate(orbit, model)
    if not report.ok:
        raise CertificationError("orbit drift certificate failed; tail not certifiable")

    # telescoped partial sum: sum_{k<=n_terms} e(f^k(z)) = drift[n_terms+1]
    value = z + complex(orbit.drift[n_terms + 1])
    # drift-accumulator roundoff plus the effect of evaluating the series at
    # ulp-perturbed reconstructed points, bounded through |e'| <= 2*mass/d^3
    accum_crud = 4.0 * _EPS * (n_terms + 2) * (1.0 + model.epsilon)
    d_pole = _dist_pole_array(model, orbit.points)
    arg_crud = float((2.0 * model.coeff_sum * _EPS
                      * np.abs(orbit.points) / d_pole ** 3).sum())
    tail_bound = tail + float(orbit.step_err.sum()) + accum_crud + arg_crud
    return AbelValue(value=value, tail_bound=tail_bound)
