"""Translation-plus-pole-field map family with certified series evaluation.

The maps have the form

    f(z) = z + 1 + e(z),        e(z) = sum_p a_p / (z - p)^2,

where the pole set is one of four configurations (imaginary axis, integers,
positive integers, full integer lattice) and the coefficients are small,
real, positive, and geometrically decaying:  a_p = A * r^{|p|_1}.

The amplitude A is sized so the total coefficient mass stays below a budget
that certifies the forward-orbit drift bound: every orbit started at least
2*epsilon away from the pole translates stays within epsilon/2 of the free
translation z + n.  All series evaluations carry certified truncation-error
bounds, and boundary distances are only ever reported as enclosures.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PoleProximityError, UncertifiedPointError

# sum_{k in Z, k != 0} 1/k^2 = pi^2/3, the cross-pass constant of the budget.
NONZERO_INT_RECIP_SQ = math.pi * math.pi / 3.0

_EPS = float(np.finfo(np.float64).eps)

# Hard ceiling on the L1 truncation radius of the pole window.
_MAX_WINDOW_RADIUS = 1 << 16


class PoleCase(enum.Enum):
    """Pole configuration tag."""

    CASE_I = "i"          # poles on the imaginary axis i*Z
    CASE_II = "ii"        # poles on the integers Z
    CASE_II_PLUS = "ii+"  # poles on the positive integers 1, 2, 3, ...
    CASE_III = "iii"      # poles on the integer lattice Z + i*Z

    @classmethod
    def from_tag(cls, tag: str) -> "PoleCase":
        tag = tag.strip().lower()
        for case in cls:
            if case.value == tag:
                return case
        raise ValueError(f"unknown pole case tag {tag!r}; expected one of "
                         f"{[c.value for c in cls]}")


@dataclass(frozen=True)
class BoundInterval:
    """Certified enclosure [lower, upper] of a nonnegative real quantity."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.lower <= self.upper):
            raise ValueError(f"invalid enclosure [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def certified(self) -> bool:
        """False when the enclosure degenerated to an infinite upper end."""
        return math.isfinite(self.upper)

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


@dataclass(frozen=True)
class MapModel:
    """Fully specified member of the map family.

    epsilon is the orbit-drift scale, delta = 2*epsilon the excluded-disk
    radius around the pole translates.  coeff_amplitude may be zero (pure
    translation), which is only meaningful as a test fixture.
    """

    case: PoleCase
    epsilon: float
    delta: float
    coeff_amplitude: float
    coeff_decay: float
    tail_tol: float = 1e-14

    def __post_init__(self) -> None:
        if not (0.0 < self.epsilon <= 0.5):
            raise ValueError(f"epsilon must lie in (0, 1/2], got {self.epsilon}")
        if abs(self.delta - 2.0 * self.epsilon) > 1e-12 * self.epsilon:
            raise ValueError("delta must equal 2*epsilon")
        if not (0.0 < self.coeff_decay < 1.0):
            raise ValueError(f"coeff_decay must lie in (0, 1), got {self.coeff_decay}")
        if self.coeff_amplitude < 0.0:
            raise ValueError("coeff_amplitude must be nonnegative")
        if not (1e-15 <= self.tail_tol <= 1e-2):
            raise ValueError("tail_tol must lie in [1e-15, 1e-2]")
        budget = coefficient_budget(self.case, self.epsilon)
        if self.coeff_sum > budget:
            raise ValueError(
                f"coefficient mass {self.coeff_sum:.6g} exceeds the certified "
                f"budget {budget:.6g} for case {self.case.value}")

    @property
    def coeff_sum(self) -> float:
        """Total coefficient mass sum_p a_p (closed form)."""
        return self.coeff_amplitude * coeff_normalizer(self.case, self.coeff_decay)


def _check_epsilon(epsilon: float) -> None:
    if not (0.0 < epsilon <= 0.5):
        raise ValueError(f"epsilon must lie in (0, 1/2], got {epsilon}")


def coefficient_budget(case: PoleCase, epsilon: float) -> float:
    """Coefficient-mass budget certifying the summed perturbation bound.

    If sum_p a_p <= budget, then along any chain z_k = z_0 + k + O(eps/2)
    that starts at least eps away from every pole translate, the summed
    perturbation satisfies sum_k |e(z_k)| < eps/2.  Each pole contributes
    at most a_p * 4/eps^2 from its single close pass plus
    a_p * (c/eps^2) * sum_{k != 0} 1/k^2 from all other passes, where
    c = 16 when the poles sit on a line of integers and c = 64 on the full
    lattice.  The imaginary-axis configuration reuses the (conservative)
    lattice constant.
    """
    _check_epsilon(epsilon)
    if case in (PoleCase.CASE_II, PoleCase.CASE_II_PLUS):
        per_unit = 1.0 + 4.0 * NONZERO_INT_RECIP_SQ
    else:
        per_unit = 1.0 + 16.0 * NONZERO_INT_RECIP_SQ
    return epsilon ** 3 / (8.0 * per_unit)


def coeff_normalizer(case: PoleCase, decay: float) -> float:
    """Closed form of sum_{p in pole set} decay^{|p|_1}."""
    if not (0.0 < decay < 1.0):
        raise ValueError(f"decay must lie in (0, 1), got {decay}")
    r = decay
    line = (1.0 + r) / (1.0 - r)
    if case in (PoleCase.CASE_I, PoleCase.CASE_II):
        return line
    if case is PoleCase.CASE_II_PLUS:
        return r / (1.0 - r)
    return line * line


def build_map(case: PoleCase, epsilon: float, decay: float = 0.25,
              safety: float = 0.9, tail_tol: float = 1e-14) -> MapModel:
    """Construct a model whose coefficient mass is safety * budget.

    Coefficients are real positive with geometric decay in the L1 pole
    norm; the normalizer is closed form, so the budget invariant holds by
    construction with strict inequality.
    """
    _check_epsilon(epsilon)
    if not (0.0 < safety < 1.0):
        raise ValueError(f"safety must lie in (0, 1), got {safety}")
    budget = coefficient_budget(case, epsilon)
    amplitude = safety * budget / coeff_normalizer(case, decay)
    return MapModel(case=case, epsilon=epsilon, delta=2.0 * epsilon,
                    coeff_amplitude=amplitude, coeff_decay=decay,
                    tail_tol=tail_tol)


def pole_l1(p: complex) -> int:
    """L1 norm of a pole, which must have integer coordinates."""
    j = round(p.real)
    m = round(p.imag)
    if abs(p.real - j) > 1e-9 or abs(p.imag - m) > 1e-9:
        raise ValueError(f"{p} is not an integer-lattice point")
    return abs(j) + abs(m)


def is_pole(case: PoleCase, p: complex, tol: float = 1e-9) -> bool:
    x, y = p.real, p.imag
    on_int = lambda t: abs(t - round(t)) <= tol
    if case is PoleCase.CASE_I:
        return abs(x) <= tol and on_int(y)
    if case is PoleCase.CASE_II:
        return on_int(x) and abs(y) <= tol
    if case is PoleCase.CASE_II_PLUS:
        return on_int(x) and round(x) >= 1 and abs(y) <= tol
    return on_int(x) and on_int(y)


def coefficient(model: MapModel, p: complex) -> float:
    """Coefficient a_p attached to the pole p."""
    if not is_pole(model.case, p):
        raise ValueError(f"{p} is not a pole of case {model.case.value}")
    return model.coeff_amplitude * model.coeff_decay ** pole_l1(p)


# ---------------------------------------------------------------------------
# pole window tables
# ---------------------------------------------------------------------------

def _shell_tail(case: PoleCase, decay: float, radius: int) -> float:
    """Closed form of sum_{|p|_1 > radius} decay^{|p|_1}."""
    r = decay
    if case is PoleCase.CASE_II_PLUS:
        return r ** (radius + 1) / (1.0 - r)
    if case in (PoleCase.CASE_I, PoleCase.CASE_II):
        return 2.0 * r ** (radius + 1) / (1.0 - r)
    # lattice shells have 4*s points at L1 radius s >= 1
    return 4.0 * r ** (radius + 1) * ((radius + 1) - radius * r) / (1.0 - r) ** 2


def _enumerate_poles(case: PoleCase, radius: int) -> np.ndarray:
    """Poles with |p|_1 <= radius in deterministic shell order."""
    pts: list[complex] = []
    if case is PoleCase.CASE_I:
        pts.append(0j)
        for s in range(1, radius + 1):
            pts.extend((1j * s, -1j * s))
    elif case is PoleCase.CASE_II:
        pts.append(0j)
        for s in range(1, radius + 1):
            pts.extend((complex(s), complex(-s)))
    elif case is PoleCase.CASE_II_PLUS:
        pts.extend(complex(s) for s in range(1, radius + 1))
    else:
        pts.append(0j)
        for s in range(1, radius + 1):
            for j in range(-s, s + 1):
                m = s - abs(j)
                pts.append(complex(j, m))
                if m != 0:
                    pts.append(complex(j, -m))
    return np.asarray(pts, dtype=np.complex128)


@dataclass(frozen=True)
class _Window:
    poles: np.ndarray        # complex128, |p|_1 <= radius
    coeffs: np.ndarray       # float64 a_p in matching order
    radius: int
    tail_coeff_sum: float    # sum of a_p with |p|_1 > radius


@lru_cache(maxsize=256)
def _window_for_radius(model: MapModel, radius: int) -> _Window:
    poles = _enumerate_poles(model.case, radius)
    shells = np.abs(np.rint(poles.real)) + np.abs(np.rint(poles.imag))
    coeffs = model.coeff_amplitude * model.coeff_decay ** shells
    tail = model.coeff_amplitude * _shell_tail(model.case, model.coeff_decay, radius)
    return _Window(poles=poles, coeffs=coeffs, radius=radius, tail_coeff_sum=tail)


@lru_cache(maxsize=256)
def _auto_radius(model: MapModel) -> int:
    """Smallest doubling radius whose coefficient tail certifies tail_tol.

    The criterion sum_{|p|_1 > R} a_p <= tail_tol * sum_p a_p makes the
    evaluation error bound a_tail / dist(z, poles)^2 at most
    tail_tol * coeff_sum / dist(z, poles)^2 irrespective of z.
    """
    if model.coeff_amplitude == 0.0:
        return 1
    target = model.tail_tol * coeff_normalizer(model.case, model.coeff_decay)
    radius = 1
    while _shell_tail(model.case, model.coeff_decay, radius) > target:
        radius *= 2
        if radius > _MAX_WINDOW_RADIUS:
            raise ValueError("pole window radius exploded; decay too close to 1")
    return radius


def truncation_radius(model: MapModel) -> int:
    """L1 radius of the adaptively chosen pole window."""
    return _auto_radius(model)


def poles_in_box(model: MapModel, x_min: float, x_max: float,
                 y_min: float, y_max: float) -> np.ndarray:
    """All poles inside the closed axis-aligned box, deterministically ordered."""
    if x_min > x_max or y_min > y_max:
        raise ValueError("empty box")
    pts: list[complex] = []
    if model.case is PoleCase.CASE_I:
        if x_min <= 0.0 <= x_max:
            for m in range(math.ceil(y_min), math.floor(y_max) + 1):
                pts.append(complex(0, m))
    elif model.case in (PoleCase.CASE_II, PoleCase.CASE_II_PLUS):
        lo = math.ceil(x_min)
        if model.case is PoleCase.CASE_II_PLUS:
            lo = max(lo, 1)
        if y_min <= 0.0 <= y_max:
            for n in range(lo, math.floor(x_max) + 1):
                pts.append(complex(n, 0))
    else:
        for j in range(math.ceil(x_min), math.floor(x_max) + 1):
            for m in range(math.ceil(y_min), math.floor(y_max) + 1):
                pts.append(complex(j, m))
    return np.asarray(pts, dtype=np.complex128)


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def _dist_pole_array(model: MapModel, z: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance to the pole set (closed form)."""
    x, y = z.real, z.imag
    case = model.case
    if case is PoleCase.CASE_I:
        return np.hypot(x, y - np.rint(y))
    if case is PoleCase.CASE_II:
        return np.hypot(x - np.rint(x), y)
    if case is PoleCase.CASE_II_PLUS:
        return np.hypot(x - np.maximum(np.rint(x), 1.0), y)
    return np.hypot(x - np.rint(x), y - np.rint(y))


def _dist_translates_array(model: MapModel, z: np.ndarray) -> np.ndarray:
    """Exact distance to the union of left integer translates of the poles."""
    x, y = z.real, z.imag
    case = model.case
    if case is PoleCase.CASE_I:
        # translates fill the integer lattice points with Re <= 0
        return np.hypot(x - np.minimum(np.rint(x), 0.0), y - np.rint(y))
    if case in (PoleCase.CASE_II, PoleCase.CASE_II_PLUS):
        # left translates of Z (or of the positive integers) fill Z
        return np.hypot(x - np.rint(x), y)
    return np.hypot(x - np.rint(x), y - np.rint(y))


def dist_to_poles(model: MapModel, z: complex) -> tuple[float, float]:
    """(distance to the pole set, distance to its left-translate closure)."""
    arr = np.asarray(z, dtype=np.complex128)
    return (float(_dist_pole_array(model, arr)),
            float(_dist_translates_array(model, arr)))


def nearest_pole(model: MapModel, z: complex) -> complex:
    """The pole realizing dist(z, pole set); deterministic at ties."""
    x, y = z.real, z.imag
    case = model.case
    if case is PoleCase.CASE_I:
        return complex(0.0, np.rint(y))
    if case is PoleCase.CASE_II:
        return complex(np.rint(x), 0.0)
    if case is PoleCase.CASE_II_PLUS:
        return complex(max(np.rint(x), 1.0), 0.0)
    return complex(np.rint(x), np.rint(y))


def dist_to_boundary_interval(model: MapModel, z: complex) -> BoundInterval:
    """Certified enclosure of dist(z, boundary of the invariant domain).

    The complement of the domain lies inside the closed delta-disks around
    the pole translates together with infinity, which yields the lower end;
    every pole is outside the domain, which yields the upper end.
    """
    d_pole, d_tilde = dist_to_poles(model, z)
    if not d_tilde >= model.delta:
        raise UncertifiedPointError(
            f"point {z} is within delta={model.delta} of a pole translate; "
            "not certified inside the invariant domain")
    return BoundInterval(max(0.0, d_tilde - model.delta), d_pole)


def in_twice_collar(model: MapModel, z: complex, slack: float = 1e-12) -> bool:
    """True when dist(z, pole translates) >= 2*epsilon (up to float slack)."""
    _, d_tilde = dist_to_poles(model, z)
    return d_tilde >= 2.0 * model.epsilon - slack


def require_seed(model: MapModel, z: complex) -> None:
    if not in_twice_collar(model, z):
        raise UncertifiedPointError(
            f"seed {z} is closer than 2*epsilon={2 * model.epsilon} to a pole "
            "translate; orbit drift cannot be certified")


# ---------------------------------------------------------------------------
# series evaluation
# ---------------------------------------------------------------------------

def _clearance(z: np.ndarray) -> np.ndarray:
    return 1e3 * _EPS * np.maximum(1.0, np.abs(z))


def _err_numerator(model: MapModel, window: _Window) -> float:
    # truncation tail plus a pairwise-summation roundoff majorant; dividing
    # by dist(z, poles)^2 bounds both the excluded terms and 32 ulp times
    # the absolute term sum (window sizes stay far below 2^16 terms)
    return window.tail_coeff_sum + 32.0 * _EPS * model.coeff_sum


def _eval_e_array(model: MapModel, z: np.ndarray,
                  radius: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized e(z) with a certified absolute error bound per entry.

    The reported error is (coefficient tail outside the pole window plus a
    roundoff majorant) divided by the squared exact distance to the full
    pole set; every excluded pole is at least that far away.
    """
    z = np.asarray(z, dtype=np.complex128)
    d_pole = _dist_pole_array(model, z)
    if np.any(d_pole < _clearance(z)):
        raise PoleProximityError("evaluation point within machine distance of a pole")
    if model.coeff_amplitude == 0.0:
        return np.zeros_like(z), np.zeros(z.shape, dtype=np.float64)
    win = _window_for_radius(model, radius if radius is not None else _auto_radius(model))
    diff = z[..., None] - win.poles
    terms = win.coeffs / (diff * diff)
    value = terms.sum(axis=-1)
    err = _err_numerator(model, win) / (d_pole * d_pole)
    return value, err


def eval_e(model: MapModel, z: complex,
           radius: int | None = None) -> tuple[complex, float]:
    """Perturbation e(z) = sum_p a_p/(z-p)^2 with certified error bound."""
    val, err = _eval_e_array(model, np.asarray(z, dtype=np.complex128), radius)
    return complex(val), float(err)


def _eval_f_array(model: MapModel, z: np.ndarray,
                  radius: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    e_val, e_err = _eval_e_array(model, z, radius)
    value = z + 1.0 + e_val
    return value, e_err + _EPS * np.abs(value)


def eval_f(model: MapModel, z: complex,
           radius: int | None = None) -> tuple[complex, float]:
    """One map application f(z) = z + 1 + e(z) with certified error bound."""
    val, err = _eval_f_array(model, np.asarray(z, dtype=np.complex128), radius)
    return complex(val), float(err)
