"""Dynamics-type verdicts from certified step-ratio enclosures.

True limits (vanishing ratios, positive liminf, infimum over the domain)
are undecidable from finite data, so the decision rules are windowed
proxies with explicit thresholds.  Every verdict ships the per-seed window
statistics so a reviewer can re-threshold without recomputing.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UncertifiedPointError
from .hypmetric import MetricBound, hyp_distance_lower_two_punctures
from .mapfamily import MapModel, dist_to_poles, eval_f, is_pole, nearest_pole
from .orbits import iterate_batch, step_ratio_series


class Verdict(enum.Enum):
    PARABOLIC_I = "parabolic-I"
    PARABOLIC_II_SIGNATURE = "parabolic-II-signature"
    HYPERBOLIC = "hyperbolic"
    INCONCLUSIVE = "inconclusive"


@dataclass
class SeedEvidence:
    """Window statistics of one seed's ratio enclosures."""

    seed: complex
    included: bool
    note: str
    late_max_upper: float = math.nan
    mid_max_upper: float = math.nan
    late_min_lower: float = math.nan
    global_min_lower: float = math.nan
    n_uncertified: int = 0


@dataclass
class TypeVerdict:
    verdict: Verdict
    evidence: list[SeedEvidence]
    n_steps: int
    tau_zero: float
    tau_pos: float
    decay_factor: float


def classify(model: MapModel, seeds, n_steps: int,
             tau_zero: float | None = None, tau_pos: float = 0.05,
             decay_factor: float = 0.25) -> TypeVerdict:
    """Windowed-threshold verdict from the seeds' ratio enclosures.

    Rules, applied in order to the seeds whose enclosures certify:

    * PARABOLIC_I when every seed's late-window max upper ratio is below
      tau_zero and decreased from the mid window (ratios vanish).
    * HYPERBOLIC when the lower ratios stay above tau_pos at every seed and
      step (ratios bounded away from zero uniformly).
    * PARABOLIC_II_SIGNATURE when every seed's late-window lower ratio stays
      above the certified-smallness level tau_zero while the late-window max
      upper ratio decays across the seed family by at least decay_factor
      (per-seed positive liminf, vanishing infimum over escaping seeds).
      A signature only: positivity at finitely many seeds is not the type.
    * INCONCLUSIVE otherwise.

    Defaults: tau_zero = 10/n_steps (capped at tau_pos), tau_pos = 0.05.
    Requiring tau_zero <= tau_pos makes the first two rules mutually
    exclusive.
    """
    seeds = [complex(s) for s in np.asarray(seeds, dtype=np.complex128).ravel()]
    if not seeds:
        raise ValueError("need at least one seed")
    if n_steps < 100:
        raise ValueError("n_steps must be at least 100")
    if tau_zero is None:
        tau_zero = min(10.0 / n_steps, tau_pos)
    if not (0.0 < tau_zero <= tau_pos):
        raise ValueError("thresholds must satisfy 0 < tau_zero <= tau_pos")
    if not (0.0 < decay_factor < 1.0):
        raise ValueError("decay_factor must lie in (0, 1)")

    mid_lo, late_lo = n_steps // 4, n_steps // 2
    evidence: list[SeedEvidence] = []
    for seed, orbit in zip(seeds, iterate_batch(model, seeds, n_steps)):
        if orbit.truncated_at is not None:
            evidence.append(SeedEvidence(seed, False,
                                         f"orbit truncated at step {orbit.truncated_at}"))
            continue
        ratios = step_ratio_series(model, orbit)
        uppers = np.array([iv.upper for iv in ratios])
        lowers = np.array([iv.lower for iv in ratios])
        windowed = uppers[mid_lo:]
        n_uncert = int(np.sum(~np.isfinite(windowed)))
        ev = SeedEvidence(
            seed=seed,
            included=n_uncert == 0,
            note="" if n_uncert == 0 else "uncertified enclosures in the decision windows",
            late_max_upper=float(uppers[late_lo:].max(initial=-math.inf)),
            mid_max_upper=float(uppers[mid_lo:late_lo].max(initial=-math.inf)),
            late_min_lower=float(lowers[late_lo:].min(initial=math.inf)),
            global_min_lower=float(lowers.min(initial=math.inf)),
            n_uncertified=n_uncert,
        )
        evidence.append(ev)

    included = [ev for ev in evidence if ev.included]
    verdict = Verdict.INCONCLUSIVE
    if included:
        if all(ev.late_max_upper < tau_zero and ev.late_max_upper < ev.mid_max_upper
               for ev in included):
            verdict = Verdict.PARABOLIC_I
        elif min(ev.global_min_lower for ev in included) > tau_pos:
            verdict = Verdict.HYPERBOLIC
        elif (len(included) >= 2
              and all(ev.late_min_lower > tau_zero for ev in included)
              and min(ev.late_max_upper for ev in included)
              < decay_factor * max(ev.late_max_upper for ev in included)):
            verdict = Verdict.PARABOLIC_II_SIGNATURE

    return TypeVerdict(verdict=verdict, evidence=evidence, n_steps=n_steps,
                       tau_zero=tau_zero, tau_pos=tau_pos,
                       decay_factor=decay_factor)


@dataclass
class OneStepSample:
    point: complex
    image: complex
    puncture: complex
    bound: MetricBound


@dataclass
class OneStepReport:
    """Single-application displacement bounds against nearest pole pairs.

    A positive minimum over a covering sample, with both punctures outside
    the invariant domain, is evidence that the one-step hyperbolic
    displacement is bounded below, hence for hyperbolic type.
    """

    min_bound: float
    samples: list[OneStepSample] = field(default_factory=list)
    n_skipped: int = 0
    n_detoured: int = 0
    punctures_in_pole_set: bool = True


def hyperbolic_one_step_test(model: MapModel, samples) -> OneStepReport:
    """Lower-bound the displacement distance of f at each certified sample.

    For every sample certified inside the invariant domain, bounds the
    hyperbolic distance between z and f(z) from below through the plane
    punctured at the nearest pole p and at p+1.  The report notes whether
    p+1 is itself always a pole (required for the punctured-plane
    comparison to bound the domain metric).
    """
    pts = [complex(s) for s in np.asarray(samples, dtype=np.complex128).ravel()]
    if not pts:
        raise ValueError("need at least one sample")
    out: list[OneStepSample] = []
    skipped = 0
    detoured = 0
    punctures_ok = True
    for z in pts:
        _, d_tilde = dist_to_poles(model, z)
        if not d_tilde > model.delta:
            skipped += 1
            continue
        w, _ = eval_f(model, z)
        p = nearest_pole(model, z)
        bound = hyp_distance_lower_two_punctures(z, w, p, p + 1)
        if "detour" in bound.basis:
            detoured += 1
        if not is_pole(model.case, p + 1):
            punctures_ok = False
        out.append(OneStepSample(point=z, image=w, puncture=p, bound=bound))
    if not out:
        raise UncertifiedPointError("no sample certified inside the invariant domain")
    return OneStepReport(
        min_bound=min(s.bound.value for s in out),
        samples=out,
        n_skipped=skipped,
        n_detoured=detoured,
        punctures_in_pole_set=punctures_ok,
    )
