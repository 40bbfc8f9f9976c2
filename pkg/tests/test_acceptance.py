"""Acceptance gate: every criterion at its stated tolerance, one line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
PASS lines and timings.
"""

import math
import time

import numpy as np
import pytest

import bakerlab as bl
from bakerlab import PoleCase, Verdict
from bakerlab.experiments import _cell_sample, absorbing_candidate_check

RNG_SEED = 20240809


def _sample_seeds(model, count, rng, box=(-4.0, 6.0, -6.0, 6.0)):
    out = []
    while len(out) < count:
        z = complex(rng.uniform(box[0], box[1]), rng.uniform(box[2], box[3]))
        if bl.dist_to_poles(model, z)[1] >= 2.0 * model.epsilon + 1e-9:
            out.append(z)
    return out


def _report(name: str, elapsed: float | None = None) -> None:
    suffix = f" ({elapsed:.2f}s)" if elapsed is not None else ""
    print(f"[ACCEPT] {name}: PASS{suffix}")


# ---------------------------------------------------------------------------
# 1. budget closed forms against independent series summation
# ---------------------------------------------------------------------------

def test_budget_closed_forms_against_series_oracle():
    t0 = time.perf_counter()
    ks = np.arange(1, 10 ** 7 + 1, dtype=np.float64)
    partial = float(np.sum(1.0 / (ks * ks)))
    recip_lo = 2.0 * (partial + 1.0 / (10 ** 7 + 1))
    recip_hi = 2.0 * (partial + 1.0 / 10 ** 7)
    recip_mid = 0.5 * (recip_lo + recip_hi)
    for eps in (0.05, 0.1, 0.2, 0.5):
        for case, mult in ((PoleCase.CASE_II, 4.0), (PoleCase.CASE_I, 16.0),
                           (PoleCase.CASE_III, 16.0)):
            oracle = eps ** 3 / (8.0 * (1.0 + mult * recip_mid))
            value = bl.coefficient_budget(case, eps)
            assert abs(value - oracle) / oracle < 1e-9
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    _report("budget closed forms (1e-9 relative, 12 combos)", elapsed)


# ---------------------------------------------------------------------------
# 2. drift certification: 100 random seeds per case, 1e4 steps
# ---------------------------------------------------------------------------

def test_drift_certification_random_seeds():
    t0 = time.perf_counter()
    rng = np.random.default_rng(RNG_SEED)
    for case in (PoleCase.CASE_I, PoleCase.CASE_II, PoleCase.CASE_III):
        model = bl.build_map(case, 0.1)
        seeds = _sample_seeds(model, 100, rng)
        for orbit in bl.iterate_batch(model, seeds, 10 ** 4):
            assert orbit.truncated_at is None
            assert np.abs(orbit.drift).max() < 0.5 * model.epsilon
            report = bl.drift_certificate(orbit, model)
            assert report.ok and report.worst_margin > 0.0
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    _report("drift certification (3 cases x 100 seeds x 1e4 steps)", elapsed)


# ---------------------------------------------------------------------------
# 3. translation-chart equation, 100 seeds
# ---------------------------------------------------------------------------

def test_translation_chart_equation():
    t0 = time.perf_counter()
    model = bl.build_map(PoleCase.CASE_I, 0.1)
    rng = np.random.default_rng(RNG_SEED + 1)
    seeds = _sample_seeds(model, 100, rng)
    tol = 2.5e-10
    worst = 0.0
    for seed in seeds:
        chart = bl.abel(model, seed, tol)
        image, _ = bl.eval_f(model, seed)
        chart_image = bl.abel(model, image, tol)
        worst = max(worst, abs(chart_image.value - chart.value - 1.0))
    assert worst < 1e-9
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    _report(f"translation-chart equation (100 seeds, worst {worst:.2e})", elapsed)


# ---------------------------------------------------------------------------
# 4. imaginary-axis configuration: vanishing ratios
# ---------------------------------------------------------------------------

def test_case_i_ratio_decay_and_verdict():
    model = bl.build_map(PoleCase.CASE_I, 0.1)
    orbit = bl.iterate(model, 1.0 + 0j, 1001)
    ratios = bl.step_ratio_series(model, orbit)
    for n in range(10, 1001):
        assert ratios[n].upper < 2.0 / n
    verdict = bl.classify(model, [1.0 + 0j, 2.0 + 1.0j], 1000)
    assert verdict.verdict is Verdict.PARABOLIC_I
    _report("case i: upper(s_n) < 2/n on [10, 1000] and parabolic-I verdict")


# ---------------------------------------------------------------------------
# 5. integer-line configuration: per-seed bands and family decay
# ---------------------------------------------------------------------------

def test_case_ii_bands_and_family_decay():
    model = bl.build_map(PoleCase.CASE_II, 0.1)
    n_steps = 1001
    late_max_upper = {}
    for k in range(1, 21):
        orbit = bl.iterate(model, 1j * k, n_steps)
        ratios = bl.step_ratio_series(model, orbit)
        for iv in ratios:
            assert 1.0 / (4 * k) < iv.lower <= iv.upper < 4.0 / k
        late_max_upper[k] = max(iv.upper for iv in ratios[n_steps // 2:])
    assert late_max_upper[20] < 0.25 * late_max_upper[1]
    _report("case ii: enclosures within (1/(4k), 4/k), k=20 window < k=1/4")


# ---------------------------------------------------------------------------
# 6. lattice configuration: uniform ratio floor and hyperbolic verdict
# ---------------------------------------------------------------------------

def test_case_iii_ratio_floor_one_step_and_verdict():
    t0 = time.perf_counter()
    model = bl.build_map(PoleCase.CASE_III, 0.1)
    grid = _cell_sample(model, 32)
    assert len(grid) > 800  # 32x32 grid minus the corner exclusions
    floor = math.inf
    for orbit in bl.iterate_batch(model, grid, 1000):
        assert orbit.truncated_at is None
        floor = min(floor, min(iv.lower for iv in bl.step_ratio_series(model, orbit)))
    assert floor > 0.5

    one_step = bl.hyperbolic_one_step_test(model, grid)
    assert one_step.min_bound > 0.0
    assert one_step.punctures_in_pole_set

    verdict = bl.classify(model, _cell_sample(model, 8), 1000)
    assert verdict.verdict is Verdict.HYPERBOLIC
    _report(f"case iii: ratio floor {floor:.3f} > 0.5, one-step "
            f"{one_step.min_bound:.3f} > 0, hyperbolic verdict",
            time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 7 & 8. loop discrimination and winding persistence
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def loop_reports():
    reports = {}
    for case in (PoleCase.CASE_I, PoleCase.CASE_II, PoleCase.CASE_III):
        model = bl.build_map(case, 0.1)
        loop = bl.LoopPath.square(0j, 0.5, 0.1)
        current = bl.refine_loop(model, loop)
        contract = []
        for n in range(21):
            contract.append(bl.contractibility(model, current))
            if n < 20:
                current = bl.push_forward(model, current)
        persistence = bl.persistence_check(model, loop, 20)
        reports[case] = (contract, persistence)
    return reports


def test_loop_discrimination(loop_reports):
    for case in (PoleCase.CASE_II, PoleCase.CASE_III):
        contract, _ = loop_reports[case]
        for n in range(1, 21):
            report = contract[n]
            assert report.certified
            assert report.contractible is False
            table = {r.pole: r.winding for r in report.records}
            assert table[complex(n)] == 1

    contract, persistence = loop_reports[PoleCase.CASE_I]
    first_true = next(n for n, rep in enumerate(contract)
                      if rep.contractible is True)
    assert first_true <= 10
    assert all(rep.contractible is True for rep in contract[first_true:])
    assert persistence.n_stable_from is not None
    assert persistence.n_stable_from <= 10
    stabilized = persistence.windings[persistence.n_stable_from:]
    assert all(table == stabilized[0] for table in stabilized)
    _report(f"loop discrimination (cases ii/iii wind once for n=1..20; "
            f"case i contractible from n={first_true})")


def test_winding_persistence_zero_violations(loop_reports, model_free):
    total_certified_steps = 0
    for contract, persistence in loop_reports.values():
        assert persistence.violations == []
        assert persistence.ambiguous == []
        total_certified_steps += sum(1 for s in persistence.steps if s.holds)
    synthetic = bl.persistence_check(model_free, bl.LoopPath.square(10j, 0.5, 0.1), 10)
    assert synthetic.violations == []
    assert all(step.holds for step in synthetic.steps)
    total_certified_steps += len(synthetic.steps)
    assert total_certified_steps > 0
    _report(f"winding persistence ({total_certified_steps} certified steps, "
            "0 violations)")


# ---------------------------------------------------------------------------
# 9. absorbing half-plane candidate
# ---------------------------------------------------------------------------

def test_absorbing_half_plane_candidate():
    model = bl.build_map(PoleCase.CASE_I, 0.1)
    check = absorbing_candidate_check(model, rng_seed=RNG_SEED)
    assert check.ok, check.notes
    assert check.n_points == 150
    _report(f"absorbing candidate: 150 points enter Re > 1 by step "
            f"{check.max_entry_step} and stay")


# ---------------------------------------------------------------------------
# 10. metric-bound consistency
# ---------------------------------------------------------------------------

def test_metric_bound_consistency():
    rng = np.random.default_rng(RNG_SEED + 2)
    violations = 0
    for case in (PoleCase.CASE_I, PoleCase.CASE_II):
        model = bl.build_map(case, 0.1)
        done = 0
        while done < 500:
            z = complex(rng.uniform(-4.0, 8.0), rng.uniform(-8.0, 8.0))
            d_pole, d_tilde = bl.dist_to_poles(model, z)
            if d_tilde <= model.delta + 0.05:
                continue
            iv = bl.dist_to_boundary_interval(model, z)
            length = rng.uniform(0.05, 0.95) * iv.lower
            w = z + length * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
            bound = bl.hyp_distance_upper(model, z, w)
            if 1.0 - math.exp(-bound.value / 2.0) < length / iv.upper - 1e-12:
                violations += 1
            done += 1
    assert violations == 0
    _report("metric-bound consistency (1000 certified segments, 0 violations)")
