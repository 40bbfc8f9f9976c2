"""Batch experiment runner: configs in, CSV/JSON/PPM artifacts out.

Everything written here is deterministic for a fixed config: sampling uses
the configured RNG seed, floats are printed with 17 significant digits, and
JSON keys are sorted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classify import TypeVerdict, Verdict, classify, hyperbolic_one_step_test
from .config import ExperimentConfig
from .errors import ConfigError
from .loops import LoopPath, contractibility, persistence_check, push_forward, refine_loop
from .mapfamily import MapModel, PoleCase, dist_to_poles, eval_f
from .orbits import Orbit, abel, iterate, step_ratio_series
from .render import render_region, write_ppm
from .schema import SCHEMA_VERSION, schema_json


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _json_float(x: float):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2,
                               default=_json_default) + "\n",
                    encoding="utf-8")


@dataclass
class ExperimentResult:
    paths: list[Path] = field(default_factory=list)
    certification_ok: bool = True
    notes: list[str] = field(default_factory=list)
    verdict: TypeVerdict | None = None


def _require_seeds(config: ExperimentConfig) -> list[complex]:
    if not config.seeds:
        raise ConfigError("no seeds configured ([orbit] seeds)")
    return list(config.seeds)


def _out_paths(config: ExperimentConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_schema(config: ExperimentConfig) -> Path:
    out = _out_paths(config)
    path = out / f"{config.prefix}_schema.json"
    path.write_text(schema_json(), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# individual artifact tasks
# ---------------------------------------------------------------------------

def run_orbit_task(config: ExperimentConfig, result: ExperimentResult,
                   model: MapModel | None = None) -> list[Orbit]:
    model = model or config.model()
    seeds = _require_seeds(config)
    out = _out_paths(config)
    path = out / f"{config.prefix}_orbits.csv"
    orbits = []
    lines = ["seed_index,n,re,im,drift_abs,ratio_lower,ratio_upper"]
    for idx, seed in enumerate(seeds):
        orbit = iterate(model, seed, config.n_steps)
        orbits.append(orbit)
        if orbit.truncated_at is not None:
            result.certification_ok = False
            result.notes.append(
                f"seed {seed}: orbit truncated at step {orbit.truncated_at} "
                "(pole proximity)")
        ratios = step_ratio_series(model, orbit)
        for n in range(orbit.n_points):
            lo = _fmt(ratios[n].lower) if n < len(ratios) else "nan"
            hi = _fmt(ratios[n].upper) if n < len(ratios) else "nan"
            z = orbit.points[n]
            lines.append(",".join((
                str(idx), str(n), _fmt(z.real), _fmt(z.imag),
                _fmt(abs(orbit.drift[n])), lo, hi)))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    result.paths.append(path)
    return orbits


def run_classify_task(config: ExperimentConfig, result: ExperimentResult,
                      model: MapModel | None = None) -> TypeVerdict:
    model = model or config.model()
    seeds = _require_seeds(config)
    verdict = classify(model, seeds, config.n_steps, tau_zero=config.tau_zero,
                       tau_pos=config.tau_pos, decay_factor=config.decay_factor)
    out = _out_paths(config)
    path = out / f"{config.prefix}_verdict.json"
    _dump_json(path, verdict_document(config, verdict))
    result.paths.append(path)
    result.verdict = verdict
    if any(not ev.included for ev in verdict.evidence):
        result.certification_ok = False
        result.notes.append("classifier excluded uncertified seeds")
    return verdict


def verdict_document(config: ExperimentConfig, verdict: TypeVerdict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "type-verdict",
        "case": config.case.value,
        "epsilon": config.epsilon,
        "n_steps": verdict.n_steps,
        "tau_zero": verdict.tau_zero,
        "tau_pos": verdict.tau_pos,
        "decay_factor": verdict.decay_factor,
        "verdict": verdict.verdict.value,
        "seeds": [
            {
                "re": ev.seed.real,
                "im": ev.seed.imag,
                "included": ev.included,
                "note": ev.note,
                "late_max_upper": _json_float(ev.late_max_upper),
                "mid_max_upper": _json_float(ev.mid_max_upper),
                "late_min_lower": _json_float(ev.late_min_lower),
                "global_min_lower": _json_float(ev.global_min_lower),
                "n_uncertified": ev.n_uncertified,
            }
            for ev in verdict.evidence
        ],
    }


def run_loop_task(config: ExperimentConfig, result: ExperimentResult,
                  model: MapModel | None = None) -> dict:
    model = model or config.model()
    loop = LoopPath.square(config.loop_center, config.loop_half_side,
                           config.loop_max_gap)
    current = refine_loop(model, loop)
    reports = []
    for n in range(config.loop_n_max + 1):
        rep = contractibility(model, current)
        if not rep.certified:
            result.certification_ok = False
            result.notes.append(f"loop image {n} not certified")
        reports.append({
            "n": n,
            "certified": rep.certified,
            "contractible": rep.contractible,
            "windings": [
                {"pole_re": r.pole.real, "pole_im": r.pole.imag,
                 "winding": r.winding}
                for r in rep.records
            ],
        })
        if n < config.loop_n_max:
            current = push_forward(model, current)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "loop-report",
        "case": config.case.value,
        "epsilon": config.epsilon,
        "max_gap": config.loop_max_gap,
        "n_max": config.loop_n_max,
        "loops": reports,
    }
    out = _out_paths(config)
    path = out / f"{config.prefix}_loops.json"
    _dump_json(path, doc)
    result.paths.append(path)
    return doc


def run_persist_task(config: ExperimentConfig, result: ExperimentResult,
                     model: MapModel | None = None) -> dict:
    model = model or config.model()
    loop = LoopPath.square(config.loop_center, config.loop_half_side,
                           config.loop_max_gap)
    report = persistence_check(model, loop, config.loop_n_max)
    if report.violations:
        result.certification_ok = False
        result.notes.append("winding persistence violated where certified")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "persistence-report",
        "case": config.case.value,
        "epsilon": config.epsilon,
        "n_max": config.loop_n_max,
        "n_stable_from": report.n_stable_from,
        "steps": [
            {"n": s.n, "holds": s.holds, "n_vertices": s.n_vertices,
             "n_violations": s.n_violations,
             "worst_ratio": _json_float(s.worst_ratio)}
            for s in report.steps
        ],
        "violations": [[n, p.real, p.imag] for n, p in report.violations],
        "ambiguous": [[n, p.real, p.imag] for n, p in report.ambiguous],
    }
    out = _out_paths(config)
    path = out / f"{config.prefix}_persistence.json"
    _dump_json(path, doc)
    result.paths.append(path)
    return doc


def run_abel_task(config: ExperimentConfig, result: ExperimentResult,
                  model: MapModel | None = None) -> dict:
    model = model or config.model()
    seeds = _require_seeds(config)
    rows = []
    for seed in seeds:
        chart = abel(model, seed, config.abel_tol)
        image, _ = eval_f(model, seed)
        chart_image = abel(model, image, config.abel_tol)
        residual = abs(chart_image.value - chart.value - 1.0)
        rows.append({
            "re": seed.real, "im": seed.imag,
            "psi_re": chart.value.real, "psi_im": chart.value.imag,
            "tail_bound": _json_float(chart.tail_bound),
            "residual_abs": _json_float(residual),
        })
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "translation-chart",
        "case": config.case.value,
        "epsilon": config.epsilon,
        "tol": config.abel_tol,
        "seeds": rows,
    }
    out = _out_paths(config)
    path = out / f"{config.prefix}_abel.json"
    _dump_json(path, doc)
    result.paths.append(path)
    return doc


def run_render_task(config: ExperimentConfig, result: ExperimentResult,
                    model: MapModel | None = None,
                    orbit_points=None, loop_vertices=None) -> Path:
    model = model or config.model()
    pixels = render_region(model, config.render_viewport(),
                           config.render_width, config.render_height,
                           orbit_points=orbit_points,
                           loop_vertices=loop_vertices)
    out = _out_paths(config)
    path = out / f"{config.prefix}_region.ppm"
    write_ppm(path, pixels)
    result.paths.append(path)
    return path


def run_experiment(config: ExperimentConfig,
                   tasks: tuple[str, ...] = ("orbit", "classify", "loop", "render"),
                   ) -> ExperimentResult:
    """Run the requested artifact tasks against one config.

    Always writes the schema stamp.  Certification problems (truncated
    orbits, uncertified loops or seeds) are reported in the result rather
    than raised, so the caller can map them to a dedicated exit status.
    """
    known = {"orbit", "classify", "loop", "persist", "abel", "render"}
    unknown = set(tasks) - known
    if unknown:
        raise ConfigError(f"unknown experiment tasks: {sorted(unknown)}")
    result = ExperimentResult()
    model = config.model()
    result.paths.append(write_schema(config))
    orbit_overlay = None
    loop_overlay = None
    if "orbit" in tasks:
        orbits = run_orbit_task(config, result, model)
        if orbits:
            orbit_overlay = np.concatenate([o.points for o in orbits])
    if "classify" in tasks:
        run_classify_task(config, result, model)
    if "loop" in tasks:
        run_loop_task(config, result, model)
        loop_overlay = LoopPath.square(config.loop_center, config.loop_half_side,
                                       config.loop_max_gap).vertices
    if "persist" in tasks:
        run_persist_task(config, result, model)
    if "abel" in tasks:
        run_abel_task(config, result, model)
    if "render" in tasks:
        run_render_task(config, result, model, orbit_points=orbit_overlay,
                        loop_vertices=loop_overlay)
    return result


# ---------------------------------------------------------------------------
# showcase reproduction (three pole configurations end to end)
# ---------------------------------------------------------------------------

ABSORBING_HALF_PLANE_RE = 1.0

_ABSORBING_SQUARES = ((1.5 + 0.5j, 0.25), (-2.5 + 0.5j, 0.2), (0.5 - 3.5j, 0.2))


@dataclass
class AbsorbingCheck:
    ok: bool
    max_entry_step: int
    n_points: int
    notes: list[str] = field(default_factory=list)


def absorbing_candidate_check(model: MapModel,
                              squares=_ABSORBING_SQUARES,
                              points_per_square: int = 50,
                              rng_seed: int = 20240809,
                              settle_steps: int = 20) -> AbsorbingCheck:
    """Empirical check of the half-plane {Re > 1} as an absorbing candidate.

    Samples each compact square, iterates until the orbit enters the half
    plane, then keeps watching until the step count where the certified
    drift bound guarantees Re(f^n(z)) > 1 forever, plus a settle margin.
    """
    rng = np.random.default_rng(rng_seed)
    max_entry = 0
    notes: list[str] = []
    ok = True
    total = 0
    for center, half in squares:
        offsets = rng.uniform(-half, half, size=(points_per_square, 2))
        for dx, dy in offsets:
            z0 = complex(center) + complex(dx, dy)
            total += 1
            horizon = max(5, math.ceil(ABSORBING_HALF_PLANE_RE - z0.real
                                       + 0.5 * model.epsilon)) + settle_steps
            orbit = iterate(model, z0, horizon)
            if orbit.truncated_at is not None:
                ok = False
                notes.append(f"{z0}: orbit truncated")
                continue
            re = orbit.points.real
            inside = re > ABSORBING_HALF_PLANE_RE
            if not inside.any():
                ok = False
                notes.append(f"{z0}: never entered the half plane")
                continue
            entry = int(np.argmax(inside))
            if not inside[entry:].all():
                ok = False
                notes.append(f"{z0}: left the half plane after entering")
                continue
            max_entry = max(max_entry, entry)
    return AbsorbingCheck(ok=ok, max_entry_step=max_entry, n_points=total,
                          notes=notes)


def _showcase_config(case: PoleCase, out_dir: str, quick: bool) -> ExperimentConfig:
    n_steps = 300 if quick else 1000
    seeds: tuple[complex, ...]
    if case is PoleCase.CASE_I:
        seeds = (1.0 + 0.0j, 2.0 + 1.0j)
    elif case in (PoleCase.CASE_II, PoleCase.CASE_II_PLUS):
        seeds = tuple(1j * k for k in range(1, 21))
    else:
        grid = np.linspace(0.25, 0.75, 3)
        seeds = tuple(complex(x, y) for x in grid for y in grid)
    return ExperimentConfig(case=case, seeds=seeds, n_steps=n_steps,
                            out_dir=out_dir, prefix=f"case_{case.value.replace('+', 'p')}",
                            loop_n_max=20)


def run_showcase(case: PoleCase, out_dir: str = "out",
                 quick: bool = False) -> tuple[dict, ExperimentResult]:
    """End-to-end reproduction of one showcase pole configuration.

    Writes the full artifact bundle and returns a summary of the expected
    qualitative findings: verdict, loop winding behaviour, and, in the
    imaginary-axis configuration, the absorbing half-plane check.
    """
    config = _showcase_config(case, out_dir, quick)
    model = config.model()
    result = ExperimentResult()
    result.paths.append(write_schema(config))
    run_orbit_task(config, result, model)
    verdict = run_classify_task(config, result, model)
    loop_doc = run_loop_task(config, result, model)
    persist_doc = run_persist_task(config, result, model)
    run_render_task(config, result, model)

    summary: dict = {
        "case": case.value,
        "verdict": verdict.verdict.value,
        "checks": {},
    }
    checks = summary["checks"]
    checks["persistence_zero_violations"] = not persist_doc["violations"]

    if case is PoleCase.CASE_I:
        checks["verdict_is_parabolic_I"] = verdict.verdict is Verdict.PARABOLIC_I
        first_true = next((rep["n"] for rep in loop_doc["loops"]
                           if rep["contractible"] is True), None)
        later_all_true = (first_true is not None and
                          all(rep["contractible"] is True
                              for rep in loop_doc["loops"] if rep["n"] >= first_true))
        checks["loop_eventually_contractible"] = (
            first_true is not None and first_true <= 10 and later_all_true)
        absorbing = absorbing_candidate_check(model, rng_seed=config.rng_seed)
        checks["absorbing_half_plane"] = absorbing.ok
        summary["absorbing_max_entry_step"] = absorbing.max_entry_step
    elif case in (PoleCase.CASE_II, PoleCase.CASE_II_PLUS):
        checks["verdict_is_parabolic_II_signature"] = (
            verdict.verdict is Verdict.PARABOLIC_II_SIGNATURE)
        checks["loop_winds_once_around_marching_pole"] = _winds_once(loop_doc)
        checks["loop_never_contractible"] = _never_contractible(loop_doc)
    else:
        checks["verdict_is_hyperbolic"] = verdict.verdict is Verdict.HYPERBOLIC
        one_step = hyperbolic_one_step_test(model, _cell_sample(model, 8))
        checks["one_step_lower_bound_positive"] = one_step.min_bound > 0.0
        summary["one_step_min_bound"] = one_step.min_bound
        checks["loop_winds_once_around_marching_pole"] = _winds_once(loop_doc)
        checks["loop_never_contractible"] = _never_contractible(loop_doc)

    summary["ok"] = all(checks.values()) and result.certification_ok
    out = _out_paths(config)
    path = out / f"{config.prefix}_summary.json"
    _dump_json(path, summary)
    result.paths.append(path)
    return summary, result


def _winds_once(loop_doc: dict) -> bool:
    """True when the n-th image winds exactly once around the pole at n."""
    for rep in loop_doc["loops"]:
        n = rep["n"]
        if n < 1:
            continue
        hit = [r for r in rep["windings"]
               if abs(r["pole_re"] - n) < 1e-9 and abs(r["pole_im"]) < 1e-9]
        if len(hit) != 1 or hit[0]["winding"] != 1:
            return False
    return True


def _never_contractible(loop_doc: dict) -> bool:
    # marching images only: the base loop encircles no pole on the
    # positive-integer variant
    return all(rep["contractible"] is False
               for rep in loop_doc["loops"] if rep["n"] >= 1)


def _cell_sample(model: MapModel, per_side: int) -> list[complex]:
    """Grid over one fundamental cell, kept clear of the excluded disks."""
    margin = 2.0 * model.epsilon + 0.02
    ticks = (np.arange(per_side) + 0.5) / per_side
    pts = [complex(x, y) for x in ticks for y in ticks]
    return [z for z in pts if dist_to_poles(model, z)[1] >= margin]
