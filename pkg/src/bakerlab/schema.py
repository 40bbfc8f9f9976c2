"""Version-stamped schemas of every artifact the command line writes."""

from __future__ import annotations

import json

SCHEMA_VERSION = "1.0.0"

ORBIT_CSV_COLUMNS = [
    ("seed_index", "0-based index into the configured seed list"),
    ("n", "step count along the orbit"),
    ("re", "real part of the n-th orbit point"),
    ("im", "imaginary part of the n-th orbit point"),
    ("drift_abs", "modulus of the drift f^n(z) - z - n"),
    ("ratio_lower", "certified lower end of the step ratio at n; nan on the final row"),
    ("ratio_upper", "certified upper end of the step ratio at n; 'inf' when "
                    "the boundary-distance lower bound degenerates, nan on the final row"),
]

VERDICT_JSON_KEYS = {
    "schema_version": "this schema version string",
    "kind": "constant 'type-verdict'",
    "case": "pole configuration tag (i, ii, ii+, iii)",
    "epsilon": "drift scale of the model",
    "n_steps": "orbit length used by the classifier",
    "tau_zero": "smallness threshold on windowed max upper ratios",
    "tau_pos": "positivity threshold on global min lower ratios",
    "decay_factor": "required across-seed decay of windowed max upper ratios",
    "verdict": "parabolic-I | parabolic-II-signature | hyperbolic | inconclusive",
    "seeds": "list of per-seed evidence objects",
    "seeds[].re / seeds[].im": "seed coordinates",
    "seeds[].included": "whether the seed entered the decision rules",
    "seeds[].note": "exclusion reason, empty when included",
    "seeds[].late_max_upper": "max upper ratio over the late window [N/2, N)",
    "seeds[].mid_max_upper": "max upper ratio over the mid window [N/4, N/2)",
    "seeds[].late_min_lower": "min lower ratio over the late window",
    "seeds[].global_min_lower": "min lower ratio over all steps",
    "seeds[].n_uncertified": "number of uncertified enclosures in the windows",
}

LOOP_JSON_KEYS = {
    "schema_version": "this schema version string",
    "kind": "constant 'loop-report'",
    "case": "pole configuration tag",
    "epsilon": "drift scale of the model",
    "max_gap": "refinement target for edge lengths",
    "n_max": "number of image loops tracked",
    "loops": "list of per-image reports, n = 0 .. n_max",
    "loops[].n": "iteration count of this image",
    "loops[].certified": "loop stayed >= epsilon away from the pole translates",
    "loops[].contractible": "true/false when certified, null otherwise",
    "loops[].windings": "list of {pole_re, pole_im, winding (int or null)}",
}

PERSIST_JSON_KEYS = {
    "schema_version": "this schema version string",
    "kind": "constant 'persistence-report'",
    "case": "pole configuration tag",
    "epsilon": "drift scale of the model",
    "n_max": "number of pushes tracked",
    "n_stable_from": "first n from which the half-distance condition holds onward, or null",
    "steps": "per-n condition records",
    "steps[].n": "iteration count",
    "steps[].holds": "half-distance condition held at every vertex",
    "steps[].n_vertices": "vertices of the refined source loop",
    "steps[].n_violations": "vertices violating the condition",
    "steps[].worst_ratio": "max over vertices of step length / lower boundary distance",
    "violations": "list of [n, pole_re, pole_im] where windings changed despite the condition",
    "ambiguous": "list of [n, pole_re, pole_im] where a winding was undecidable",
}

ABEL_JSON_KEYS = {
    "schema_version": "this schema version string",
    "kind": "constant 'translation-chart'",
    "case": "pole configuration tag",
    "epsilon": "drift scale of the model",
    "tol": "requested certified tail tolerance",
    "seeds": "per-seed chart records",
    "seeds[].re / seeds[].im": "seed coordinates",
    "seeds[].psi_re / seeds[].psi_im": "chart value at the seed",
    "seeds[].tail_bound": "certified tail bound of the chart value",
    "seeds[].residual_abs": "measured |psi(f(z)) - psi(z) - 1|",
}

PPM_NOTES = (
    "Binary PPM, magic P6, 8-bit, row-major, top-left origin. Pixel colors: "
    "dark red inside the epsilon disks around the pole translates, orange in "
    "the epsilon-to-delta collar, white in the certified region; blue orbit "
    "and green loop overlays."
)


def schema_document() -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "orbit_csv": {"columns": [list(c) for c in ORBIT_CSV_COLUMNS]},
        "verdict_json": VERDICT_JSON_KEYS,
        "loop_json": LOOP_JSON_KEYS,
        "persistence_json": PERSIST_JSON_KEYS,
        "abel_json": ABEL_JSON_KEYS,
        "ppm": PPM_NOTES,
        "float_format": "CSV floats carry 17 significant digits (round-trip safe)",
    }


def schema_json() -> str:
    return json.dumps(schema_document(), sort_keys=True, indent=2) + "\n"
