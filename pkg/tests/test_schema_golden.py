"""Schema stability and byte-exact golden artifacts for a fixed config."""

import json
from pathlib import Path

from bakerlab import PoleCase
from bakerlab.config import ExperimentConfig
from bakerlab.experiments import run_experiment
from bakerlab.schema import SCHEMA_VERSION, schema_document, schema_json

GOLDEN = Path(__file__).parent / "golden"

ARTIFACTS = ("golden_schema.json", "golden_orbits.csv", "golden_verdict.json",
             "golden_loops.json", "golden_persistence.json", "golden_region.ppm")


def _golden_config(out_dir: str) -> ExperimentConfig:
    return ExperimentConfig(
        case=PoleCase.CASE_II, seeds=(1j, 2j), n_steps=120,
        loop_n_max=2, render_width=32, render_height=32,
        viewport=(-1.0, 2.0, -1.0, 1.0),
        out_dir=out_dir, prefix="golden",
    )


def test_schema_document_is_stable():
    assert schema_json().encode() == (GOLDEN / "schema.json").read_bytes()
    doc = schema_document()
    assert doc["schema_version"] == SCHEMA_VERSION
    assert [c[0] for c in doc["orbit_csv"]["columns"]] == [
        "seed_index", "n", "re", "im", "drift_abs", "ratio_lower", "ratio_upper"]


def test_artifacts_are_byte_identical(tmp_path):
    """Identical config produces byte-identical CSV, JSON, and PPM output."""
    config = _golden_config(str(tmp_path))
    result = run_experiment(config, tasks=("orbit", "classify", "loop",
                                           "persist", "render"))
    assert result.certification_ok
    for name in ARTIFACTS:
        fresh = (tmp_path / name).read_bytes()
        assert fresh == (GOLDEN / name).read_bytes(), f"{name} drifted"


def test_artifact_documents_declare_schema_version(tmp_path):
    for name in ("golden_verdict.json", "golden_loops.json",
                 "golden_persistence.json"):
        doc = json.loads((GOLDEN / name).read_text())
        assert doc["schema_version"] == SCHEMA_VERSION


def test_repeated_runs_identical(tmp_path):
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    run_experiment(_golden_config(str(a_dir)), tasks=("orbit", "render"))
    run_experiment(_golden_config(str(b_dir)), tasks=("orbit", "render"))
    for name in ("golden_orbits.csv", "golden_region.ppm"):
        assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes()
