"""Experiment pipelines: absorbing-candidate check and showcase summaries."""

import json

import pytest

from bakerlab import PoleCase
from bakerlab.experiments import (
    absorbing_candidate_check,
    run_showcase,
)


def test_absorbing_candidate_check(model_i):
    check = absorbing_candidate_check(model_i, rng_seed=7)
    assert check.ok, check.notes
    assert check.n_points == 150
    # leftmost square needs a handful of steps to cross Re = 1
    assert 3 <= check.max_entry_step <= 10


def test_absorbing_check_is_deterministic(model_i):
    a = absorbing_candidate_check(model_i, rng_seed=11)
    b = absorbing_candidate_check(model_i, rng_seed=11)
    assert (a.ok, a.max_entry_step) == (b.ok, b.max_entry_step)


@pytest.mark.parametrize("case,expected", [
    (PoleCase.CASE_I, "parabolic-I"),
    (PoleCase.CASE_II, "parabolic-II-signature"),
    (PoleCase.CASE_III, "hyperbolic"),
])
def test_showcase_summaries(tmp_path, case, expected):
    summary, result = run_showcase(case, out_dir=str(tmp_path), quick=True)
    assert summary["ok"], summary
    assert summary["verdict"] == expected
    assert all(summary["checks"].values())
    assert result.certification_ok
    written = {p.name for p in result.paths}
    stem = f"case_{case.value}"
    assert f"{stem}_summary.json" in written
    assert f"{stem}_verdict.json" in written
    doc = json.loads((tmp_path / f"{stem}_summary.json").read_text())
    assert doc["verdict"] == expected
