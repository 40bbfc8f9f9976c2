"""Config parsing and command-line exit-code contract."""

import json
from pathlib import Path

import pytest

import bakerlab as bl
from bakerlab.cli import main
from bakerlab.config import ExperimentConfig

GOOD_CONFIG = """\
[model]
case = ii
epsilon = 0.1
decay = 0.25
safety = 0.9

[orbit]
seeds = 0+1j, 0+2j
n_steps = 150

[loop]
center = 0+0j
half_side = 0.5
max_gap = 0.1
n_max = 3

[render]
viewport = -2, 2, -2, 2
width = 48
height = 48

[output]
dir = {out}
prefix = t
"""


def _write(tmp_path: Path, body: str) -> Path:
    path = tmp_path / "exp.cfg"
    path.write_text(body.format(out=tmp_path / "out"))
    return path


def test_config_round_trip(tmp_path):
    cfg = ExperimentConfig.from_file(_write(tmp_path, GOOD_CONFIG))
    assert cfg.case is bl.PoleCase.CASE_II
    assert cfg.seeds == (1j, 2j)
    assert cfg.n_steps == 150
    assert cfg.viewport == (-2.0, 2.0, -2.0, 2.0)


def test_config_missing_case(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("[model]\nepsilon = 0.1\n")
    with pytest.raises(bl.ConfigError):
        ExperimentConfig.from_file(path)


def test_config_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("[model]\ncase = ii\nfrobnicate = 1\n")
    with pytest.raises(bl.ConfigError):
        ExperimentConfig.from_file(path)


def test_config_bad_epsilon(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("[model]\ncase = ii\nepsilon = 0.7\n")
    with pytest.raises(bl.ConfigError):
        ExperimentConfig.from_file(path)


def test_config_empty_seed_list(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("[model]\ncase = ii\n\n[orbit]\nseeds =\n")
    with pytest.raises(bl.ConfigError):
        ExperimentConfig.from_file(path)


def test_budget_subcommand(capsys):
    assert main(["budget", "--case", "ii", "--epsilon", "0.1"]) == 0
    out = capsys.readouterr().out
    assert "8.8280124625342115e-06" in out


def test_budget_subcommand_domain_error(capsys):
    assert main(["budget", "--case", "ii", "--epsilon", "0.9"]) == 2


def test_run_bundle(tmp_path, capsys):
    path = _write(tmp_path, GOOD_CONFIG)
    assert main(["run", str(path)]) == 0
    out_dir = tmp_path / "out"
    for suffix in ("schema.json", "orbits.csv", "verdict.json",
                   "loops.json", "region.ppm"):
        assert (out_dir / f"t_{suffix}").exists()
    verdict = json.loads((out_dir / "t_verdict.json").read_text())
    assert verdict["kind"] == "type-verdict"
    assert verdict["schema_version"]


def test_orbit_csv_final_row_has_nan_ratio(tmp_path):
    path = _write(tmp_path, GOOD_CONFIG)
    assert main(["orbit", str(path)]) == 0
    rows = (tmp_path / "out" / "t_orbits.csv").read_text().strip().splitlines()
    assert rows[0] == "seed_index,n,re,im,drift_abs,ratio_lower,ratio_upper"
    last_seed0 = rows[151]
    assert last_seed0.split(",")[1] == "150"
    assert last_seed0.split(",")[5] == "nan"
    assert len(rows) == 1 + 2 * 151


def test_missing_seeds_is_usage_error(tmp_path, capsys):
    path = tmp_path / "noseeds.cfg"
    path.write_text(f"[model]\ncase = ii\n\n[output]\ndir = {tmp_path / 'o'}\n")
    assert main(["orbit", str(path)]) == 2


def test_missing_config_file_is_usage_error():
    assert main(["orbit", "/nonexistent/exp.cfg"]) == 2


def test_out_dir_override(tmp_path):
    path = _write(tmp_path, GOOD_CONFIG)
    override = tmp_path / "elsewhere"
    assert main(["orbit", str(path), "--out-dir", str(override)]) == 0
    assert (override / "t_orbits.csv").exists()


def test_classifier_domain_violation_is_usage_error(tmp_path):
    body = GOOD_CONFIG.replace("n_steps = 150", "n_steps = 60")
    path = _write(tmp_path, body)
    assert main(["classify", str(path)]) == 2


def test_uncertified_seed_is_certification_failure(tmp_path):
    body = GOOD_CONFIG.replace("seeds = 0+1j, 0+2j", "seeds = 0.05+0.05j")
    path = _write(tmp_path, body)
    assert main(["orbit", str(path)]) == 3


def test_certification_failure_exit_code(tmp_path, capsys):
    """A loop crossing the excluded disks fails certification, not crashes."""
    body = GOOD_CONFIG.replace("center = 0+0j", "center = 0.05+0.0j") \
                      .replace("half_side = 0.5", "half_side = 0.1")
    path = _write(tmp_path, body)
    assert main(["loop", str(path)]) == 3


def test_io_error_exit_code(tmp_path):
    body = GOOD_CONFIG.replace("{out}", "/proc/definitely/not/writable")
    path = tmp_path / "exp.cfg"
    path.write_text(body)
    assert main(["render", str(path)]) == 4


def test_persist_and_abel_subcommands(tmp_path):
    body = GOOD_CONFIG + "\n[abel]\ntol = 1e-8\n"
    path = _write(tmp_path, body)
    assert main(["persist", str(path)]) == 0
    assert main(["abel", str(path)]) == 0
    persist = json.loads((tmp_path / "out" / "t_persistence.json").read_text())
    assert persist["kind"] == "persistence-report"
    chart = json.loads((tmp_path / "out" / "t_abel.json").read_text())
    assert {row["residual_abs"] < 1e-7 for row in chart["seeds"]} == {True}


def test_reproduce_quick(tmp_path, capsys):
    assert main(["reproduce-thm51", "--case", "i",
                 "--out-dir", str(tmp_path / "rep"), "--quick"]) == 0
    out = capsys.readouterr().out
    assert "reproduction ok" in out
    assert "absorbing_half_plane: ok" in out


def test_threads_env_round_trip(monkeypatch):
    from bakerlab.parallel import worker_count
    monkeypatch.setenv("BAKERLAB_THREADS", "2")
    assert worker_count() >= 1
    monkeypatch.setenv("BAKERLAB_THREADS", "junk")
    with pytest.raises(ValueError):
        worker_count()
    monkeypatch.delenv("BAKERLAB_THREADS")
    assert worker_count() == 1
