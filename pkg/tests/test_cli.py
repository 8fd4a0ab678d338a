import json
import subprocess
import sys

import pytest

from spinreversal.cli import main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def physical(tmp_path):
    assert run("generate", "--vertices", 6, "--p-G", 0.5, "--seed", 2, "--out", tmp_path) == 0
    assert run("reduce", tmp_path / "graph.txt", "--problem", "min-vertex-cover", "--out", tmp_path) == 0
    assert run("embed", tmp_path / "ising.json", "--out", tmp_path) == 0
    return tmp_path / "physical.json"


def test_pipeline_files(physical):
    doc = json.loads(physical.read_text())
    assert doc["kind"] == "ising" and doc["metadata"]["topology"] == {"M": 2, "N": 2, "t": 4}


@pytest.mark.parametrize("mode", [[], ["--p-s", "0.3"], ["--native", "5"], ["--mask", "1" * 18]])
def test_sample_modes(physical, tmp_path, mode):
    out = tmp_path / "s"
    assert run("sample", physical, "--reads", 50, "--sweeps", 20, "--out", out, *mode) == 0
    assert (out / "samples.csv").read_text().startswith("# {")


def test_ga_and_layout(physical, tmp_path):
    out = tmp_path / "ga"
    assert run("ga", physical, "--generations", 2, "--population", 4, "--reads", 20, "--out", out, "--checkpoint") == 0
    assert (out / "checkpoint.json").exists()
    assert run("ga", physical, "--generations", 2, "--population", 4, "--reads", 20, "--out", out,
               "--resume", out / "checkpoint.json") == 0
    assert run("render-layout", physical, out / "best_mask.txt", "--out", out) == 0
    assert (out / "layout.svg").exists()


def test_noise_profile_flag(physical, tmp_path):
    profile = tmp_path / "noise.json"
    profile.write_text('{"chip_seed": 3, "bias_sigma": 0.0}')
    assert run("sample", physical, "--noise-profile", profile, "--reads", 10, "--sweeps", 5, "--out", tmp_path / "n") == 0
    assert '"chip_seed": 3' in (tmp_path / "n" / "samples.csv").read_text().splitlines()[0]


def test_experiment_replay(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("ga-vs-native", "--vertices", 5, "--realizations", 1, "--generations", 2, "--out", a) == 0
    assert run("ga-vs-native", "--spec", a / "spec.json", "--out", b) == 0
    assert (a / "ga_vs_native.csv").read_bytes() == (b / "ga_vs_native.csv").read_bytes()


def test_study_command(tmp_path):
    assert run("ga-study", "--vertices", 5, "--parameter", "p_mat", "--generations", 2, "--out", tmp_path) == 0
    assert (tmp_path / "ga_study_p_mat.svg").exists()


def test_failures_exit_nonzero(physical, tmp_path, capsys):
    assert run("sample", physical, "--mask", "101", "--out", tmp_path) == 1
    assert "error" in capsys.readouterr().err
    assert run("reduce", tmp_path / "missing.txt", "--out", tmp_path) == 1
    with pytest.raises(SystemExit) as info:
        run("no-such-command")
    assert info.value.code != 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spinreversal", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "sweep-ps" in proc.stdout
