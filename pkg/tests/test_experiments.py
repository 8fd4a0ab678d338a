from dataclasses import replace

import numpy as np
import pytest

from spinreversal import experiments as ex
from spinreversal.errors import InvalidArgument
from spinreversal.genetic import GAConfig, GAHistory
from spinreversal.sampler import NoiseModel, SamplerConfig

TINY = ex.ExperimentSpec(
    vertices=6,
    p_G=(0.5,),
    p_s=(0.1, 0.5),
    repetitions=2,
    num_anneals=40,
    native_reads=40,
    num_transforms=4,
    realizations=2,
    ga=GAConfig(population=6, generations=3, num_anneals=40),
)


def test_reversal_probability_grid():
    assert len(ex.P_S_GRID) == 13
    assert ex.P_S_GRID[0] == 0.01 and ex.P_S_GRID[-1] == 0.99
    assert ex.P_G_GRID == (0.1, 0.3, 0.5, 0.7, 0.9)


def test_spec_json_round_trip():
    spec = replace(TINY, noise=NoiseModel(chip_seed=4), chimera_size=3)
    assert ex.ExperimentSpec.from_json(spec.to_json()) == spec
    with pytest.raises(InvalidArgument):
        ex.ExperimentSpec.from_dict({"colour": "blue"})
    with pytest.raises(InvalidArgument):
        ex.ExperimentSpec(problem="tsp")


def test_paper_scale():
    big = ex.paper_scale(ex.ExperimentSpec())
    assert (big.vertices, big.repetitions, big.num_anneals, big.native_reads, big.num_transforms) == (64, 50, 1000, 10000, 100)
    assert big.chimera_size == 16


def test_sweep_shape_and_seeds():
    summary, raw = ex.sweep_ps(replace(TINY, problem="both"))
    assert len(summary) == 2 * 1 * 2
    assert len(raw) == 2 * 2 * 2
    assert all(r["std_diff"] >= 0 and r["repetitions"] == 2 for r in summary)
    assert {"graph_seed", "mask_seed", "sampler_seed", "chip_seed", "seed"} <= set(raw[0])


def test_sweep_zero_noise_is_flat():
    spec = replace(TINY, noise=NoiseModel.noiseless(), sampler=SamplerConfig(num_sweeps=1000))
    summary, _ = ex.sweep_ps(spec)
    for row in summary:
        assert abs(row["mean_diff"]) < 1e-9 and abs(row["native_mean_diff"]) < 1e-9


def test_sweep_parallel_matches_serial():
    assert ex.sweep_ps(TINY, workers=2) == ex.sweep_ps(TINY)


def test_run_sweep_replays_byte_for_byte(tmp_path):
    paths = ex.run_sweep(TINY, tmp_path / "a")
    names = sorted(p.name for p in paths)
    assert "sweep_ps.csv" in names and "sweep_ps_max-clique.svg" in names
    assert not (tmp_path / "a" / "sweep_ps_raw.partial.csv").exists()
    spec = ex.ExperimentSpec.from_json((tmp_path / "a" / "spec.json").read_text())
    ex.run_sweep(spec, tmp_path / "b")
    for name in ("sweep_ps.csv", "sweep_ps_raw.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_param_study():
    rows = ex.ga_param_study(TINY, "p_mut", values=(0.001, 0.1))
    assert len(rows) == 2 * 3
    gen0 = [r["best_e"] for r in rows if r["generation"] == 0]
    assert gen0[0] == gen0[1]  # p_mut does not touch initialization
    with pytest.raises(InvalidArgument):
        ex.ga_param_study(TINY, "temperature")


def test_study_values_follow_level():
    assert ex.STUDY_VALUES["qubit"]["p_spin"] == (0.001, 0.01, 0.1)
    assert ex.STUDY_VALUES["chain"]["p_spin"] == (0.1, 0.3, 0.5)
    assert ex.STUDY_VALUES["qubit"]["N"] == (20, 50, 80)


def test_versus_and_outputs(tmp_path):
    paths = ex.run_versus(replace(TINY, problem="both"), tmp_path)
    names = {p.name for p in paths}
    assert {"ga_vs_native.csv", "ga_vs_native.svg", "reversal_counts.svg", "layout_first.svg", "layout_last.svg"} <= names
    lines = (tmp_path / "ga_vs_native.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 2 * 3


def test_reversal_count_trace_requires_history():
    with pytest.raises(InvalidArgument):
        ex.reversal_count_trace(GAHistory())
