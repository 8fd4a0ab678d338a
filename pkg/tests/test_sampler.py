import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinreversal.errors import InvalidArgument
from spinreversal.chimera import embed_complete, embed_model, smallest_chimera_for
from spinreversal.graphs import erdos_renyi, max_clique_qubo
from spinreversal.ising import IsingModel, apply_spin_reversal, brute_force_ground_state, enumerate_states, qubo_to_ising
from spinreversal.sampler import (
    ORIGINAL,
    NoiseModel,
    SampleSet,
    SamplerConfig,
    merge,
    quantize,
    realize_noise,
    sample,
    score,
    solve_native,
    solve_with_mask,
)

FAST = SamplerConfig(num_reads=50, num_sweeps=200, seed=4)


def test_quantize_grid():
    q = quantize(np.array([0.3, -2.5, 1.0, 0.0, 0.004]), 2.0, 8)
    step = 4.0 / 256
    np.testing.assert_allclose(q, [round(0.3 / step) * step, -2.0, 1.0, 0.0, 0.0])


def test_realize_noise_frozen(small_model):
    r = realize_noise(small_model, NoiseModel())
    assert r.linear[0] == pytest.approx(0.5340854658489067, abs=1e-12)
    assert r.quadratic[(0, 1)] == pytest.approx(0.9954375220343251, abs=1e-12)


def test_noiseless_realization_is_rescaled_model(small_model):
    r = realize_noise(small_model, NoiseModel.noiseless())
    assert r.quadratic == {(0, 1): 1.0, (1, 2): -0.5}
    assert r.linear == {0: 0.5, 1: -0.25}


def test_chip_noise_persistent_and_qubit_keyed(model8):
    a = realize_noise(model8, NoiseModel(chip_seed=3))
    assert a == realize_noise(model8, NoiseModel(chip_seed=3))
    assert a != realize_noise(model8, NoiseModel(chip_seed=4))
    moved = realize_noise(model8, NoiseModel(chip_seed=3), qubit_ids=range(100, 108))
    assert moved != a


def test_noise_validation():
    with pytest.raises(InvalidArgument):
        NoiseModel(bias_sigma=-1)
    with pytest.raises(InvalidArgument):
        SamplerConfig(num_reads=0)
    with pytest.raises(InvalidArgument):
        SamplerConfig(beta_min=5, beta_max=1)


def test_noise_profile_file(tmp_path):
    path = tmp_path / "noise.json"
    path.write_text('{"chip_seed": 7, "leakage": 0.1}')
    assert NoiseModel.from_file(path) == replace(NoiseModel(), chip_seed=7, leakage=0.1)


def test_sample_frozen(small_model):
    ss = sample(small_model, NoiseModel.noiseless(), SamplerConfig(num_reads=20, num_sweeps=100, seed=5))
    assert [(tuple(st), e, c) for st, e, c in ss.records()] == [((-1, 1, 1), -4.25, 20)]
    assert ss.total_reads == 20


def test_energies_are_on_submitted_model(model8):
    ss = sample(model8, NoiseModel(), FAST)
    np.testing.assert_allclose(ss.energies, model8.energies(ss.states), atol=1e-9)


def test_serial_and_parallel_kernels_agree(model8):
    a = sample(model8, NoiseModel(), FAST)
    b = sample(model8, NoiseModel(), replace(FAST, parallel=True))
    assert a == b


def test_sample_deterministic_and_seed_sensitive(model8):
    cfg = replace(FAST, num_sweeps=5)
    assert sample(model8, NoiseModel(), cfg) == sample(model8, NoiseModel(), cfg)
    assert sample(model8, NoiseModel(), cfg) != sample(model8, NoiseModel(), replace(cfg, seed=5))


def test_solve_with_mask_maps_gauged_samples_back(model8):
    mask = np.arange(8) % 2 == 0
    ss = solve_with_mask(model8, mask, NoiseModel(), FAST)
    assert ss.frame[1] == ORIGINAL
    np.testing.assert_allclose(ss.energies, model8.energies(ss.states), atol=1e-9)
    gauged = sample(apply_spin_reversal(model8, mask), NoiseModel(), FAST)
    expected = SampleSet.from_reads(gauged.states * np.where(mask, -1, 1), gauged.energies, occurrences=gauged.occurrences)
    np.testing.assert_array_equal(ss.states, expected.states)
    np.testing.assert_allclose(ss.energies, expected.energies, atol=1e-9)


def test_empty_mask_is_plain_sample(model8):
    a = solve_with_mask(model8, np.zeros(8, bool), NoiseModel(), FAST)
    b = sample(model8, NoiseModel(), FAST)
    np.testing.assert_array_equal(a.states, b.states)
    np.testing.assert_array_equal(a.energies, b.energies)


def test_solve_native_budget(model8):
    ss = solve_native(model8, 105, 10, NoiseModel(), FAST)
    assert ss.total_reads == 100
    assert ss.metadata["dropped_reads"] == 5
    with pytest.raises(InvalidArgument):
        solve_native(model8, 5, 10, NoiseModel(), FAST)


def test_zero_noise_native_finds_ground(model8):
    e0, _ = brute_force_ground_state(model8)
    ss = solve_native(model8, 100, 10, NoiseModel.noiseless(), replace(FAST, num_sweeps=1000))
    assert ss.min_energy == pytest.approx(e0, abs=1e-9)


def test_gauge_sensitivity_with_noise():
    g = erdos_renyi(12, 0.5, 11)
    topo = smallest_chimera_for(12)
    phys = embed_model(qubo_to_ising(max_clique_qubo(g).qubo), embed_complete(12, topo), topo=topo)
    n = phys.model.n
    cfg = SamplerConfig(num_reads=200, num_sweeps=10, seed=1)
    base = score(solve_with_mask(phys.model, np.zeros(n, bool), NoiseModel(), cfg, phys.qubits))
    rng = np.random.default_rng(0)
    diffs = [
        abs(score(solve_with_mask(phys.model, rng.random(n) < 0.5, NoiseModel(), cfg, phys.qubits)) - base)
        for _ in range(100)
    ]
    assert max(diffs) > NoiseModel().read_sigma


def test_score_rules():
    ss = SampleSet.from_reads(np.array([[1], [-1], [1]]), np.array([3.0, 1.0, 3.0]))
    assert score(ss, 1.0) == pytest.approx(7 / 3)
    assert score(ss, 0.01) == 1.0
    single = SampleSet.from_reads(np.array([[1]]), np.array([2.5]))
    assert score(single) == 2.5
    big = SampleSet.from_reads(enumerate_states(10)[:1000], np.arange(1000.0))
    assert score(big) == pytest.approx(4.5)
    with pytest.raises(InvalidArgument):
        score(SampleSet.from_reads(np.zeros((0, 1)), np.zeros(0)))


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=40), st.floats(-20, 20))
def test_score_monotone(energies, extra):
    def ss(e):
        return SampleSet.from_reads(enumerate_states(6)[: len(e)], np.array(e))

    before = score(ss(energies), 0.1)
    k = math.ceil(0.1 * len(energies) - 1e-9)
    after = score(ss(energies + [extra]), 0.1)
    cutoff = sorted(energies)[k - 1]
    if extra > cutoff:
        assert after >= before - 1e-12
    elif extra < sorted(energies)[0]:
        assert after <= before + 1e-12


def test_sampleset_csv_round_trip(model8):
    ss = sample(model8, NoiseModel(), FAST)
    text = ss.to_csv()
    assert text.startswith("# {")
    back = SampleSet.from_csv(text)
    assert back == ss
    assert back.to_csv() == text


def test_merge_aggregates():
    a = SampleSet.from_reads(np.array([[1, -1]]), np.array([0.5]))
    b = SampleSet.from_reads(np.array([[1, -1], [1, 1]]), np.array([0.5, -1.0]))
    m = merge([a, b])
    assert m.total_reads == 3
    assert list(m.occurrences) == [1, 2]


def test_empty_model_rejected():
    with pytest.raises(InvalidArgument):
        sample(IsingModel.empty(0), NoiseModel(), FAST)
