import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinreversal.errors import InvalidArgument
from spinreversal.ising import (
    BINARY,
    ISING,
    IsingModel,
    QuboModel,
    SpinReversalMask,
    SpinState,
    apply_spin_reversal,
    brute_force_ground_state,
    dumps_model,
    energy,
    enumerate_states,
    ising_to_qubo,
    loads_model,
    qubo_to_ising,
    rescale,
    spectrum,
    transform_state,
)
from tests.strategies import ising_models, models_and_masks


def test_energy_hand_computed(small_model):
    assert energy(small_model, SpinState((-1, 1, 1))) == pytest.approx(-4.25, abs=1e-12)
    assert energy(small_model, SpinState((1, 1, 1))) == pytest.approx(1.0 - 0.5 + 2.0 - 1.0 + 0.25)


def test_brute_force_frozen(small_model):
    e, states = brute_force_ground_state(small_model)
    assert e == pytest.approx(-4.25)
    assert [s.values for s in states] == [(-1, 1, 1)]


def test_brute_force_reports_degenerate_ground_states():
    m = IsingModel(2, {}, {(0, 1): -1.0})
    e, states = brute_force_ground_state(m)
    assert e == -1.0
    assert sorted(s.values for s in states) == [(-1, -1), (1, 1)]


def test_brute_force_size_limit():
    with pytest.raises(InvalidArgument):
        brute_force_ground_state(IsingModel.empty(25))


def test_model_canonicalizes_and_drops_zeros():
    m = IsingModel(3, {0: 0.0, 2: 1.5}, {(2, 0): 1.0, (1, 2): 0.0})
    assert m.linear == {2: 1.5}
    assert m.quadratic == {(0, 2): 1.0}


@pytest.mark.parametrize("quadratic", [{(0, 0): 1.0}, {(0, 5): 1.0}])
def test_model_rejects_bad_pairs(quadratic):
    with pytest.raises(InvalidArgument):
        IsingModel(3, {}, quadratic)


def test_energy_domain_and_length_checks(small_model):
    with pytest.raises(InvalidArgument):
        energy(small_model, SpinState((0, 1, 1), BINARY))
    with pytest.raises(InvalidArgument):
        energy(small_model, SpinState((1, 1)))
    with pytest.raises(InvalidArgument):
        SpinState((0, 2), BINARY)


def test_enumerate_states_bit_order():
    s = enumerate_states(3)
    assert s.shape == (8, 3)
    assert s[1].tolist() == [1, -1, -1]
    assert enumerate_states(2, BINARY)[2].tolist() == [0, 1]


def test_spin_reversal_example():
    m = IsingModel(2, {0: 1.0, 1: -2.0}, {(0, 1): 3.0})
    g = apply_spin_reversal(m, [True, False])
    assert g.linear == {0: -1.0, 1: -2.0}
    assert g.quadratic == {(0, 1): -3.0}
    both = apply_spin_reversal(m, [True, True])
    assert both.quadratic == m.quadratic


def test_mask_length_mismatch(small_model):
    with pytest.raises(InvalidArgument):
        apply_spin_reversal(small_model, [True])


def test_spin_reversal_rejects_qubo():
    with pytest.raises(InvalidArgument):
        apply_spin_reversal(QuboModel(1, {0: 1.0}, {}), [True])


@given(models_and_masks())
def test_gauge_preserves_energy_of_transformed_state(pair):
    model, mask = pair
    gauged = apply_spin_reversal(model, mask)
    states = enumerate_states(model.n)
    signs = np.where(mask, -1, 1)
    np.testing.assert_allclose(gauged.energies(states * signs), model.energies(states), atol=1e-9)


@given(models_and_masks())
def test_gauge_is_involution(pair):
    model, mask = pair
    assert apply_spin_reversal(apply_spin_reversal(model, mask), mask) == model


@given(models_and_masks(), st.data())
def test_gauge_composes_by_xor(pair, data):
    model, m1 = pair
    m2 = np.array(data.draw(st.lists(st.booleans(), min_size=model.n, max_size=model.n)), dtype=bool)
    assert apply_spin_reversal(apply_spin_reversal(model, m1), m2) == apply_spin_reversal(model, m1 ^ m2)


@given(ising_models(max_n=10))
def test_qubo_ising_round_trip(model):
    q = ising_to_qubo(model)
    back = qubo_to_ising(q)
    assert back.n == model.n
    np.testing.assert_allclose(spectrum(back), spectrum(model), atol=1e-9)
    binary = enumerate_states(model.n, BINARY)
    np.testing.assert_allclose(q.energies(binary), model.energies(2 * binary - 1), atol=1e-9)


def test_qubo_to_ising_frozen():
    q = QuboModel(2, {0: -1.0, 1: -1.0}, {(0, 1): 2.0})
    m = qubo_to_ising(q)
    assert m.linear == {}
    assert m.quadratic == {(0, 1): 0.5}
    assert m.offset == pytest.approx(-0.5)


def test_rescale_joint_factor():
    m = IsingModel(2, {0: 4.0}, {(0, 1): 1.0})
    scaled, s = rescale(m)
    assert s == 0.5
    assert scaled.linear == {0: 2.0}
    assert scaled.quadratic == {(0, 1): 0.5}
    same, s1 = rescale(IsingModel(2, {0: 1.0}, {(0, 1): -0.5}))
    assert s1 == 1.0


def test_mask_helpers():
    a = SpinReversalMask.from_indices(5, [0, 3])
    assert a.to_string() == "10010"
    assert a.popcount == 2
    assert (a ^ SpinReversalMask.ones(5)).to_string() == "01101"
    assert SpinReversalMask.from_string("10010") == a
    with pytest.raises(InvalidArgument):
        SpinReversalMask.from_string("10a")
    with pytest.raises(InvalidArgument):
        SpinReversalMask.from_indices(3, [4])


def test_transform_state_and_domains():
    s = SpinState((1, -1, 1))
    assert transform_state(s, [True, True, False]).values == (-1, 1, 1)
    assert s.to_binary().values == (1, 0, 1)
    assert s.to_binary().to_ising() == s
    with pytest.raises(InvalidArgument):
        transform_state(SpinState((1, 0), BINARY), [True, False])


def test_model_json_round_trip(small_model):
    text = dumps_model(small_model, {"source": "test"})
    assert json.loads(text)["metadata"] == {"source": "test"}
    assert loads_model(text) == small_model
    with pytest.raises(InvalidArgument):
        loads_model(json.dumps({"kind": "other", "n": 1}))


def test_spectrum_sorted(small_model):
    sp = spectrum(small_model)
    assert sp.size == 8 and np.all(np.diff(sp) >= 0)
    assert small_model.domain == ISING
