import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcorr import qalgebra as qa
from qcorr import statelib as sl
from qcorr.errors import InvariantError


@pytest.mark.parametrize("name", list(sl.NAMED_STATES))
def test_named_states_are_valid_density_matrices(name):
    qa.check_density(qa.to_density(sl.NAMED_STATES[name]()))


def test_ghz_and_w_amplitudes():
    g = sl.ghz(3)
    assert g[0] == pytest.approx(2**-0.5) and g[7] == pytest.approx(2**-0.5)
    w = sl.w_state()
    assert np.allclose(np.abs(w[[1, 2, 4]]), 3**-0.5)


def test_dicke_counts_excitations():
    d = sl.dicke(2, 4)
    support = np.nonzero(np.abs(d) > 1e-12)[0]
    assert len(support) == 6
    assert all(bin(i).count("1") == 2 for i in support)


@pytest.mark.parametrize("channel", sl.GHZ_CHANNELS)
@pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
def test_noisy_ghz_channels_stay_physical(channel, p):
    qa.check_density(sl.noisy_ghz(3, channel, p))


def test_noisy_ghz_rejects_out_of_range_p():
    with pytest.raises(InvariantError):
        sl.noisy_ghz(3, "white", 1.5)


def test_werner_ppt_boundary():
    assert sl.is_ppt(sl.werner(0.33), [1])
    assert not sl.is_ppt(sl.werner(0.34), [1])


def test_ghz_fidelity():
    assert sl.ghz_fidelity(sl.projector(sl.ghz(4))) == pytest.approx(1.0)
    assert sl.ghz_fidelity(np.eye(8) / 8) == pytest.approx(1 / 8)


def test_nine_state_basis_is_orthonormal():
    basis = sl.nine_state_basis()
    gram = np.array([[np.vdot(u, v) for v in basis] for u in basis])
    assert len(basis) == 9
    assert np.allclose(gram, np.eye(9), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 3))
def test_state_json_round_trip(seed, n):
    rho = sl.random_density_matrix(2**n, np.random.default_rng(seed))
    back = sl.state_from_json(json.loads(json.dumps(sl.state_to_json(rho))))
    assert np.allclose(back, rho, atol=1e-15)


def test_state_json_rejects_size_mismatch():
    rec = sl.state_to_json(np.eye(4) / 4)
    rec["parties"] = 3
    with pytest.raises(InvariantError):
        sl.state_from_json(rec)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_random_separable_states_are_ppt(seed):
    rho = sl.random_separable_state(2, np.random.default_rng(seed))
    assert sl.is_ppt(rho, [1])
