import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcorr import behaviors as bh
from qcorr import monogamy as mo
from qcorr import statelib as sl
from qcorr.errors import InvariantError

seeds = st.integers(0, 2**31 - 1)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_tv_bounds_on_random_states(seed):
    r = np.random.default_rng(seed)
    rho = sl.random_density_matrix(8, r)
    pair = mo.SharedSettingCHSHPair.random(r)
    assert not mo.tv_check(rho, pair).violated
    assert not mo.tv_strengthened(rho, pair).violated


def test_tv_saturated_by_product_state():
    rho = sl.projector(sl.basis_ket("000"))
    pair = mo.SharedSettingCHSHPair((0, 0), (0, 0), (0, 0))
    v = mo.tv_check(rho, pair)
    assert v.values == pytest.approx((2, 2))
    assert v.lhs == pytest.approx(8)


def test_ghz_tv_values():
    pair = mo.SharedSettingCHSHPair((0, math.pi / 2), (math.pi / 4, -math.pi / 4), (math.pi / 4, -math.pi / 4))
    v = mo.tv_check(sl.ghz(3), pair)
    assert v.lhs <= 8 + 1e-9


def test_tv_audit_report(rng):
    report = mo.tv_audit(200, rng)
    assert report["max_observed"] <= report["bound"] + 1e-8
    assert report["max_strengthened_excess"] <= 1e-8
    assert report["shared_nonlocal"] == 0


def test_ns_monogamy_pr_witness():
    v = mo.ns_monogamy(mo.pr_box_on_ab())
    assert v.values == pytest.approx((4, 0))
    assert not v.violated


def test_signaling_box_breaks_ns_monogamy():
    b = mo.signaling_double_box()
    v = mo.ns_monogamy(b)
    assert v.values == pytest.approx((4, 4)) and v.violated
    assert not bh.is_no_signaling(b)[0]


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_ns_monogamy_on_random_ns_behaviors(seed):
    b = mo.random_ns_behavior_3(np.random.default_rng(seed))
    assert bh.is_no_signaling(b)[0]
    assert not mo.ns_monogamy(b).violated


def test_ns_monogamy_needs_three_parties():
    with pytest.raises(InvariantError):
        mo.ns_monogamy(bh.pr_box())


def test_w_state_d3_values():
    w = sl.w_state()
    general = mo.d3_values(w, [(-0.133, 0.460)] * 3)
    orth = mo.d3_values(w, [(0.54, 0.54 + math.pi / 2)] * 3)
    assert np.allclose(np.abs(general), 1.022, atol=1e-3)
    assert np.allclose(np.abs(orth), 0.906, atol=1e-3)


def test_bell_pair_with_spectator_reaches_all_states_bound():
    psi, angles = mo.bell_pair_with_spectator()
    d = mo.d3_values(psi, angles)
    assert abs(d[2]) == pytest.approx(math.sqrt(2))
    assert np.all(np.abs(d) <= mo.d3_bounds()["all_states"] + 1e-12)


def test_product_state_d3_sum():
    d = mo.d3_values(sl.basis_ket("000"), [(0.0, 0.0)] * 3)
    assert d == pytest.approx([1, 1, 1])


@pytest.mark.parametrize("orthogonal", [False, True])
def test_d3_audit_within_bounds(rng, orthogonal):
    report = mo.d3_audit(200, rng, orthogonal)
    assert report["max_observed"] <= report["bound"] + 1e-9
    assert report["max_sphere"] <= mo.d3_bounds()["sphere"] + 1e-9


def test_d3_operator_rejects_bad_index():
    with pytest.raises(InvariantError):
        mo.d3_operator(3, [(np.eye(2), np.eye(2))] * 3)


def test_saturate_finds_maximum(rng):
    value, _ = mo.saturate(lambda x: -np.sum((x - 0.5) ** 2), 2, rng, restarts=3)
    assert value == pytest.approx(0, abs=1e-6)
