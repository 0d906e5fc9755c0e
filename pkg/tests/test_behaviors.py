import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcorr import behaviors as bh
from qcorr import qalgebra as qa
from qcorr import statelib as sl
from qcorr.errors import InvariantError, SizeCapError


def one_way_protocol():
    """A's outcome 1 and B's 1 under (A, B); both -1 under (A', B). B's outcome depends on x."""
    def out(s):
        x, y = s
        if y == 0:
            return (1, 1) if x == 0 else (-1, -1)
        return (1, 1)
    return bh.table_from_outcomes(out, bh.Scenario.uniform(2, 2))


def six_term_protocol():
    def out(s):
        x, y = s
        a = -1 if x == y else 1
        return (a, 1)
    return bh.table_from_outcomes(out, bh.Scenario.uniform(2, 2))


def test_pr_box_properties():
    pr = bh.pr_box()
    assert bh.chsh_facets(pr).max() == pytest.approx(4)
    assert bh.is_no_signaling(pr)[0]
    assert not bh.is_local(pr).local
    assert not bh.lp_membership(pr)


def test_ns_extreme_points_are_no_signaling_with_uniform_marginals():
    pts = bh.ns_extreme_points_222()
    assert len(pts) == 8
    for b in pts:
        assert bh.is_no_signaling(b)[0]
        assert bh.expectation(b, (0, 1), (0,)) == pytest.approx(0)
        assert np.allclose(np.abs(bh.correlators_222(b)), 1)


def test_sixteen_local_vertices_satisfy_facets():
    verts = bh.local_deterministic_vertices(bh.Scenario.uniform(2, 2))
    assert len(verts) == 16
    for v in verts:
        assert bh.chsh_facets(v).max() <= 2 + 1e-12
        assert bh.is_no_signaling(v)[0]


def test_vertex_cap_raises():
    with pytest.raises(SizeCapError):
        bh.local_deterministic_vertices(bh.Scenario.uniform(3, 8), cap=1000)


def test_behavior_rejects_unnormalized_table():
    with pytest.raises(InvariantError):
        bh.Behavior(np.ones((2, 2, 2, 2)))


def test_one_way_protocol_signals():
    assert not bh.is_no_signaling(one_way_protocol())[0]


def test_signaling_protocols_violate_ns_inequalities():
    assert bh.ns_nontrivial_inequalities(one_way_protocol())["four_term"].max() == pytest.approx(4)
    assert bh.ns_nontrivial_inequalities(six_term_protocol())["six_term"].max() == pytest.approx(6)


def test_inequality_counts():
    vals = bh.ns_nontrivial_inequalities(bh.pr_box())
    assert len(vals["four_term"]) == 32 and len(vals["six_term"]) == 14


def test_all_46_hold_on_ns_vertices():
    for b in bh.ns_extreme_points_222() + bh.local_deterministic_vertices(bh.Scenario.uniform(2, 2)):
        vals = bh.ns_nontrivial_inequalities(b)
        assert max(vals["four_term"].max(), vals["six_term"].max()) <= 2 + 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_ns_inequalities_hold_on_random_ns_behaviors(seed):
    b = bh.random_ns_behavior(np.random.default_rng(seed))
    assert bh.is_no_signaling(b)[0]
    vals = bh.ns_nontrivial_inequalities(b)
    assert max(vals["four_term"].max(), vals["six_term"].max()) <= 2 + 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_lp_agrees_with_facets(seed):
    r = np.random.default_rng(seed)
    b = bh.random_ns_behavior(r) if r.uniform() < 0.7 else bh.random_behavior(r)
    assert bh.is_local(b).local == bh.is_local(b, method="lp").local


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_roy_singh_holds_for_any_behavior(seed):
    assert bh.roy_singh_check(bh.random_behavior(np.random.default_rng(seed)))


def test_local_implies_no_signaling(rng):
    for _ in range(50):
        b = bh.random_behavior(rng)
        if bh.is_local(b, method="lp").local:
            assert bh.is_no_signaling(b)[0]


def test_ns_projection_is_unit_cube():
    pts = bh.ns_extreme_points_222() + bh.local_deterministic_vertices(bh.Scenario.uniform(2, 2))
    vecs = {tuple(np.round(bh.correlators_222(b).ravel()).astype(int)) for b in pts}
    assert len(vecs) == 16


def test_quantum_behavior_of_singlet_reaches_tsirelson():
    obs = [[qa.SIGMA_Z, qa.SIGMA_X],
           [-(qa.SIGMA_Z + qa.SIGMA_X) / np.sqrt(2), -(qa.SIGMA_Z - qa.SIGMA_X) / np.sqrt(2)]]
    b = bh.quantum_behavior(sl.projector(sl.bell_state("psi-")), obs)
    assert bh.chsh_facets(b).max() == pytest.approx(2 * np.sqrt(2))
    assert bh.is_no_signaling(b)[0]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_behavior_json_round_trip(seed):
    b = bh.random_behavior(np.random.default_rng(seed))
    back = bh.behavior_from_json(json.loads(json.dumps(bh.behavior_to_json(b))))
    assert np.allclose(back.table, b.table)
