import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcorr import qalgebra as qa
from qcorr import statelib as sl
from qcorr import tradeoff as tr
from qcorr.errors import InvariantError

angle = st.floats(0, 2 * math.pi, allow_nan=False)


def test_closed_form_examples():
    assert tr.c_max(math.pi / 2, math.pi / 2) == pytest.approx(2 * math.sqrt(2))
    assert tr.c_max(0, 1.3) == pytest.approx(2)
    assert tr.c_max(math.pi / 4, math.pi / 4) == pytest.approx(math.sqrt(6))
    assert tr.d_max(math.pi / 2, math.pi / 2) == pytest.approx(math.sqrt(2))
    assert tr.d_equal(0) == pytest.approx(2)


def test_violation_factors():
    v = tr.violation_factors(math.pi / 2)
    assert v["X"] == pytest.approx(2) and v["X_chsh"] == pytest.approx(math.sqrt(2))
    v0 = tr.violation_factors(0)
    assert v0["X"] == pytest.approx(1) and v0["X_chsh"] == pytest.approx(1)


@given(angle, angle)
def test_c_dominates_d(ta, tb):
    c, d = tr.c_max(ta, tb), tr.d_max(ta, tb)
    assert c >= d - 1e-12
    if abs(math.sin(ta) * math.sin(tb)) < 1e-9:
        assert c == pytest.approx(d)


@given(angle, angle)
def test_periodic_and_symmetric(ta, tb):
    for fn in (tr.c_max, tr.d_max):
        assert fn(ta, tb) == pytest.approx(fn(tb, ta))
        assert fn(ta + math.pi, tb) == pytest.approx(fn(ta, tb))


@given(angle)
def test_d_equal_is_diagonal_of_d(theta):
    assert tr.d_equal(theta) == pytest.approx(tr.d_max(theta, theta))


def test_d_equal_below_older_bound():
    for theta in np.linspace(0, math.pi, 100):
        assert tr.d_equal(theta) <= tr.roy_bound(theta) + 1e-12


@pytest.mark.parametrize("ta,tb", [(0.3, 1.1), (math.pi / 2, math.pi / 2), (2.0, 0.7)])
def test_numeric_oracles(ta, tb):
    assert tr.verify_c(ta, tb) == pytest.approx(tr.c_max(ta, tb), abs=1e-8)
    assert tr.verify_d(ta, tb) == pytest.approx(tr.d_max(ta, tb), abs=1e-3)


def test_full_search_agrees_with_reduced_search():
    assert tr.verify_d(1.0, 2.0, grid=20, full=True) == pytest.approx(tr.d_max(1.0, 2.0), abs=1e-3)


def test_verify_d_trivial_and_grid_check():
    assert tr.verify_d(0, 0) == pytest.approx(2, abs=1e-9)
    with pytest.raises(InvariantError):
        tr.verify_d(0.5, 0.5, grid=1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), angle, angle)
def test_commutator_bound(seed, ta, tb):
    rho = sl.random_density_matrix(4, np.random.default_rng(seed))
    value, bound = tr.commutator_bound(rho, ta, tb)
    assert value <= bound + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_separable_quadratic_form(seed):
    r = np.random.default_rng(seed)
    rho = sl.random_separable_state(2, r)
    lhs, rhs = tr.separable_quadratic(rho, qa.random_triple(r), qa.random_triple(r))
    assert lhs <= rhs + 1e-10 <= 1 + 1e-10


def test_entangled_state_breaks_quadratic_form():
    lhs, _ = tr.separable_quadratic(sl.bell_state("phi+"), qa.OrthonormalTriple.pauli(), qa.OrthonormalTriple.pauli())
    assert lhs == pytest.approx(4)


def test_curve_shapes():
    assert len(tr.curve("c", 5)) == 25
    assert len(tr.curve("roy", 5)) == 5
    with pytest.raises(InvariantError):
        tr.curve("nope", 5)
