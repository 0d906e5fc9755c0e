"""Acceptance suite: one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` (lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from qcorr import behaviors as bh
from qcorr import bellops as bo
from qcorr import hvmodels as hv
from qcorr import monogamy as mo
from qcorr import qalgebra as qa
from qcorr import sepcrit as sc
from qcorr import statelib as sl
from qcorr import tradeoff as tr

SQRT2 = math.sqrt(2)
RESULTS: list[str] = []


def record(number: int, title: str, failures: list[str]) -> None:
    status = "PASS" if not failures else "FAIL"
    line = f"criterion {number:2d} {status}: {title}"
    if failures:
        line += " | " + "; ".join(failures)
    RESULTS.append(line)
    print(line)
    assert not failures, line


def check(failures: list[str], ok: bool, message: str) -> None:
    if not ok:
        failures.append(message)


def test_01_tsirelson():
    f: list[str] = []
    obs = [[qa.SIGMA_Z, qa.SIGMA_X],
           [(qa.SIGMA_Z + qa.SIGMA_X) / SQRT2, (qa.SIGMA_Z - qa.SIGMA_X) / SQRT2]]
    op = bo.to_operator(bo.chsh(), obs)
    top = qa.max_eigenvalue(op)
    val = qa.expectation(op, sl.bell_state("phi+"))
    check(f, abs(top - 2 * SQRT2) <= 1e-9, f"max eigenvalue {top}")
    check(f, abs(val - 2 * SQRT2) <= 1e-9, f"phi+ value {val}")
    record(1, "CHSH maximum 2*sqrt(2) at orthogonal settings", f)


def test_02_orthogonal_separable_bound():
    f: list[str] = []
    d = tr.verify_d(math.pi / 2, math.pi / 2, grid=24, full=True)
    check(f, abs(d - SQRT2) <= 1e-3, f"verify_d {d}")
    rng = np.random.default_rng(2)
    worst = -math.inf
    for _ in range(500):
        rho = sl.random_separable_state(2, rng)
        lhs, rhs = tr.separable_quadratic(rho, qa.random_triple(rng), qa.random_triple(rng))
        worst = max(worst, lhs - 1, lhs - rhs)
    check(f, worst <= 1e-10, f"quadratic form exceeded by {worst}")
    record(2, "separable bound sqrt(2) and quadratic form <= 1", f)


def test_03_tradeoff_curves():
    f: list[str] = []
    thetas = np.linspace(0, math.pi, 20)
    err_c = err_d = 0.0
    for ta in thetas:
        for tb in thetas:
            err_c = max(err_c, abs(tr.verify_c(ta, tb) - tr.c_max(ta, tb)))
            err_d = max(err_d, abs(tr.verify_d(ta, tb) - tr.d_max(ta, tb)))
    check(f, err_c <= 1e-8, f"C error {err_c}")
    check(f, err_d <= 1e-3, f"D error {err_d}")
    err_eq = max(abs(tr.d_equal(t) - tr.verify_d(t, t)) for t in thetas)
    check(f, err_eq <= 1e-3, f"diagonal error {err_eq}")
    excess = max(tr.d_equal(t) - tr.roy_bound(t) for t in thetas)
    check(f, excess <= 1e-12, f"d_equal above older bound by {excess}")
    record(3, "trade-off curves match numeric oracles on a 20x20 grid", f)


def test_04_mermin_svetlichny_maxima():
    f: list[str] = []
    for n in range(2, 7):
        m = bo.ghz_value(bo.mermin(n), bo.mermin_ghz_settings(n))
        check(f, abs(m - 2 ** ((n + 1) / 2)) <= 1e-8, f"Mermin N={n}: {m}")
        for sign in (+1, -1):
            obs = bo.angles_to_observables(bo.ghz_optimal_settings(n, sign))
            s = qa.expectation(bo.to_operator(bo.svetlichny(n, sign), obs), sl.ghz(n))
            check(f, abs(s - 2 ** (n - 1) * SQRT2) <= 1e-8, f"Svetlichny{sign:+d} N={n}: {s}")
    for n in range(2, 5):
        lm = bo.local_max(bo.mermin(n))
        pm = bo.plhv_max(bo.svetlichny(n))
        check(f, abs(lm - 2) <= 1e-12, f"Mermin local N={n}: {lm}")
        check(f, abs(pm - 2 ** (n - 1)) <= 1e-12, f"Svetlichny PLHV N={n}: {pm}")
    record(4, "Mermin and Svetlichny maxima with brute-force bounds", f)


def test_05_noise_robustness():
    f: list[str] = []

    def expect(label, got, want):
        check(f, got == want, f"{label}: got {got}, want {want}")

    phi4 = sl.NAMED_STATES["phi4"]()
    expect("phi4 full", sc.noise_robustness(phi4, "full").exact, Fraction(12, 29))
    expect("phi4 some", sc.noise_robustness(phi4, "some").exact, Fraction(16, 19))
    dicke = sl.NAMED_STATES["dicke24-rotated"]()
    expect("dicke full", sc.noise_robustness(dicke, "full").exact, Fraction(4, 11))
    expect("dicke every split", sc.noise_robustness(dicke, "split").exact, Fraction(16, 19))
    expect("dur4", sc.noise_robustness(sl.NAMED_STATES["dur4"](), "some").exact, Fraction(8, 13))
    expect("smolin", sc.noise_robustness(sl.NAMED_STATES["smolin"](), "some").exact, Fraction(2, 3))
    for n in range(3, 9):
        rho = sl.projector(sl.ghz(n))
        expect(f"GHZ{n} some", sc.noise_robustness(rho, "some").exact, 1 / (1 + Fraction(2) ** (1 - n)))
        expect(f"GHZ{n} full", sc.noise_robustness(rho, "full").exact, 1 / (2 * (1 - Fraction(2) ** -n)))
        stab = sc.ghz_white_noise_thresholds(n)["stabilizer_full"]
        expect(f"GHZ{n} stabilizer", stab, 1 / (3 - Fraction(2) ** (2 - n)))
    record(5, "noise-robustness thresholds as exact rationals", f)


def test_06_werner_thresholds():
    f: list[str] = []
    ppt = sc.bisect_threshold(lambda p: not sl.is_ppt(sl.werner(1 - p), [1]))
    check(f, abs(ppt - 2 / 3) <= 1e-6, f"PPT flip at singlet fraction {1 - ppt}")
    noise = sc.bisect_threshold(lambda p: sc.two_qubit_criterion(sl.werner(1 - p)).violated)
    check(f, abs(noise - 2 / 3) <= 1e-6, f"criterion threshold {noise}")
    missed = [p for p in np.geomspace(1e-4, 1, 200)
              if not sc.two_qubit_criterion(sl.noisy_singlet_colored(p)).violated]
    check(f, not missed, f"colored noise missed at p={missed[:3]}")
    record(6, "Werner PPT flip at 1/3, criterion exact below 2/3, colored noise detected", f)


def _one_way_protocol() -> bh.Behavior:
    return bh.table_from_outcomes(lambda s: (1, 1) if s == (0, 0) else ((-1, -1) if s == (1, 0) else (1, 1)),
                                  bh.Scenario.uniform(2, 2))


def _six_term_protocol() -> bh.Behavior:
    return bh.table_from_outcomes(lambda s: (-1 if s[0] == s[1] else 1, 1), bh.Scenario.uniform(2, 2))


def test_07_polytope_suite():
    f: list[str] = []
    pr = bh.pr_box()
    check(f, abs(bh.chsh_facets(pr).max() - 4) <= 1e-12, "PR box CHSH")
    check(f, bh.is_no_signaling(pr)[0], "PR box signaling")
    check(f, not bh.is_local(pr).local, "PR box local")
    verts = bh.local_deterministic_vertices(bh.Scenario.uniform(2, 2))
    check(f, len(verts) == 16, f"{len(verts)} vertices")
    check(f, all(bh.chsh_facets(v).max() <= 2 + 1e-12 for v in verts), "vertex breaks a facet")
    rng = np.random.default_rng(7)
    disagree = 0
    for i in range(1000):
        b = bh.random_ns_behavior(rng) if i % 2 else bh.random_behavior(rng)
        disagree += bh.is_local(b, method="facets").local != bh.lp_membership(b)
    check(f, disagree == 0, f"LP and facets disagree {disagree} times")
    worst = -math.inf
    for _ in range(1000):
        vals = bh.ns_nontrivial_inequalities(bh.random_ns_behavior(rng))
        worst = max(worst, vals["four_term"].max(), vals["six_term"].max())
    check(f, worst <= 2 + 1e-10, f"NS inequality value {worst}")
    v4 = bh.ns_nontrivial_inequalities(_one_way_protocol())["four_term"].max()
    v6 = bh.ns_nontrivial_inequalities(_six_term_protocol())["six_term"].max()
    check(f, abs(v4 - 4) <= 1e-12 and abs(v6 - 6) <= 1e-12, f"protocol values {v4}, {v6}")
    record(7, "PR box, vertices, LP agreement and the 46 no-signaling inequalities", f)


def test_08_monogamy():
    f: list[str] = []
    rng = np.random.default_rng(8)
    tv = mo.tv_audit(10_000, rng)
    check(f, tv["max_observed"] <= 8 + 1e-8, f"TV max {tv['max_observed']}")
    check(f, tv["max_strengthened_excess"] <= 1e-8, f"strengthened excess {tv['max_strengthened_excess']}")
    ns = mo.ns_audit(1000, rng)
    check(f, ns["max_observed"] <= 4 + 1e-10, f"NS max {ns['max_observed']}")
    wit = mo.ns_monogamy(mo.pr_box_on_ab()).values
    check(f, np.allclose(wit, (4, 0)), f"NS witness {wit}")
    w = sl.w_state()
    g = np.abs(mo.d3_values(w, [(-0.133, 0.460)] * 3))
    o = np.abs(mo.d3_values(w, [(0.54, 0.54 + math.pi / 2)] * 3))
    check(f, np.allclose(g, 1.022, atol=1e-3), f"W general {g}")
    check(f, np.allclose(o, 0.906, atol=1e-3), f"W orthogonal {o}")
    record(8, "monogamy audits and W-state D3 values", f)


def test_09_correlations_between_correlations():
    f: list[str] = []
    v = bo.corr_of_corr_test()
    check(f, abs(v - 2 * SQRT2) <= 1e-9, f"value {v}")
    for name, op in bo.corr_of_corr_observables().items():
        check(f, np.allclose(op @ op, np.eye(4), atol=1e-12), f"{name} squared")
    record(9, "four-qubit correlation test reaches 2*sqrt(2)", f)


def test_10_hidden_variable_models():
    f: list[str] = []
    rng = np.random.default_rng(10)
    for family in ("nonlocal-det", "nonlocal-stoch"):
        a = hv.audit_chsh(family, 1000, rng)
        check(f, a["max_chsh"] <= 2 + 1e-9, f"{family} reaches {a['max_chsh']}")
    m = hv.maudlin_implication_check(1000, rng)
    check(f, m["passed"], f"Maudlin gap {m['max_gap']}")
    table, prior = hv.setting_dependent_instance()
    check(f, hv.factorization_gap(table, prior) > 0.1, "negative control factorizes")
    check(f, np.abs(hv.maudlin_residuals(table, prior, "second")).max() > 0.1, "negative control meets both conditions")
    d = hv.det_ns_implies_local(2)
    check(f, d["tables"] == 2**16 and d["all_local"], f"determinism audit {d}")
    b = hv.branciard_check(0.5)
    check(f, abs(b["lhs_singlet"] - 1.9378) <= 1e-4 and abs(b["bound"] - 1.8350) <= 1e-4 and b["violated"],
          f"Leggett-type check {b}")
    record(10, "hidden-variable models, Maudlin check, determinism and Leggett-type window", f)


TABLE_BIPARTITE = {
    "a-(bcd)": [{0, 1}, {2, 3}, {4, 5}, {6, 7}], "b-(acd)": [{0, 3}, {1, 2}, {5, 6}, {4, 7}],
    "c-(abd)": [{0, 6}, {1, 7}, {2, 4}, {3, 5}], "d-(abc)": [{0, 4}, {1, 5}, {2, 6}, {3, 7}],
    "(ab)-(cd)": [{0, 2}, {1, 3}, {4, 6}, {5, 7}], "(ac)-(bd)": [{0, 7}, {1, 6}, {2, 5}, {3, 4}],
    "(ad)-(bc)": [{0, 5}, {1, 4}, {2, 7}, {3, 6}],
}
TABLE_TRIPARTITE = {
    "a-b-(cd)": [{0, 1, 2, 3}, {4, 5, 6, 7}], "(ab)-c-d": [{0, 2, 4, 6}, {1, 3, 5, 7}],
    "a-(bc)-d": [{0, 1, 4, 5}, {2, 3, 6, 7}], "(ac)-b-d": [{0, 3, 4, 7}, {1, 2, 5, 6}],
    "(ad)-b-c": [{0, 3, 5, 6}, {1, 2, 4, 7}], "(bd)-a-c": [{0, 1, 6, 7}, {2, 3, 4, 5}],
}


def test_11_solution_set_tables():
    f: list[str] = []
    for k, table in ((2, TABLE_BIPARTITE), (3, TABLE_TRIPARTITE)):
        generated = {frozenset(map(frozenset, sc.solution_sets(s, 4))) for s in sc.all_splits(4, k)}
        wanted = {frozenset(map(frozenset, sets)) for sets in table.values()}
        check(f, generated == wanted, f"level {k} tables differ")
        for name, sets in table.items():
            got = sorted(sorted(z) for z in sc.solution_sets(name, 4))
            check(f, got == sorted(sorted(z) for z in sets), f"{name}: {got}")
    record(11, "four-qubit solution-set tables", f)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
