"""Conditional probability tables for dichotomic multi-party scenarios.

A :class:`Behavior` stores ``P(a_1..a_N | s_1..s_N)`` as an array whose
first ``N`` axes index settings and whose last ``N`` axes index outcome
bits. Bit 0 stands for outcome +1 and bit 1 for outcome -1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from . import qalgebra as qa
from .errors import InvariantError, SizeCapError

PROB_TOL = 1e-12
NORM_TOL = 1e-10
VERTEX_CAP = 10**6


@dataclass(frozen=True)
class Scenario:
    """Party count and number of dichotomic settings per party."""

    parties: int
    settings: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.parties < 1 or len(self.settings) != self.parties or min(self.settings) < 1:
            raise InvariantError(f"invalid scenario {self}")

    @classmethod
    def uniform(cls, parties: int, settings: int = 2) -> "Scenario":
        return cls(parties, (settings,) * parties)


def _signs(n: int) -> np.ndarray:
    """Array of shape (2,)*n holding the product of outcome values."""
    s = np.array([1.0, -1.0])
    out = np.ones((2,) * n)
    for k in range(n):
        shape = [1] * n
        shape[k] = 2
        out = out * s.reshape(shape)
    return out


class Behavior:
    """Immutable conditional probability table.

    Parameters
    ----------
    table : array_like
        Shape ``settings + (2,)*N``. Entries below ``-1e-12`` or conditionals
        whose sum deviates from 1 by more than ``1e-10`` raise
        :class:`InvariantError`. Accepted tables are clipped and renormalized.
    """

    __slots__ = ("_table", "scenario")

    def __init__(self, table: np.ndarray, scenario: Scenario | None = None):
        t = np.array(table, dtype=float)
        n = t.ndim // 2
        if t.ndim % 2 or t.shape[n:] != (2,) * n:
            raise InvariantError(f"table shape {t.shape} is not settings + (2,)*N")
        if scenario is None:
            scenario = Scenario(n, tuple(t.shape[:n]))
        if scenario.settings != t.shape[:n]:
            raise InvariantError("scenario does not match table shape")
        if np.any(t < -PROB_TOL):
            raise InvariantError(f"negative probability {t.min()}")
        sums = t.reshape(t.shape[:n] + (-1,)).sum(axis=-1)
        if np.any(np.abs(sums - 1.0) > NORM_TOL):
            raise InvariantError(f"conditional distributions not normalized (worst sum {sums.flat[np.argmax(np.abs(sums - 1))]})")
        t = np.clip(t, 0.0, None)
        t = t / t.reshape(t.shape[:n] + (-1,)).sum(axis=-1).reshape(t.shape[:n] + (1,) * n)
        t.setflags(write=False)
        self._table = t
        self.scenario = scenario

    @property
    def table(self) -> np.ndarray:
        return self._table

    @property
    def parties(self) -> int:
        return self.scenario.parties

    def prob(self, outcomes: Sequence[int], settings: Sequence[int]) -> float:
        """``P(outcomes | settings)`` with outcomes given as +1/-1 values."""
        bits = tuple(0 if o == 1 else 1 for o in outcomes)
        return float(self._table[tuple(settings) + bits])

    def marginal_table(self, keep: Sequence[int]) -> np.ndarray:
        """Outcome marginal over ``keep``; settings axes of all parties are retained."""
        n = self.parties
        drop = tuple(n + k for k in range(n) if k not in keep)
        return self._table.sum(axis=drop)

    def __repr__(self) -> str:
        return f"Behavior(parties={self.parties}, settings={self.scenario.settings})"


def mix(behaviors: Sequence[Behavior], weights: Iterable[float]) -> Behavior:
    """Convex combination of behaviors on the same scenario."""
    w = np.asarray(list(weights), dtype=float)
    t = sum(wi * b.table for wi, b in zip(w, behaviors))
    return Behavior(t, behaviors[0].scenario)


def expectation(b: Behavior, settings: Sequence[int], parties: Sequence[int] | None = None) -> float:
    """Correlator of ``parties`` (default: all) at the joint setting tuple.

    With a strict subset of parties this is the signaling-aware marginal,
    e.g. ``expectation(b, (0, 1), parties=(0,))`` is ``<A>`` measured
    alongside the second setting of party 2.
    """
    settings = tuple(settings)
    if len(settings) != b.parties or any(not 0 <= s < m for s, m in zip(settings, b.scenario.settings)):
        raise InvariantError(f"invalid setting tuple {settings}")
    keep = tuple(range(b.parties)) if parties is None else tuple(sorted(parties))
    marg = b.marginal_table(keep)[settings]
    return float(np.sum(marg * _signs(len(keep))))


@dataclass(frozen=True)
class MarginalReport:
    """Marginal expectations of ``subset`` indexed by (retained settings, co-settings)."""

    subset: tuple[int, ...]
    values: dict
    no_signaling: bool
    setting_free: dict = field(default_factory=dict)


def marginal_report(b: Behavior, subset: Sequence[int], tol: float = 1e-10) -> MarginalReport:
    """Correlators of ``subset`` for every full setting tuple.

    When the values do not depend on the co-settings (within ``tol``) the
    report also carries setting-free values keyed by the retained settings.
    """
    subset = tuple(sorted(subset))
    others = [k for k in range(b.parties) if k not in subset]
    values = {}
    for s in itertools.product(*[range(m) for m in b.scenario.settings]):
        own = tuple(s[k] for k in subset)
        co = tuple(s[k] for k in others)
        values[(own, co)] = expectation(b, s, subset)
    grouped: dict = {}
    for (own, _), v in values.items():
        grouped.setdefault(own, []).append(v)
    ns = all(max(vs) - min(vs) <= tol for vs in grouped.values())
    free = {own: vs[0] for own, vs in grouped.items()} if ns else {}
    return MarginalReport(subset, values, ns, free)


def is_no_signaling(b: Behavior, tol: float = 1e-10) -> tuple[bool, float]:
    """Check that tracing out any one party removes all dependence on its setting.

    Returns
    -------
    (bool, float)
        Verdict and the largest marginal discrepancy found.
    """
    n = b.parties
    worst = 0.0
    for k in range(n):
        marg = b.table.sum(axis=n + k)
        spread = marg.max(axis=k) - marg.min(axis=k)
        worst = max(worst, float(spread.max()))
    return worst <= tol, worst


def deterministic_behavior(responses: Sequence[Sequence[int]]) -> Behavior:
    """Local deterministic behavior: ``responses[k][s]`` is party k's outcome (+1/-1) at setting s."""
    n = len(responses)
    settings = tuple(len(r) for r in responses)
    t = np.zeros(settings + (2,) * n)
    for s in itertools.product(*[range(m) for m in settings]):
        bits = tuple(0 if responses[k][s[k]] == 1 else 1 for k in range(n))
        t[s + bits] = 1.0
    return Behavior(t)


def table_from_outcomes(outcomes: Callable[[tuple[int, ...]], Sequence[int]], scenario: Scenario) -> Behavior:
    """Deterministic (possibly signaling) behavior from a map settings -> outcome values."""
    n = scenario.parties
    t = np.zeros(scenario.settings + (2,) * n)
    for s in itertools.product(*[range(m) for m in scenario.settings]):
        bits = tuple(0 if o == 1 else 1 for o in outcomes(s))
        t[s + bits] = 1.0
    return Behavior(t, scenario)


def uniform_behavior(scenario: Scenario) -> Behavior:
    n = scenario.parties
    return Behavior(np.full(scenario.settings + (2,) * n, 0.5**n), scenario)


def local_deterministic_vertices(scenario: Scenario, cap: int = VERTEX_CAP) -> list[Behavior]:
    """All ``prod_k 2**m_k`` local deterministic behaviors.

    Raises
    ------
    SizeCapError
        If the vertex count exceeds ``cap``.
    """
    count = int(np.prod([2**m for m in scenario.settings], dtype=object))
    if count > cap:
        raise SizeCapError(f"{count} deterministic vertices exceed the cap {cap}")
    per_party = [list(itertools.product((1, -1), repeat=m)) for m in scenario.settings]
    return [deterministic_behavior(r) for r in itertools.product(*per_party)]


def pr_box() -> Behavior:
    """Popescu-Rohrlich box: outcomes agree unless both settings are primed."""
    return ns_extreme_point(0, 0, 0)


def ns_extreme_point(alpha: int, beta: int, gamma: int) -> Behavior:
    """Non-local no-signaling vertex with ``a1 xor a2 = xy xor alpha x xor beta y xor gamma``."""
    t = np.zeros((2, 2, 2, 2))
    for x, y, a1, a2 in itertools.product(range(2), repeat=4):
        if (a1 ^ a2) == (x * y) ^ (alpha * x) ^ (beta * y) ^ gamma:
            t[x, y, a1, a2] = 0.5
    return Behavior(t)


def ns_extreme_points_222() -> list[Behavior]:
    """The eight non-local vertices of the two-party two-setting no-signaling polytope."""
    return [ns_extreme_point(a, b, c) for a, b, c in itertools.product(range(2), repeat=3)]


def correlators_222(b: Behavior) -> np.ndarray:
    """2x2 array of ``<A_x B_y>``."""
    _require_222(b)
    return np.array([[expectation(b, (x, y)) for y in range(2)] for x in range(2)])


def _require_222(b: Behavior) -> None:
    if b.scenario != Scenario.uniform(2, 2):
        raise InvariantError("this check needs the two-party two-setting scenario")


def chsh_facets(b: Behavior) -> np.ndarray:
    """Values of the eight CHSH expressions ``+-(E00 + E01 + E10 + E11 - 2 E_xy)``."""
    e = correlators_222(b)
    total = e.sum()
    vals = []
    for x, y in itertools.product(range(2), repeat=2):
        v = total - 2 * e[x, y]
        vals.extend([v, -v])
    return np.array(vals)


@dataclass(frozen=True)
class LocalityVerdict:
    local: bool
    method: str
    detail: float


def lp_membership(b: Behavior, cap: int = VERTEX_CAP) -> bool:
    """Linear feasibility: is ``b`` a convex mixture of local deterministic vertices?"""
    verts = local_deterministic_vertices(b.scenario, cap)
    a_eq = np.array([v.table.ravel() for v in verts]).T
    a_eq = np.vstack([a_eq, np.ones(len(verts))])
    b_eq = np.concatenate([b.table.ravel(), [1.0]])
    res = linprog(np.zeros(len(verts)), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return bool(res.status == 0)


def is_local(b: Behavior, method: str = "auto", tol: float = 1e-9, cap: int = VERTEX_CAP) -> LocalityVerdict:
    """Decide locality.

    For the (2,2,2) scenario the default uses the eight CHSH facets plus the
    no-signaling conditions. ``method="lp"`` forces the vertex-weight
    feasibility problem, which is also used for every other scenario.
    """
    if method not in ("auto", "facets", "lp"):
        raise ValueError(f"unknown method {method!r}")
    if method != "lp" and b.scenario == Scenario.uniform(2, 2):
        ns, dev = is_no_signaling(b, tol)
        worst = float(chsh_facets(b).max())
        return LocalityVerdict(ns and worst <= 2 + tol, "facets", worst if ns else dev)
    if method == "facets":
        raise InvariantError("facet test is only available for the (2,2,2) scenario")
    return LocalityVerdict(lp_membership(b, cap), "lp", float("nan"))


# expectation-space features for the two-party scenario

_PRODUCTS = ("AB", "AB'", "A'B", "A'B'")
_MARGINALS = ("A|B", "A|B'", "A'|B", "A'|B'", "B|A", "B|A'", "B'|A", "B'|A'")
FEATURES = _PRODUCTS + _MARGINALS


def features_222(b: Behavior) -> np.ndarray:
    """Products then signaling-aware marginals, ordered as :data:`FEATURES`.

    ``"A'|B"`` is the mean of party 1 at its second setting while party 2
    measures its first.
    """
    _require_222(b)
    e = correlators_222(b)
    prods = [e[0, 0], e[0, 1], e[1, 0], e[1, 1]]
    ma = [expectation(b, (x, y), (0,)) for x in range(2) for y in range(2)]
    mb = [expectation(b, (x, y), (1,)) for y in range(2) for x in range(2)]
    return np.array(prods + ma + mb)


def _vec(**terms: float) -> np.ndarray:
    v = np.zeros(len(FEATURES))
    for key, c in terms.items():
        v[FEATURES.index(key.replace("p", "'").replace("_", "|"))] += c
    return v


def _four_term_rows() -> np.ndarray:
    rows = []
    families = [
        ("AB", "ApB", "A_B", "Ap_B"),
        ("AB", "ABp", "B_A", "Bp_A"),
        ("ApBp", "ApB", "B_Ap", "Bp_Ap"),
        ("ApBp", "ABp", "A_Bp", "Ap_Bp"),
    ]
    for p1, p2, m1, m2 in families:
        for al, be, ga in itertools.product(range(2), repeat=3):
            v = np.zeros(len(FEATURES))
            v += _vec(**{p1: (-1) ** ga})
            v += _vec(**{p2: (-1) ** (be + ga)})
            v += _vec(**{m1: (-1) ** (al + ga)})
            v += _vec(**{m2: (-1) ** (al + be + ga + 1)})
            rows.append(v)
    return np.array(rows)


def _swap_primed_a(v: np.ndarray) -> np.ndarray:
    """Relabel A <-> A' in a feature coefficient vector."""
    mapping = {"AB": "A'B", "AB'": "A'B'", "A'B": "AB", "A'B'": "AB'",
               "A|B": "A'|B", "A|B'": "A'|B'", "A'|B": "A|B", "A'|B'": "A|B'",
               "B|A": "B|A'", "B|A'": "B|A", "B'|A": "B'|A'", "B'|A'": "B'|A"}
    out = np.zeros_like(v)
    for i, key in enumerate(FEATURES):
        out[FEATURES.index(mapping[key])] = v[i]
    return out


def _six_term_rows() -> np.ndarray:
    rows = []
    for al, be in itertools.product(range(2), repeat=2):
        if al == be == 0:
            continue
        rows.append(_vec(AB=-1, ApBp=-1, A_Bp=-(-1) ** al, B_Ap=-(-1) ** al,
                         Ap_B=-(-1) ** be, Bp_A=-(-1) ** be))
    for ga, de in itertools.product(range(2), repeat=2):
        rows.append(_vec(AB=-(-1) ** ga, ApBp=-(-1) ** (ga + 1),
                         A_Bp=-(-1) ** (1 + ga * de), B_Ap=-(-1) ** (1 - ga * (de + 1)),
                         Ap_B=-(-1) ** ((de + 1) * (1 - ga) + 1), Bp_A=-(-1) ** (1 + de * (1 - ga))))
    rows += [_swap_primed_a(r) for r in rows]
    return np.array(rows)


FOUR_TERM = _four_term_rows()
SIX_TERM = _six_term_rows()


def ns_nontrivial_inequalities(b: Behavior) -> dict[str, np.ndarray]:
    """Left-hand sides of the 32 four-term and 14 six-term inequalities (each bounded by 2)."""
    f = features_222(b)
    return {"four_term": FOUR_TERM @ f, "six_term": SIX_TERM @ f}


def roy_singh_check(b: Behavior, tol: float = 1e-12) -> bool:
    """``-1 + |<A>^B + <B>^A| <= <AB> <= 1 - |<A>^B - <B>^A|`` at every two-party setting pair."""
    if b.parties != 2:
        raise InvariantError("defined for two parties")
    for s in itertools.product(*[range(m) for m in b.scenario.settings]):
        ma, mb = expectation(b, s, (0,)), expectation(b, s, (1,))
        e = expectation(b, s)
        if not (-1 + abs(ma + mb) - tol <= e <= 1 - abs(ma - mb) + tol):
            return False
    return True


@dataclass(frozen=True)
class SingletReport:
    applicable: bool
    sum_rule_ok: bool
    odd_ok: bool
    worst_sum: float
    worst_odd: float


def singlet_reproduction_constraints(
    family: Callable[[np.ndarray, np.ndarray], Behavior],
    directions: Sequence[Sequence[float]],
    tol: float = 1e-9,
) -> SingletReport:
    """Marginal constraints forced on a no-signaling model of singlet perfect correlations.

    ``family(a, b)`` returns the one-setting two-party behavior for spin
    directions ``a`` and ``b``. When the family has perfect anti-correlation
    at ``a = b`` and perfect correlation at ``a = -b`` for every probe
    direction, the marginals must satisfy ``<a>_I + <a>_II = 0`` and be odd
    functions of the direction. Otherwise the report is not applicable.
    """
    sums, odds = [], []
    for d in directions:
        a = np.asarray(d, dtype=float)
        same, opposite = family(a, a), family(a, -a)
        if abs(expectation(same, (0, 0)) + 1) > tol or abs(expectation(opposite, (0, 0)) - 1) > tol:
            return SingletReport(False, False, False, float("nan"), float("nan"))
        m1, m2 = expectation(same, (0, 0), (0,)), expectation(same, (0, 0), (1,))
        flipped = family(-a, -a)
        n1, n2 = expectation(flipped, (0, 0), (0,)), expectation(flipped, (0, 0), (1,))
        sums.append(abs(m1 + m2))
        odds.append(max(abs(m1 + n1), abs(m2 + n2)))
    ws, wo = max(sums), max(odds)
    return SingletReport(True, ws <= tol, wo <= tol, ws, wo)


def quantum_behavior(rho: np.ndarray, observables: Sequence[Sequence[np.ndarray]]) -> Behavior:
    """Behavior generated by measuring dichotomic observables on a multi-qubit state.

    ``observables[k][s]`` is the +/-1-valued observable of party k at setting s.
    """
    rho = qa.to_density(rho)
    n = len(observables)
    settings = tuple(len(o) for o in observables)
    t = np.zeros(settings + (2,) * n)
    for s in itertools.product(*[range(m) for m in settings]):
        for bits in itertools.product(range(2), repeat=n):
            proj = qa.kron(*[(np.eye(2) + (1 - 2 * bt) * observables[k][s[k]]) / 2 for k, bt in enumerate(bits)])
            t[s + bits] = float(np.real(np.trace(rho @ proj)))
    return Behavior(np.clip(t, 0, None), Scenario(n, settings))


def random_ns_behavior(rng: np.random.Generator, concentration: float = 0.3) -> Behavior:
    """Random point of the (2,2,2) no-signaling polytope as a Dirichlet mix of its 24 vertices."""
    verts = local_deterministic_vertices(Scenario.uniform(2, 2)) + ns_extreme_points_222()
    return mix(verts, rng.dirichlet(np.full(len(verts), concentration)))


def random_behavior(rng: np.random.Generator, scenario: Scenario | None = None) -> Behavior:
    """Random table with every conditional drawn uniformly from the simplex (generally signaling)."""
    scenario = scenario or Scenario.uniform(2, 2)
    n = scenario.parties
    flat = rng.dirichlet(np.ones(2**n), size=scenario.settings)
    return Behavior(flat.reshape(scenario.settings + (2,) * n), scenario)


# JSON


def behavior_to_json(b: Behavior) -> dict:
    """``{"parties", "settings", "table": {"s1,s2": [p...]}}`` with +1-first outcome order."""
    table = {}
    for s in itertools.product(*[range(m) for m in b.scenario.settings]):
        table[",".join(map(str, s))] = [float(p) for p in b.table[s].ravel()]
    return {"parties": b.parties, "settings": list(b.scenario.settings), "table": table}


def behavior_from_json(obj: dict) -> Behavior:
    try:
        n = int(obj["parties"])
        settings = tuple(int(m) for m in obj["settings"])
        entries = obj["table"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvariantError(f"malformed behavior record: {exc}") from None
    scenario = Scenario(n, settings)
    t = np.full(settings + (2,) * n, np.nan)
    for key, probs in entries.items():
        s = tuple(int(x) for x in key.split(","))
        if len(s) != n or any(not 0 <= si < m for si, m in zip(s, settings)):
            raise InvariantError(f"bad setting key {key!r}")
        probs = np.asarray(probs, dtype=float)
        if probs.size != 2**n:
            raise InvariantError(f"setting {key!r} needs {2**n} probabilities")
        t[s] = probs.reshape((2,) * n)
    if np.isnan(t).any():
        raise InvariantError("behavior table is missing setting tuples")
    return Behavior(t, scenario)
