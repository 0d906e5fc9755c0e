"""Monogamy of CHSH-type correlations in three-party systems.

Observables live in the real x-z plane: ``cos(angle) sigma_z + sin(angle) sigma_x``.
Qubits are ordered a, b, c.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from . import behaviors as bh
from . import qalgebra as qa
from . import statelib as sl
from .errors import InvariantError

TV_BOUND = 8.0
NS_BOUND = 4.0


def xz(angle: float) -> np.ndarray:
    return qa.plane_observable(angle, "xz")


@dataclass(frozen=True)
class SharedSettingCHSHPair:
    """Angles of ``A, A'`` (party a, shared), ``B, B'`` and ``C, C'``."""

    a: tuple[float, float]
    b: tuple[float, float]
    c: tuple[float, float]

    def observables(self) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
        return tuple((xz(p[0]), xz(p[1])) for p in (self.a, self.b, self.c))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "SharedSettingCHSHPair":
        ang = rng.uniform(0, 2 * np.pi, size=6)
        return cls(tuple(ang[:2]), tuple(ang[2:4]), tuple(ang[4:]))


def chsh_two(first: tuple[np.ndarray, np.ndarray], second: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    """``X Y + X Y' + X' Y - X' Y'`` on two qubits."""
    (x, xp), (y, yp) = first, second
    return np.kron(x, y + yp) + np.kron(xp, y - yp)


def _on_pair(op2: np.ndarray, pair: tuple[int, int]) -> np.ndarray:
    """Place a two-qubit operator on qubits ``pair`` of three."""
    full = np.kron(op2, qa.IDENTITY2)  # acts on qubits 0,1
    order = list(pair) + [q for q in range(3) if q not in pair]
    perm = np.argsort(order)
    t = full.reshape([2] * 6)
    t = t.transpose(list(perm) + [3 + p for p in perm])
    return t.reshape(8, 8)


def tv_values(rho: np.ndarray, pair: SharedSettingCHSHPair) -> tuple[float, float]:
    """``(<B_ab>, <B_ac>)`` with the same a-observables in both."""
    (A, B, C) = pair.observables()
    bab = _on_pair(chsh_two(A, B), (0, 1))
    bac = _on_pair(chsh_two(A, C), (0, 2))
    return qa.expectation(bab, rho), qa.expectation(bac, rho)


@dataclass(frozen=True)
class MonogamyVerdict:
    values: tuple[float, ...]
    lhs: float
    bound: float
    violated: bool

    def as_dict(self) -> dict:
        return {"values": list(self.values), "lhs": self.lhs, "bound": self.bound, "violated": self.violated}


def tv_check(rho: np.ndarray, pair: SharedSettingCHSHPair, tol: float = 1e-8) -> MonogamyVerdict:
    vab, vac = tv_values(rho, pair)
    lhs = vab**2 + vac**2
    return MonogamyVerdict((vab, vac), lhs, TV_BOUND, lhs > TV_BOUND + tol)


def tv_strengthened(rho: np.ndarray, pair: SharedSettingCHSHPair, tol: float = 1e-8) -> MonogamyVerdict:
    """Sum of squares against ``8 (1 - <sigma_y>_a^2)``; sigma_y is normal to the measurement plane."""
    vab, vac = tv_values(rho, pair)
    sy = qa.expectation(qa.embed(qa.SIGMA_Y, 0, 3), rho)
    bound = TV_BOUND * (1 - sy**2)
    lhs = vab**2 + vac**2
    return MonogamyVerdict((vab, vac), lhs, bound, lhs > bound + tol)


def tv_audit(samples: int, rng: np.random.Generator, tol: float = 1e-8) -> dict:
    """Random pure states and random in-plane settings against both quantum trade-offs."""
    worst = worst_strong = -math.inf
    shared_nonlocal = 0
    witness = None
    for _ in range(samples):
        rho = sl.random_pure_state(8, rng)
        pair = SharedSettingCHSHPair.random(rng)
        v = tv_check(rho, pair, tol)
        s = tv_strengthened(rho, pair, tol)
        if v.lhs > worst:
            worst, witness = v.lhs, v.values
        worst_strong = max(worst_strong, s.lhs - s.bound)
        if v.values[0] ** 2 > 4 and v.values[1] ** 2 >= 4:
            shared_nonlocal += 1
    return {"audit": "tv", "samples": samples, "max_observed": worst, "bound": TV_BOUND,
            "max_strengthened_excess": worst_strong, "shared_nonlocal": shared_nonlocal,
            "witnesses": [list(witness)] if witness is not None else []}


# ------------------------------------------------------------ no-signaling


def _chsh_of_pair(b: bh.Behavior, first: int, second: int) -> float:
    """CHSH value of two parties, the third party's setting fixed at 0."""
    n = b.parties
    vals = {}
    for x, y in itertools.product(range(2), repeat=2):
        s = [0] * n
        s[first], s[second] = x, y
        vals[x, y] = bh.expectation(b, s, parties=(first, second))
    return vals[0, 0] + vals[0, 1] + vals[1, 0] - vals[1, 1]


def ns_monogamy(b: bh.Behavior, tol: float = 1e-10) -> MonogamyVerdict:
    """``|B_ab| + |B_ac| <= 4``; a violation certifies signaling."""
    if b.parties != 3 or b.scenario.settings != (2, 2, 2):
        raise InvariantError("the three-party two-setting scenario is required")
    vab, vac = _chsh_of_pair(b, 0, 1), _chsh_of_pair(b, 0, 2)
    lhs = abs(vab) + abs(vac)
    return MonogamyVerdict((vab, vac), lhs, NS_BOUND, lhs > NS_BOUND + tol)


def embed_two_party(b2: bh.Behavior, pair: tuple[int, int], third: Sequence[float] = (0.5, 0.5)) -> bh.Behavior:
    """Three-party behavior: ``b2`` on ``pair``, the remaining party independent with ``P(+1|z) = third[z]``."""
    t2 = b2.table  # (x, y, a, b)
    lone = [q for q in range(3) if q not in pair][0]
    pc = np.array([[p, 1 - p] for p in third])  # (z, c)
    t = np.einsum("xyab,zc->xyzabc", t2, pc)
    order = list(pair) + [lone]
    perm = np.argsort(order)
    t = t.transpose(list(perm) + [3 + p for p in perm])
    return bh.Behavior(t)


def pr_box_on_ab() -> bh.Behavior:
    return embed_two_party(bh.pr_box(), (0, 1))


def signaling_double_box() -> bh.Behavior:
    """Deterministic signaling table with CHSH 4 on both ab and ac."""
    scen = bh.Scenario.uniform(3, 2)
    return bh.table_from_outcomes(lambda s: (1, (-1) ** (s[0] * s[1]), (-1) ** (s[0] * s[2])), scen)


def random_ns_behavior_3(rng: np.random.Generator, terms: int = 6) -> bh.Behavior:
    """Convex mixture of local deterministic points and PR boxes on one pair with the third party local."""
    parts = []
    for _ in range(terms):
        if rng.uniform() < 0.5:
            resp = [tuple(rng.choice([1, -1], size=2)) for _ in range(3)]
            parts.append(bh.deterministic_behavior(resp))
        else:
            pair = [(0, 1), (0, 2), (1, 2)][rng.integers(3)]
            box = bh.ns_extreme_point(*rng.integers(2, size=3))
            parts.append(embed_two_party(box, pair, rng.choice([0.0, 1.0], size=2)))
    weights = rng.dirichlet(np.full(terms, 0.5))
    return bh.mix(parts, weights)


def ns_audit(samples: int, rng: np.random.Generator) -> dict:
    worst, witness = -math.inf, None
    for _ in range(samples):
        v = ns_monogamy(random_ns_behavior_3(rng))
        if v.lhs > worst:
            worst, witness = v.lhs, v.values
    pr = ns_monogamy(pr_box_on_ab())
    return {"audit": "ns", "samples": samples, "max_observed": worst, "bound": NS_BOUND,
            "witnesses": [list(pr.values), list(witness)]}


# --------------------------------------------------------------- D3 family


def d3_operator(i: int, observables: Sequence[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    """``B_2 (x) (A_i + A_i')/2 + 1 (x) (A_i - A_i')/2`` with ``B_2`` half the CHSH operator of the other qubits."""
    if i not in (0, 1, 2):
        raise InvariantError("qubit index must be 0, 1 or 2")
    others = [q for q in range(3) if q != i]
    b2 = 0.5 * chsh_two(observables[others[0]], observables[others[1]])
    ai, aip = observables[i]
    op = np.kron(b2, (ai + aip) / 2) + np.kron(np.eye(4), (ai - aip) / 2)
    # op acts on (others[0], others[1], i); reorder to (0, 1, 2)
    order = others + [i]
    perm = np.argsort(order)
    t = op.reshape([2] * 6).transpose(list(perm) + [3 + p for p in perm])
    return t.reshape(8, 8)


def d3_values(rho: np.ndarray, angles: Sequence[tuple[float, float]]) -> np.ndarray:
    """``<D_3^(i)>`` for i = 0, 1, 2 with x-z plane angles ``(alpha_i, beta_i)``."""
    obs = [(xz(a), xz(b)) for a, b in angles]
    return np.array([qa.expectation(d3_operator(i, obs), rho) for i in range(3)])


def d3_bounds(n: int = 3) -> dict[str, float]:
    """Bounds on ``|<D_N^(i)>|`` and the three-qubit quadratic bounds.

    ``chi_same``/``chi_other`` are the biseparable bounds when qubit ``i``
    is, or is not, the separated qubit.
    """
    return {
        "all_states": 2 ** ((n - 2) / 2),
        "fully_separable": 1.0,
        "chi_same": math.sqrt(2),
        "chi_other": 1.0,
        "sphere": 3.0,
        "pairwise": 2.5,
        "orthogonal_all_states": math.sqrt(1.5),
        "orthogonal_fully_separable": math.sqrt(0.75),
        "orthogonal_chi_same": math.sqrt(1.5),
        "orthogonal_chi_other": math.sqrt(0.75),
        "orthogonal_pairwise": 2.0,
    }


def bell_pair_with_spectator() -> tuple[np.ndarray, list[tuple[float, float]]]:
    """Two-qubit GHZ on a, b times ``|0>`` on c, with ``A_c = A_c' = sigma_z``.

    The returned angles make the CHSH part optimal for the Bell pair.
    """
    psi = np.kron(sl.ghz(2), sl.basis_ket("0"))
    return psi, [(0.0, np.pi / 2), (np.pi / 4, -np.pi / 4), (0.0, 0.0)]


def saturate(objective: Callable[[np.ndarray], float], dim: int, rng: np.random.Generator,
             restarts: int = 20, tol: float = 1e-6) -> tuple[float, np.ndarray]:
    """Multi-start direction-set ascent; returns a lower-bound witness, not a certified maximum."""
    best_val, best_x = -math.inf, None
    for _ in range(restarts):
        x0 = rng.uniform(-np.pi, np.pi, size=dim)
        res = minimize(lambda x: -objective(x), x0, method="Powell", options={"xtol": tol, "ftol": tol * 1e-3})
        if -res.fun > best_val:
            best_val, best_x = -res.fun, res.x
    return float(best_val), best_x


def d3_audit(samples: int, rng: np.random.Generator, orthogonal: bool = False) -> dict:
    """Random pure states and settings against the pairwise and sphere bounds."""
    bounds = d3_bounds()
    pair_bound = bounds["orthogonal_pairwise" if orthogonal else "pairwise"]
    worst_pair = worst_sphere = worst_single = -math.inf
    for _ in range(samples):
        rho = sl.random_pure_state(8, rng)
        alpha = rng.uniform(0, 2 * np.pi, size=3)
        beta = alpha + np.pi / 2 if orthogonal else rng.uniform(0, 2 * np.pi, size=3)
        d = d3_values(rho, list(zip(alpha, beta)))
        worst_pair = max(worst_pair, max(d[i] ** 2 + d[(i + 1) % 3] ** 2 for i in range(3)))
        worst_sphere = max(worst_sphere, float(np.sum(d**2)))
        worst_single = max(worst_single, float(np.max(np.abs(d))))
    w = sl.w_state()
    wit = d3_values(w, [(-0.133, 0.460)] * 3) if not orthogonal else d3_values(w, [(0.54, 0.54 + np.pi / 2)] * 3)
    return {"audit": "d3-orthogonal" if orthogonal else "d3", "samples": samples,
            "max_observed": float(worst_pair), "bound": pair_bound, "max_sphere": worst_sphere,
            "max_single": worst_single, "witnesses": [wit.tolist()]}
