"""Bell polynomials, their operator forms and bound tables.

A polynomial is a coefficient map from setting tuples to reals. Setting
index 0 is the unprimed observable of a party and index 1 the primed one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import qalgebra as qa
from . import statelib as sl
from .errors import InvariantError, SizeCapError

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class BellPolynomial:
    """Real linear combination of N-party correlators.

    Attributes
    ----------
    parties : int
    coeffs : mapping
        ``(s_1, ..., s_N) -> c``; zero coefficients are dropped.
    settings : int
        Settings per party.
    """

    parties: int
    coeffs: Mapping[tuple[int, ...], float]
    settings: int = 2
    name: str = ""

    def __post_init__(self) -> None:
        clean = {}
        for key, c in self.coeffs.items():
            key = tuple(int(k) for k in key)
            if len(key) != self.parties or any(not 0 <= k < self.settings for k in key):
                raise InvariantError(f"bad setting tuple {key}")
            if not math.isfinite(c):
                raise InvariantError("coefficients must be finite")
            if c != 0:
                clean[key] = clean.get(key, 0.0) + float(c)
        object.__setattr__(self, "coeffs", clean)

    @property
    def absolute_max(self) -> float:
        """Largest value over unrestricted correlators: the sum of absolute coefficients."""
        return float(sum(abs(c) for c in self.coeffs.values()))

    def evaluate(self, correlators: Mapping[tuple[int, ...], float] | Callable[[tuple[int, ...]], float]) -> float:
        """Value for given correlators, supplied as a mapping or a callable."""
        get = correlators if callable(correlators) else correlators.__getitem__
        return float(sum(c * get(key) for key, c in self.coeffs.items()))

    def scaled(self, factor: float) -> "BellPolynomial":
        return BellPolynomial(self.parties, {k: factor * c for k, c in self.coeffs.items()}, self.settings, self.name)

    def __add__(self, other: "BellPolynomial") -> "BellPolynomial":
        merged = dict(self.coeffs)
        for k, c in other.coeffs.items():
            merged[k] = merged.get(k, 0.0) + c
        return BellPolynomial(self.parties, {k: c for k, c in merged.items() if abs(c) > 1e-14}, self.settings)

    def __neg__(self) -> "BellPolynomial":
        return self.scaled(-1.0)

    def __sub__(self, other: "BellPolynomial") -> "BellPolynomial":
        return self + (-other)

    def allclose(self, other: "BellPolynomial", tol: float = 1e-12) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self.coeffs.get(k, 0.0) - other.coeffs.get(k, 0.0)) <= tol for k in keys)

    def extend(self, linear: Mapping[int, float]) -> "BellPolynomial":
        """Multiply by ``sum_s linear[s] A_{N+1}^{(s)}`` for a new last party."""
        out: dict[tuple[int, ...], float] = {}
        for key, c in self.coeffs.items():
            for s, w in linear.items():
                out[key + (s,)] = out.get(key + (s,), 0.0) + c * w
        return BellPolynomial(self.parties + 1, {k: v for k, v in out.items() if abs(v) > 1e-14}, self.settings)

    def to_json(self) -> dict:
        return {"coeffs": {",".join(map(str, k)): c for k, c in sorted(self.coeffs.items())}}

    @classmethod
    def from_json(cls, obj: dict) -> "BellPolynomial":
        try:
            raw = {tuple(int(x) for x in k.split(",")): float(v) for k, v in obj["coeffs"].items()}
        except (KeyError, AttributeError, ValueError) as exc:
            raise InvariantError(f"malformed polynomial record: {exc}") from None
        if not raw:
            raise InvariantError("polynomial has no terms")
        n = len(next(iter(raw)))
        m = 1 + max(max(k) for k in raw)
        return cls(n, raw, max(m, 2))


def chsh() -> BellPolynomial:
    """``AB + AB' + A'B - A'B'``."""
    return BellPolynomial(2, {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): -1}, name="chsh")


def _swap_primes(p: BellPolynomial) -> BellPolynomial:
    return BellPolynomial(p.parties, {tuple(1 - s for s in k): c for k, c in p.coeffs.items()}, p.settings)


def mermin_pair(n: int) -> tuple[BellPolynomial, BellPolynomial]:
    """Mermin polynomial and its primed partner, expanded from the two-party seed.

    ``M_j = (M_{j-1}(A_j + A_j') + M'_{j-1}(A_j - A_j'))/2``; the primed
    polynomial follows by exchanging primed and unprimed everywhere.
    """
    if n < 2:
        raise InvariantError("Mermin polynomials start at two parties")
    m = chsh()
    mp = _swap_primes(m)
    for _ in range(3, n + 1):
        m, mp = (
            m.extend({0: 0.5, 1: 0.5}) + mp.extend({0: 0.5, 1: -0.5}),
            mp.extend({1: 0.5, 0: 0.5}) + m.extend({1: 0.5, 0: -0.5}),
        )
    return (BellPolynomial(n, m.coeffs, name=f"mermin{n}"), BellPolynomial(n, mp.coeffs, name=f"mermin{n}'"))


def mermin(n: int, primed: bool = False) -> BellPolynomial:
    return mermin_pair(n)[1 if primed else 0]


def svetlichny_sign(k: int, sign: int) -> int:
    """``(-1)**(k(k+sign)/2)``: the cycles (1,-1,-1,1) for ``+`` and (1,1,-1,-1) for ``-``."""
    return -1 if (k * (k + sign) // 2) % 2 else 1


def svetlichny(n: int, sign: int = +1) -> BellPolynomial:
    """Svetlichny polynomial: every term carries the sign fixed by its number of primed settings."""
    if sign not in (1, -1):
        raise InvariantError("sign must be +1 or -1")
    coeffs = {key: svetlichny_sign(sum(key), sign) for key in itertools.product((0, 1), repeat=n)}
    return BellPolynomial(n, coeffs, name=f"svetlichny{n}{'+' if sign > 0 else '-'}")


def svetlichny_recursive(n: int, sign: int = +1) -> BellPolynomial:
    """Same polynomial built by ``S_N = S_{N-1} A_N -/+ S^{other}_{N-1} A_N'`` from the two-party case."""
    if n == 2:
        m, mp = mermin_pair(2)
        return m if sign < 0 else -mp
    return svetlichny_recursive(n - 1, sign).extend({0: 1.0}) - svetlichny_recursive(n - 1, -sign).extend({1: 1.0}).scaled(sign)


def svetlichny_via_mermin(n: int, sign: int = +1) -> BellPolynomial:
    """Linear relation between Svetlichny and Mermin polynomials.

    Odd ``n = 2l + 1``: ``2^{l-1}(nu_l M -/+ nu'_l M')``. Even ``n = 2l``:
    ``2^{l-1} nu_l M^{(sign)}`` where the primed and unprimed polynomials
    trade places when ``l`` is odd.
    """
    m, mp = mermin_pair(n)
    if n % 2:
        l = (n - 1) // 2
        return (m.scaled(svetlichny_sign(l, sign)) - mp.scaled(sign * svetlichny_sign(l, -sign))).scaled(2.0 ** (l - 1))
    l = n // 2
    use_unprimed = (sign > 0) == (l % 2 == 0)
    return (m if use_unprimed else mp).scaled(2.0 ** (l - 1) * svetlichny_sign(l, sign))


def collins_normalized(n: int) -> BellPolynomial:
    """Alternative normalization: ``M_N`` for even N, ``(M_N + M_N')/2`` for odd N."""
    m, mp = mermin_pair(n)
    return m if n % 2 == 0 else (m + mp).scaled(0.5)


def collins_plhv_bound(n: int) -> float:
    """PLHV bound of :func:`collins_normalized`."""
    return 2.0 ** ((n - 1) / 2) if n % 2 else 2.0 ** ((n - 2) / 2)


def to_operator(p: BellPolynomial, observables: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    """Hermitian operator ``sum_I c_I A_1^{(i_1)} (x) ... (x) A_N^{(i_N)}``.

    ``observables[k][s]`` is the operator of party ``k`` at setting ``s``.
    """
    if len(observables) != p.parties:
        raise InvariantError("need one observable list per party")
    dims = [np.asarray(obs[0]).shape[0] for obs in observables]
    d = int(np.prod(dims))
    op = np.zeros((d, d), dtype=complex)
    for key, c in p.coeffs.items():
        op += c * qa.kron(*[observables[k][s] for k, s in enumerate(key)])
    return op


def local_max(p: BellPolynomial, cap: int = 10**6) -> float:
    """Maximum of ``|p|`` over local deterministic assignments (brute force)."""
    count = (2**p.settings) ** p.parties
    if count > cap:
        raise SizeCapError(f"{count} deterministic assignments exceed the cap {cap}")
    best = 0.0
    per_party = list(itertools.product((1, -1), repeat=p.settings))
    for assign in itertools.product(per_party, repeat=p.parties):
        val = sum(c * math.prod(assign[k][s] for k, s in enumerate(key)) for key, c in p.coeffs.items())
        best = max(best, abs(val))
    return best


def _block_max(p: BellPolynomial, block: Sequence[int]) -> float:
    """Max of ``|p|`` when correlators factor as (arbitrary on ``block``) x (arbitrary on the rest)."""
    rest = [k for k in range(p.parties) if k not in block]
    rest_keys = list(itertools.product(range(p.settings), repeat=len(rest)))
    best = 0.0
    for values in itertools.product((1, -1), repeat=len(rest_keys)):
        inner: dict[tuple[int, ...], float] = {}
        lookup = dict(zip(rest_keys, values))
        for key, c in p.coeffs.items():
            bk = tuple(key[k] for k in block)
            inner[bk] = inner.get(bk, 0.0) + c * lookup[tuple(key[k] for k in rest)]
        best = max(best, sum(abs(v) for v in inner.values()))
    return best


def plhv_max(p: BellPolynomial) -> float:
    """Maximum over partially local models: the best bipartition with arbitrary correlations inside each block.

    Enumerates sign patterns of the smaller block, so keep ``N`` small.
    """
    n = p.parties
    best = 0.0
    for size in range(1, n // 2 + 1):
        for small in itertools.combinations(range(n), size):
            big = [k for k in range(n) if k not in small]
            best = max(best, _block_max(p, big))
    return best


@dataclass(frozen=True)
class BoundTable:
    local: float | None
    plhv: float | None
    quantum: float | None
    absolute: float

    def as_dict(self) -> dict:
        return {"local": self.local, "plhv": self.plhv, "qm": self.quantum, "abs": self.absolute}


def bounds(kind: str, n: int) -> BoundTable:
    """Known local, partially local, quantum and absolute maxima.

    ``None`` marks a value that is not tabulated (the local bound of the
    Svetlichny polynomial for ``n >= 3`` is not needed anywhere).
    """
    if n < 2:
        raise InvariantError("bounds need at least two parties")
    if kind == "chsh":
        if n != 2:
            raise InvariantError("CHSH is a two-party polynomial")
        return BoundTable(2.0, 2.0, 2 * SQRT2, 4.0)
    if kind == "mermin":
        plhv = 2.0 if n == 2 else None
        return BoundTable(2.0, plhv, 2.0 ** ((n + 1) / 2), mermin(n).absolute_max)
    if kind == "svetlichny":
        local = 2.0 if n == 2 else None
        return BoundTable(local, 2.0 ** (n - 1), 2.0 ** (n - 1) * SQRT2, 2.0**n)
    raise InvariantError(f"unknown polynomial kind {kind!r}")


def xy_observable(angle: float) -> np.ndarray:
    """``cos(angle) sigma_x + sin(angle) sigma_y``."""
    return qa.plane_observable(angle, "xy")


def ghz_optimal_settings(n: int, sign: int = +1) -> list[tuple[float, float]]:
    """Angle pairs (unprimed, primed) in the x-y plane maximizing the Svetlichny value on GHZ.

    Party 1 uses ``sign*pi/4`` and ``sign*pi/4 + pi/2``; the others use ``0`` and ``pi/2``.
    Each switch to a primed setting adds ``pi/2`` to the total phase, which
    reproduces the sign of every term.
    """
    first = sign * math.pi / 4
    return [(first, first + math.pi / 2)] + [(0.0, math.pi / 2)] * (n - 1)


def mermin_ghz_settings(n: int) -> list[tuple[float, float]]:
    """Angles maximizing the Mermin value on GHZ: party 1 shifted by ``-(n-1) pi/4``."""
    shift = -(n - 1) * math.pi / 4
    return [(shift, shift + math.pi / 2)] + [(0.0, math.pi / 2)] * (n - 1)


def angles_to_observables(angles: Sequence[tuple[float, ...]]) -> list[list[np.ndarray]]:
    return [[xy_observable(a) for a in pair] for pair in angles]


def ghz_value(p: BellPolynomial, angles: Sequence[tuple[float, ...]], phase_sign: int = +1) -> float:
    """Closed-form value on GHZ: each correlator equals ``+-cos`` of the summed angles."""
    return float(sum(c * phase_sign * math.cos(sum(angles[k][s] for k, s in enumerate(key))) for key, c in p.coeffs.items()))


def correlation_matrix(rho: np.ndarray) -> np.ndarray:
    """``T_ij = Tr[rho sigma_i (x) sigma_j]`` for a two-qubit state."""
    rho = qa.to_density(rho)
    return np.array([[qa.expectation(qa.kron(a, b), rho) for b in qa.PAULIS] for a in qa.PAULIS])


def horodecki_chsh_max(rho: np.ndarray) -> float:
    """Largest CHSH value over spin observables: twice the norm of the two largest singular values of T."""
    s = np.linalg.svd(correlation_matrix(rho), compute_uv=False)
    return float(2 * math.sqrt(s[0] ** 2 + s[1] ** 2))


# four-qubit correlations-between-correlations test


def _proj(v: np.ndarray) -> np.ndarray:
    return sl.projector(v)


def corr_of_corr_observables() -> dict[str, np.ndarray]:
    """The four two-qubit dichotomic observables X, X', Y, Y' of the test."""
    k = sl.basis_ket
    r = SQRT2
    c_plus, c_minus = (4 + 2 * r) ** -0.5, (4 - 2 * r) ** -0.5
    b_plus = c_plus * (k("01") + (1 + r) * k("10"))
    b_minus = c_minus * (k("01") + (1 - r) * k("10"))
    bp_plus = c_minus * (k("01") + (-1 + r) * k("10"))
    bp_minus = c_plus * (k("01") + (-1 - r) * k("10"))
    p00, p01, p10, p11 = (_proj(k(s)) for s in ("00", "01", "10", "11"))
    bell = {w: _proj(sl.bell_state(w)) for w in ("psi+", "psi-", "phi+", "phi-")}
    return {
        "X": bell["psi+"] + bell["phi+"] - bell["psi-"] - bell["phi-"],
        "X'": p00 + p01 - p10 - p11,
        "Y": p00 + _proj(b_plus) - _proj(b_minus) - p11,
        "Y'": p11 + _proj(bp_plus) - _proj(bp_minus) - p00,
    }


def corr_of_corr_operator() -> np.ndarray:
    """``X (x) Y + X (x) Y' + X' (x) Y - X' (x) Y'`` on four qubits."""
    o = corr_of_corr_observables()
    return to_operator(chsh(), [[o["X"], o["X'"]], [o["Y"], o["Y'"]]])


def corr_of_corr_test() -> float:
    """Absolute expectation of the four-qubit operator on ``(|0101> - |1010>)/sqrt(2)``."""
    return abs(qa.expectation(corr_of_corr_operator(), sl.psi_corr()))
