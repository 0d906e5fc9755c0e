"""Separability criteria for multi-qubit states built from local orthogonal observables.

Every criterion compares two families of numbers indexed by
``x = 0 .. 2**(N-1) - 1``:

* ``Q_x = <X_x>^2 + <Y_x>^2``, which equals ``4 |rho_{l, lbar}|^2``;
* ``P_x = <I_x>^2 - <Z_x>^2``, which equals ``4 rho_{l,l} rho_{lbar,lbar}``.

Here ``(l, lbar)`` is the complementary pair of basis strings attached to
``x`` (matrix indices are 0-based internally). The matrix-element
identities hold for Pauli triples of the same orientation on every qubit;
:func:`loo_quantities` evaluates the operator form for arbitrary triples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import qalgebra as qa
from . import statelib as sl
from .errors import InvariantError

TOL = 1e-10

Split = tuple[frozenset, ...]


# ---------------------------------------------------------------- operators


@dataclass(frozen=True)
class LooFamily:
    """Operator quadruples ``{X_x, Y_x, Z_x, I_x}`` for ``x = 0 .. 2**(n-1) - 1``."""

    n: int
    quadruples: tuple[dict, ...] = field(repr=False)
    triples: tuple[qa.OrthonormalTriple, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.quadruples)


def loo_family(n: int, triples: Sequence[qa.OrthonormalTriple] | None = None) -> LooFamily:
    """Build the family by recursive doubling, one qubit at a time.

    The newest qubit is the leftmost tensor factor. For ``y = 2x + s``
    the quadruple at level ``n`` combines the qubit's ``X, Y, Z`` with the
    level ``n - 1`` quadruple ``x``; ``s`` selects the relative signs.
    """
    if n < 1:
        raise InvariantError("need at least one qubit")
    triples = tuple(triples) if triples is not None else (qa.OrthonormalTriple.pauli(),) * n
    if len(triples) != n:
        raise InvariantError("one orthonormal triple per qubit is required")
    x_op, y_op, z_op = triples[-1].observables()
    quads = [{"X": x_op, "Y": y_op, "Z": z_op, "I": qa.IDENTITY2}]
    for q in range(n - 2, -1, -1):
        X, Y, Z = triples[q].observables()
        I = qa.IDENTITY2
        nxt = []
        for inner in quads:
            kx = lambda a, b: np.kron(a, inner[b])  # noqa: E731
            for s in (0, 1):
                sg = 1 if s == 0 else -1
                nxt.append({
                    "X": 0.5 * (kx(X, "X") - sg * kx(Y, "Y")),
                    "Y": 0.5 * (kx(Y, "X") + sg * kx(X, "Y")),
                    "Z": 0.5 * (kx(Z, "I") + sg * kx(I, "Z")),
                    "I": 0.5 * (kx(I, "I") + sg * kx(Z, "Z")),
                })
        quads = nxt
    return LooFamily(n, tuple(quads), triples)


@lru_cache(maxsize=None)
def anti_diagonal_pairs(n: int) -> tuple[tuple[int, int], ...]:
    """0-based ``(l, lbar)`` attached to each ``x`` (``l`` is the row of ``X_x + i Y_x``)."""
    fam = loo_family(n)
    out = []
    for quad in fam.quadruples:
        raising = quad["X"] + 1j * quad["Y"]
        r, c = np.unravel_index(np.argmax(np.abs(raising)), raising.shape)
        out.append((int(r), int(c)))
    return tuple(out)


def pair_index(n: int) -> dict[int, int]:
    """Map every basis index to the ``x`` whose pair contains it."""
    lookup = {}
    for x, (l, lb) in enumerate(anti_diagonal_pairs(n)):
        lookup[l] = lookup[lb] = x
    return lookup


def orientation_permutation(n: int, flipped: Iterable[int]) -> tuple[int, ...]:
    """Relabelling of ``P_x`` when the listed qubits use opposite-orientation triples.

    With the ``z`` axis reversed on those qubits, ``Q_x`` still reads the
    coherence of pair ``x`` while ``P_x`` reads the populations of the pair
    whose strings differ from ``l_x`` on exactly the flipped qubits.
    """
    mask = sum(1 << (n - 1 - q) for q in set(flipped))
    lookup = pair_index(n)
    return tuple(lookup[l ^ mask] for l, _ in anti_diagonal_pairs(n))


def loo_quantities(rho: np.ndarray, family: LooFamily) -> tuple[np.ndarray, np.ndarray]:
    """Operator-form ``(Q_x, P_x)`` arrays."""
    rho = qa.to_density(rho)
    q = np.array([qa.expectation(f["X"], rho) ** 2 + qa.expectation(f["Y"], rho) ** 2 for f in family.quadruples])
    p = np.array([qa.expectation(f["I"], rho) ** 2 - qa.expectation(f["Z"], rho) ** 2 for f in family.quadruples])
    return q, p


def matrix_quantities(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Matrix-element form ``(4|rho_{l,lbar}|^2, 4 rho_ll rho_lbar,lbar)``."""
    rho = qa.to_density(rho)
    n = qa.num_qubits(rho.shape[0])
    pairs = anti_diagonal_pairs(n)
    q = np.array([4 * abs(rho[l, lb]) ** 2 for l, lb in pairs])
    p = np.array([4 * rho[l, l].real * rho[lb, lb].real for l, lb in pairs])
    return q, p


def _quantities(rho: np.ndarray, family: LooFamily | None) -> tuple[np.ndarray, np.ndarray]:
    return matrix_quantities(rho) if family is None else loo_quantities(rho, family)


# ------------------------------------------------------------------ splits


def parse_split(text: str, n: int | None = None) -> Split:
    """Parse names such as ``"a-(bcd)"`` or ``"(ab)-c-d"`` (letters index qubits from ``a``)."""
    blocks = []
    for part in text.split("-"):
        letters = part.strip().strip("()")
        if not letters or not letters.isalpha():
            raise InvariantError(f"cannot parse split {text!r}")
        blocks.append(frozenset(ord(ch) - ord("a") for ch in letters))
    split = tuple(blocks)
    _validate_split(split, n)
    return split


def split_name(split: Split) -> str:
    parts = []
    for block in split:
        letters = "".join(chr(ord("a") + q) for q in sorted(block))
        parts.append(letters if len(letters) == 1 else f"({letters})")
    return "-".join(parts)


def _validate_split(split: Split, n: int | None) -> int:
    union = frozenset().union(*split)
    total = sum(len(b) for b in split)
    if any(not b for b in split) or total != len(union):
        raise InvariantError("split blocks must be non-empty and disjoint")
    size = max(union) + 1
    if n is not None and size > n:
        raise InvariantError("split mentions a qubit beyond n")
    n = size if n is None else n
    if union != frozenset(range(n)):
        raise InvariantError("split blocks must cover every qubit")
    return n


def _set_partitions(items: list[int]) -> Iterable[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def all_splits(n: int, k: int) -> list[Split]:
    """Every partition of ``n`` qubits into ``k`` blocks, in a canonical order."""
    out = []
    for part in _set_partitions(list(range(n))):
        if len(part) == k:
            out.append(tuple(frozenset(b) for b in sorted(part, key=lambda b: (min(b), len(b)))))
    out.sort(key=split_name)
    return out


def _canonical(split: Split) -> Split:
    return tuple(sorted(split, key=min))


@lru_cache(maxsize=None)
def _solution_sets_cached(split: Split, n: int) -> tuple[frozenset, ...]:
    if len(split) == 1:
        return (frozenset(range(2 ** (n - 1))),)
    if len(split) == 2:
        mask = sum(1 << (n - 1 - q) for q in split[0])
        lookup = pair_index(n)
        seen, sets = set(), []
        for x, (l, _) in enumerate(anti_diagonal_pairs(n)):
            if x in seen:
                continue
            partner = lookup[l ^ mask]
            seen |= {x, partner}
            sets.append(frozenset({x, partner}))
        return tuple(sorted(sets, key=min))
    # merge solution sets of every split obtained by joining two blocks
    parent = list(range(2 ** (n - 1)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in itertools.combinations(range(len(split)), 2):
        coarser = [b for t, b in enumerate(split) if t not in (i, j)] + [split[i] | split[j]]
        for zset in _solution_sets_cached(_canonical(tuple(coarser)), n):
            members = sorted(zset)
            for m in members[1:]:
                parent[find(m)] = find(members[0])
    groups: dict[int, set] = {}
    for x in range(2 ** (n - 1)):
        groups.setdefault(find(x), set()).add(x)
    return tuple(sorted((frozenset(g) for g in groups.values()), key=min))


def solution_sets(split: Split | str, n: int | None = None) -> tuple[frozenset, ...]:
    """Groups of ``x`` values that share one inequality for separability under ``split``.

    Bipartite splits pair ``x`` with the ``x`` whose basis strings differ by
    flipping every qubit of one side. Finer splits merge the sets of all
    splits obtained by joining two of their blocks.
    """
    if isinstance(split, str):
        split = parse_split(split, n)
    n = _validate_split(split, n)
    return _solution_sets_cached(_canonical(split), n)


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class CriterionVerdict:
    """Outcome of one necessary separability condition ``lhs <= rhs <= bound``."""

    criterion: str
    lhs: float
    rhs: float
    bound: float | None
    violated: bool
    margin: float
    level: int | None = None
    split: str | None = None
    detail: tuple = ()

    def as_dict(self) -> dict:
        return {"criterion": self.criterion, "level": self.level, "split": self.split,
                "lhs": self.lhs, "rhs": self.rhs, "bound": self.bound, "violated": self.violated,
                "margin": self.margin}


def _verdict(name: str, lhs: float, rhs: float, bound: float | None, tol: float, **kw) -> CriterionVerdict:
    over_rhs = lhs - rhs
    over_bound = rhs - bound if bound is not None else -math.inf
    violated = over_rhs > tol or over_bound > tol
    return CriterionVerdict(name, float(lhs), float(rhs), bound, bool(violated), float(max(over_rhs, over_bound)), **kw)


def two_qubit_criterion(rho: np.ndarray, triples: Sequence[qa.OrthonormalTriple] | None = None,
                        tol: float = TOL) -> CriterionVerdict:
    """Two-qubit condition ``max_x Q_x <= min_x P_x <= 1/4``.

    With Pauli triples this reads ``max |rho_{l,lbar}|^2 <= min rho_ll rho_lbar,lbar``,
    which is necessary and sufficient for separability of this kind of state.
    """
    fam = loo_family(2, triples) if triples is not None else None
    q, p = _quantities(rho, fam)
    return _verdict("two-qubit", q.max(), p.min(), 0.25, tol, level=2)


def split_criterion(rho: np.ndarray, split: Split | str, family: LooFamily | None = None,
                    tol: float = TOL) -> list[CriterionVerdict]:
    """One verdict per solution set of ``split``: ``max_z Q <= min_z P <= 4**(1-k)``."""
    rho = qa.to_density(rho)
    n = qa.num_qubits(rho.shape[0])
    if isinstance(split, str):
        split = parse_split(split, n)
    _validate_split(split, n)
    q, p = _quantities(rho, family)
    bound = 4.0 ** (1 - len(split))
    name = split_name(split)
    out = []
    for z in solution_sets(split, n):
        idx = sorted(z)
        out.append(_verdict("split", q[idx].max(), p[idx].min(), bound, tol, level=len(split), split=name, detail=tuple(idx)))
    return out


def split_violated(rho: np.ndarray, split: Split | str, family: LooFamily | None = None, tol: float = TOL) -> bool:
    return any(v.violated for v in split_criterion(rho, split, family, tol))


def _containing_sets(n: int, k: int, x: int) -> list[frozenset]:
    return [z for s in all_splits(n, k) for z in solution_sets(s, n) if x in z]


def min_hitting_weight(sets: Sequence[frozenset], weights: Sequence[float], exclude: int,
                       exhaustive_limit: int = 16) -> float:
    """Smallest total weight of distinct picks that hit every set, never picking ``exclude``.

    Exact by subset enumeration when at most ``exhaustive_limit`` candidates
    exist; otherwise a greedy cover, which can only overestimate the
    minimum and therefore yields a weaker but still valid bound.
    """
    sets = [frozenset(z) - {exclude} for z in sets]
    cands = sorted(frozenset().union(*sets)) if sets else []
    if not sets:
        return 0.0
    if any(not z for z in sets):
        return math.inf
    if len(cands) <= exhaustive_limit:
        pos = {c: i for i, c in enumerate(cands)}
        masks = np.array([sum(1 << pos[c] for c in z) for z in sets], dtype=np.int64)
        subsets = np.arange(1 << len(cands), dtype=np.int64)
        ok = np.ones(subsets.shape, dtype=bool)
        for m in masks:
            ok &= (subsets & m) != 0
        bits = (subsets[:, None] >> np.arange(len(cands))) & 1
        totals = bits @ np.asarray([weights[c] for c in cands], dtype=float)
        return float(totals[ok].min())
    remaining, total = list(sets), 0.0
    while remaining:
        useful = [c for c in cands if any(c in z for z in remaining)]
        best = min(useful, key=lambda c: weights[c] / sum(c in z for z in remaining))
        total += weights[best]
        remaining = [z for z in remaining if best not in z]
    return total


def k_sep_criterion(rho: np.ndarray, k: int, family: LooFamily | None = None,
                    tol: float = TOL, exhaustive: bool | None = None) -> CriterionVerdict:
    """k-separability condition ``sqrt(Q_x) <= min_T sum_{y in T} sqrt(P_y)`` for every ``x``.

    ``T`` runs over choices of one ``y != x`` from each solution set that
    contains ``x`` (over all k-partite splits); repeated picks count once.
    The reported ``lhs``/``rhs`` belong to the ``x`` with the largest margin.

    The minimum is exact for ``N <= 4``; beyond that a greedy pick is used
    unless ``exhaustive=True``. Greedy can only overshoot the minimum, so
    it never reports a false violation.
    """
    rho = qa.to_density(rho)
    n = qa.num_qubits(rho.shape[0])
    if exhaustive is None:
        exhaustive = n <= 4
    exhaustive_limit = 2**n if exhaustive else 0
    if not 2 <= k <= n:
        raise InvariantError(f"level k={k} outside 2..{n}")
    q, p = _quantities(rho, family)
    root_p = np.sqrt(np.clip(p, 0, None))
    best = None
    for x in range(len(q)):
        rhs = min_hitting_weight(_containing_sets(n, k, x), root_p, x, exhaustive_limit)
        lhs = math.sqrt(max(q[x], 0.0))
        if best is None or lhs - rhs > best[0] - best[1]:
            best = (lhs, rhs, x)
    return _verdict("k-sep", best[0], best[1], None, tol, level=k, detail=(best[2],))


def k_sep_first(rho: np.ndarray, k: int, family: LooFamily | None = None, tol: float = TOL) -> CriterionVerdict:
    """Weaker k-separability condition ``Q_x <= 4**(1-k)`` for every ``x``."""
    q, _ = _quantities(rho, family)
    return _verdict("k-sep-first", q.max(), 4.0 ** (1 - k), None, tol, level=k)


def biseparability_matrix(rho: np.ndarray, tol: float = TOL) -> CriterionVerdict:
    """Matrix form for k = 2: ``|rho_{l,lbar}| <= sum over other pairs of sqrt(rho_nn rho_nbar,nbar)``."""
    rho = qa.to_density(rho)
    n = qa.num_qubits(rho.shape[0])
    pairs = anti_diagonal_pairs(n)
    roots = [math.sqrt(max(rho[l, l].real * rho[lb, lb].real, 0.0)) for l, lb in pairs]
    best = None
    for x, (l, lb) in enumerate(pairs):
        lhs, rhs = abs(rho[l, lb]), sum(roots) - roots[x]
        if best is None or lhs - rhs > best[0] - best[1]:
            best = (lhs, rhs, x)
    return _verdict("bisep-matrix", best[0], best[1], None, tol, level=2, detail=(best[2],))


def full_sep_matrix(rho: np.ndarray, tol: float = TOL) -> CriterionVerdict:
    """Matrix form for k = N: ``max |rho_{l,lbar}|^2 <= min rho_jj rho_jbar,jbar <= 4**(-N)``."""
    rho = qa.to_density(rho)
    n = qa.num_qubits(rho.shape[0])
    q, p = matrix_quantities(rho)
    return _verdict("fullsep-matrix", q.max() / 4, p.min() / 4, 4.0**-n, tol, level=n)


def matrix_element_criteria(rho: np.ndarray, k: int | None = None, split: Split | str | None = None,
                            tol: float = TOL) -> CriterionVerdict:
    """Matrix-element version of the level-``k`` or split condition (Pauli triples)."""
    if split is not None:
        verdicts = split_criterion(rho, split, None, tol)
        return max(verdicts, key=lambda v: v.margin)
    n = qa.num_qubits(qa.to_density(rho).shape[0])
    k = 2 if k is None else k
    if k == 2:
        return biseparability_matrix(rho, tol)
    if k == n:
        return full_sep_matrix(rho, tol)
    return k_sep_criterion(rho, k, None, tol)


# ---------------------------------------------------------- comparison tests


def laskowski_zukowski(rho: np.ndarray, k: int, tol: float = TOL) -> CriterionVerdict:
    """``max |rho_{j,jbar}| <= 2**-k`` for k-separable states."""
    rho = qa.to_density(rho)
    anti = np.abs(np.fliplr(rho).diagonal())
    return _verdict("laskowski-zukowski", anti.max(), 0.5**k, None, tol, level=k)


def fidelity_criterion(rho: np.ndarray, tol: float = TOL) -> CriterionVerdict:
    """GHZ fidelity at most 1/2 for biseparable states."""
    return _verdict("fidelity", sl.ghz_fidelity(rho), 0.5, None, tol, level=2)


def dur_cirac_label(split: Split | str, n: int) -> int:
    """GHZ-basis label ``j`` of a bipartite split: bit ``i`` is 0 when qubit ``i`` sits with the last qubit."""
    if isinstance(split, str):
        split = parse_split(split, n)
    if len(split) != 2:
        raise InvariantError("a bipartite split is required")
    last_block = next(b for b in split if n - 1 in b)
    j = 0
    for q in range(n - 1):
        j = (j << 1) | (0 if q in last_block else 1)
    return j


def dur_cirac_lambdas(rho: np.ndarray) -> tuple[float, float, np.ndarray]:
    """``(lambda0+, lambda0-, lambda_j for j >= 1)`` of the GHZ-diagonal depolarization."""
    rho = qa.to_density(rho)
    n = qa.num_qubits(rho.shape[0])
    lp = qa.expectation(sl.projector(sl.ghz_basis_state(n, 0, +1)), rho)
    lm = qa.expectation(sl.projector(sl.ghz_basis_state(n, 0, -1)), rho)
    lam = np.array([
        0.5 * (qa.expectation(sl.projector(sl.ghz_basis_state(n, j, +1)), rho)
               + qa.expectation(sl.projector(sl.ghz_basis_state(n, j, -1)), rho))
        for j in range(1, 2 ** (n - 1))
    ])
    return lp, lm, lam


def dur_cirac(rho: np.ndarray, split: Split | str, tol: float = TOL) -> CriterionVerdict:
    """Split condition ``|lambda0+ - lambda0-| <= 2 lambda_j``."""
    rho = qa.to_density(rho)
    n = qa.num_qubits(rho.shape[0])
    j = dur_cirac_label(split, n)
    lp, lm, lam = dur_cirac_lambdas(rho)
    name = split if isinstance(split, str) else split_name(split)
    return _verdict("dur-cirac", abs(lp - lm), 2 * lam[j - 1], None, tol, level=2, split=name)


def ghz_diagonal_state(n: int, lam_plus: float, lam_minus: float, lambdas: Sequence[float]) -> np.ndarray:
    """Member of the family left invariant by GHZ-basis depolarization."""
    rho = lam_plus * sl.projector(sl.ghz_basis_state(n, 0, 1)) + lam_minus * sl.projector(sl.ghz_basis_state(n, 0, -1))
    for j, lam in enumerate(lambdas, start=1):
        rho = rho + lam * (sl.projector(sl.ghz_basis_state(n, j, 1)) + sl.projector(sl.ghz_basis_state(n, j, -1)))
    return rho


def collapsed_ghz_state(n: int, lam_plus: float, lam_minus: float, lambdas: Sequence[float]) -> np.ndarray:
    """Like :func:`ghz_diagonal_state` but each ``j >= 1`` pair is replaced by ``2 lambda_j |j0><j0|``.

    Every state of this family with ``lam_plus != lam_minus`` violates the
    biseparability matrix condition.
    """
    rho = lam_plus * sl.projector(sl.ghz_basis_state(n, 0, 1)) + lam_minus * sl.projector(sl.ghz_basis_state(n, 0, -1))
    for j, lam in enumerate(lambdas, start=1):
        v = sl.ghz_basis_state(n, j, 1) + sl.ghz_basis_state(n, j, -1)
        rho = rho + lam * np.outer(v, v.conj())
    return rho


# ------------------------------------------------------------ Mermin-type


def mermin_operators(n: int, triples: Sequence[qa.OrthonormalTriple] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Mermin operator and its primed partner with ``X``/``Y`` of each triple as the two settings."""
    from . import bellops

    triples = tuple(triples) if triples is not None else (qa.OrthonormalTriple.pauli(),) * n
    obs = [[t.observables()[0], t.observables()[1]] for t in triples]
    m, mp = bellops.mermin_pair(n)
    return bellops.to_operator(m, obs), bellops.to_operator(mp, obs)


def mermin_ksep(rho: np.ndarray, k: int, triples: Sequence[qa.OrthonormalTriple] | None = None,
                tol: float = TOL) -> tuple[CriterionVerdict, CriterionVerdict]:
    """Quadratic ``<M>^2 + <M'>^2 <= 2**(N+3) 4**-k`` and linear ``|<M>| <= 2**((N+3)/2) 2**-k``."""
    rho = qa.to_density(rho)
    n = qa.num_qubits(rho.shape[0])
    m, mp = mermin_operators(n, triples)
    return mermin_ksep_from_values(qa.expectation(m, rho), qa.expectation(mp, rho), n, k, tol)


def mermin_ksep_from_values(em: float, emp: float, n: int, k: int,
                            tol: float = TOL) -> tuple[CriterionVerdict, CriterionVerdict]:
    """Same test as :func:`mermin_ksep` from measured ``<M>`` and ``<M'>``."""
    quad = _verdict("mermin-quadratic", em**2 + emp**2, 2.0 ** (n + 3) * 0.25**k, None, tol, level=k)
    lin = _verdict("mermin-linear", abs(em), 2.0 ** ((n + 3) / 2) * 0.5**k, None, tol, level=k)
    return quad, lin


def mermin_ksep_bounds(n: int, k: int) -> tuple[float, float]:
    return 2.0 ** (n + 3) * 0.25**k, 2.0 ** ((n + 3) / 2) * 0.5**k


# -------------------------------------------------------- measurement settings


def settings_construction(n: int, j: int = 0) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Local settings whose alternating sums give ``N X_0`` and ``N Y_0`` moved to element ``j``.

    ``M_l = (cos(l pi/N) sigma_x + sin(l pi/N) sigma_y)^{(x)N}`` and the
    tilde family shifted by ``pi/(2N)``, for ``l = 1..N``, each conjugated by
    ``U_j``: sigma_x on every qubit whose bit in the 0-based index ``j`` is 1.
    """
    u = flip_unitary(n, j)
    real, imag = [], []
    for l in range(1, n + 1):
        a = l * math.pi / n
        b = (l * math.pi + math.pi / 2) / n
        real.append(u @ qa.kron_power(qa.plane_observable(a, "xy"), n) @ u)
        imag.append(u @ qa.kron_power(qa.plane_observable(b, "xy"), n) @ u)
    return real, imag


def flip_unitary(n: int, j: int) -> np.ndarray:
    """``U_j``: sigma_x on the qubits where the binary string of ``j`` has a 1."""
    bits = [(j >> (n - 1 - q)) & 1 for q in range(n)]
    return qa.kron(*[qa.SIGMA_X if b else qa.IDENTITY2 for b in bits])


def alternating_sum(ops: Sequence[np.ndarray]) -> np.ndarray:
    return sum((-1) ** l * op for l, op in enumerate(ops, start=1))


# ------------------------------------------------------------ noise thresholds


def _rational(p: float, max_den: int = 2000, tol: float = 1e-9) -> Fraction | None:
    frac = Fraction(p).limit_denominator(max_den)
    return frac if abs(float(frac) - p) <= tol else None


@dataclass(frozen=True)
class Threshold:
    """White-noise robustness: the state is detected for every ``p < p0``."""

    p0: float
    exact: Fraction | None
    kind: str
    split: str | None = None

    def as_dict(self) -> dict:
        return {"p0": self.p0, "exact": str(self.exact) if self.exact is not None else None,
                "kind": self.kind, "split": self.split}


def _quadratic_threshold(a2: float, b: float, c: float, d: int) -> float:
    """Largest ``p`` with ``(1-p)^2 a2 > ((1-p) b + p/d)((1-p) c + p/d)``, or 0 when never violated.

    In ``u = 1 - p`` the difference is a quadratic negative at ``u = 0``;
    the violation set is ``u`` in ``(u*, 1]`` for the smallest root ``u*``.
    """
    inv = 1.0 / d
    if a2 - b * c <= 1e-15:
        return 0.0
    qa_, qb, qc = a2 - (b - inv) * (c - inv), -inv * ((b - inv) + (c - inv)), -inv * inv
    if abs(qa_) < 1e-15:
        u = -qc / qb
    else:
        disc = max(qb * qb - 4 * qa_ * qc, 0.0)
        roots = [(-qb - math.sqrt(disc)) / (2 * qa_), (-qb + math.sqrt(disc)) / (2 * qa_)]
        u = min(r for r in roots if 0 < r <= 1 + 1e-12)
    return float(min(max(1 - u, 0.0), 1.0))


def _pair_thresholds(rho: np.ndarray, pairs_to_check: Iterable[tuple[int, int]]) -> float:
    n = qa.num_qubits(rho.shape[0])
    d = 2**n
    pairs = anti_diagonal_pairs(n)
    best = 0.0
    for x, y in pairs_to_check:
        l, lb = pairs[x]
        m, mb = pairs[y]
        best = max(best, _quadratic_threshold(abs(rho[l, lb]) ** 2, rho[m, m].real, rho[mb, mb].real, d))
    return best


def bisect_threshold(violated: Callable[[float], bool], tol: float = 1e-12) -> float:
    """Supremum of ``p`` in [0, 1] at which ``violated(p)`` holds, assuming a single crossing."""
    if not violated(0.0):
        return 0.0
    if violated(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if violated(mid) else (lo, mid)
    return 0.5 * (lo + hi)


def noise_robustness(rho: np.ndarray | Callable[[float], np.ndarray], kind: str = "full",
                     split: Split | str | None = None) -> Threshold:
    """White-noise threshold ``p0`` of a detection criterion.

    Parameters
    ----------
    rho : ndarray or callable
        A state to be mixed as ``(1-p) rho + p 1/2^N``, or a family ``p -> rho(p)``
        (then bisection on the criterion is used for every kind).
    kind : {"full", "some", "split"}
        ``"full"``: biseparability matrix condition (detects full entanglement).
        ``"some"``: full-separability matrix condition (detects any entanglement).
        ``"split"``: the condition for one bipartite ``split``; with ``split=None``
        the smallest threshold over all bipartite splits (entangled under every split).
    """
    if callable(rho):
        family = rho
        if kind == "full":
            check = lambda p: biseparability_matrix(family(p)).violated  # noqa: E731
        elif kind == "some":
            check = lambda p: full_sep_matrix(family(p)).violated  # noqa: E731
        elif kind == "split" and split is not None:
            check = lambda p: split_violated(family(p), split)  # noqa: E731
        else:
            raise InvariantError("family thresholds need kind full, some, or split with a split")
        p0 = bisect_threshold(check)
        return Threshold(p0, _rational(p0, tol=1e-8), kind, None if split is None else str(split))

    rho = qa.to_density(rho)
    n = qa.num_qubits(rho.shape[0])
    half = 2 ** (n - 1)
    if kind == "full":
        p0 = bisect_threshold(lambda p: biseparability_matrix(sl.white_noise(rho, p)).violated)
        return Threshold(p0, _rational(p0, tol=1e-8), kind)
    if kind == "some":
        p0 = _pair_thresholds(rho, [(x, y) for x in range(half) for y in range(half) if x != y])
        return Threshold(p0, _rational(p0), kind)
    if kind == "split":
        if split is None:
            results = [noise_robustness(rho, "split", s) for s in all_splits(n, 2)]
            worst = min(results, key=lambda t: t.p0)
            return Threshold(worst.p0, worst.exact, kind, "all")
        if isinstance(split, str):
            split = parse_split(split, n)
        checks = []
        for z in solution_sets(split, n):
            checks += [(x, y) for x in z for y in z if x != y]
        p0 = _pair_thresholds(rho, checks)
        return Threshold(p0, _rational(p0), kind, split_name(split))
    raise InvariantError(f"unknown robustness kind {kind!r}")


def ghz_white_noise_thresholds(n: int) -> dict[str, Fraction]:
    """Closed forms for GHZ in white noise, plus the stabilizer-witness comparison value."""
    return {
        "some": Fraction(1) / (1 + Fraction(2) ** (1 - n)),
        "full": Fraction(1) / (2 * (1 - Fraction(2) ** -n)),
        "stabilizer_full": Fraction(1) / (3 - Fraction(2) ** (2 - n)),
    }


def depolarize_some_threshold(n: int, alpha: int | None = None) -> float:
    """Root of ``(1-p)^N = (1-p/2)^a (p/2)^(N-a) + (1-p/2)^(N-a) (p/2)^a`` on (0, 1).

    ``a = floor(N/2)`` gives the some-entanglement threshold of the
    depolarized GHZ state; ``a = 1`` the threshold for every bipartite split.
    """
    a = n // 2 if alpha is None else alpha

    def g(p: float) -> float:
        return (1 - p) ** n - ((1 - p / 2) ** a * (p / 2) ** (n - a) + (1 - p / 2) ** (n - a) * (p / 2) ** a)

    return float(brentq(g, 1e-12, 1 - 1e-12))


# -------------------------------------------------------------- hierarchy


def classify(rho: np.ndarray, family: LooFamily | None = None, tol: float = TOL) -> dict:
    """Verdicts per level and per split; ``"excluded"`` means the level's necessary condition fails.

    Non-violation never certifies membership of a class.
    """
    rho = qa.to_density(rho)
    n = qa.num_qubits(rho.shape[0])
    report: dict = {"levels": {}, "splits": {}}
    for k in range(2, n + 1):
        v = k_sep_criterion(rho, k, family, tol)
        report["levels"][k] = "excluded" if v.violated else "consistent"
        for s in all_splits(n, k):
            excluded = any(x.violated for x in split_criterion(rho, s, family, tol))
            report["splits"][split_name(s)] = "excluded" if excluded else "consistent"
    return report
