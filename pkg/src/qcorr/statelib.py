"""Named quantum states, GHZ noise channels and state-level tests."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import qalgebra as qa
from .errors import InvariantError

_SQRT2 = np.sqrt(2.0)

_BELL_ALIASES = {
    "psi+": "psi+", "ψ+": "psi+", "ψ⁺": "psi+",
    "psi-": "psi-", "ψ-": "psi-", "ψ⁻": "psi-", "singlet": "psi-",
    "phi+": "phi+", "φ+": "phi+", "φ⁺": "phi+",
    "phi-": "phi-", "φ-": "phi-", "φ⁻": "phi-",
}


def basis_ket(bits: str | Sequence[int], dim: int = 2) -> np.ndarray:
    """Computational basis ket, e.g. ``basis_ket("0101")``."""
    digits = [int(b) for b in bits]
    index = 0
    for b in digits:
        if not 0 <= b < dim:
            raise InvariantError(f"digit {b} outside local dimension {dim}")
        index = index * dim + b
    v = np.zeros(dim ** len(digits), dtype=complex)
    v[index] = 1.0
    return v


def projector(ket: np.ndarray) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def bell_state(which: str) -> np.ndarray:
    """One of the four Bell kets: ``"psi+"``, ``"psi-"``, ``"phi+"`` or ``"phi-"``."""
    try:
        name = _BELL_ALIASES[which]
    except KeyError:
        raise InvariantError(f"unknown Bell state {which!r}") from None
    first, second = ("01", "10") if name.startswith("psi") else ("00", "11")
    sign = 1.0 if name.endswith("+") else -1.0
    return (basis_ket(first) + sign * basis_ket(second)) / _SQRT2


def ghz(n: int, alpha: float = 0.0) -> np.ndarray:
    """``(|0...0> + e^{i alpha}|1...1>)/sqrt(2)`` on ``n`` qubits."""
    v = np.zeros(2**n, dtype=complex)
    v[0] = 1 / _SQRT2
    v[-1] = np.exp(1j * alpha) / _SQRT2
    return v


def generalized_ghz(n: int, theta: float) -> np.ndarray:
    """``cos(theta)|0...0> + sin(theta)|1...1>``."""
    v = np.zeros(2**n, dtype=complex)
    v[0], v[-1] = np.cos(theta), np.sin(theta)
    return v


def w_state() -> np.ndarray:
    """Three-qubit W state, an equal superposition of single excitations."""
    return (basis_ket("001") + basis_ket("010") + basis_ket("100")) / np.sqrt(3)


def dicke(excitations: int, n: int) -> np.ndarray:
    """Symmetric Dicke ket with ``excitations`` ones among ``n`` qubits."""
    if not 0 <= excitations <= n:
        raise InvariantError("excitation number out of range")
    v = np.zeros(2**n, dtype=complex)
    for ones in combinations(range(n), excitations):
        v[sum(1 << (n - 1 - q) for q in ones)] = 1.0
    return v / np.sqrt(v.real.sum())


def rotation_x(angle: float) -> np.ndarray:
    """Single-qubit rotation ``exp(-i angle sigma_x / 2)``."""
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def rotate_each_x(state: np.ndarray, angle: float = np.pi / 2) -> np.ndarray:
    """Apply the same x rotation to every qubit of a ket or density matrix."""
    state = np.asarray(state, dtype=complex)
    n = qa.num_qubits(state.shape[0])
    u = qa.kron_power(rotation_x(angle), n)
    if state.ndim == 1:
        return u @ state
    return u @ state @ u.conj().T


def white_noise(rho: np.ndarray, p: float) -> np.ndarray:
    """``(1-p) rho + p 1/d``."""
    rho = qa.to_density(rho)
    d = rho.shape[0]
    return (1 - p) * rho + p * np.eye(d) / d


def _check_prob(p: float, name: str = "p") -> float:
    if not 0.0 <= p <= 1.0:
        raise InvariantError(f"{name}={p} outside [0, 1]")
    return float(p)


GHZ_CHANNELS = ("white", "colored", "depolarize", "dephase", "dissipate")


def noisy_ghz(n: int, channel: str, p: float) -> np.ndarray:
    """GHZ state after one of five noise or decoherence processes.

    Parameters
    ----------
    n : int
        Number of qubits.
    channel : str
        ``"white"``: admix the maximally mixed state.
        ``"colored"``: admix the classical mixture of ``|0..0>`` and ``|1..1>``.
        ``"depolarize"``: independent single-qubit depolarization.
        ``"dephase"``: independent phase damping, which only shrinks coherences.
        ``"dissipate"``: independent amplitude damping towards ``|0>``.
    p : float
        Noise strength in [0, 1].
    """
    p = _check_prob(p)
    d = 2**n
    corners = np.zeros((d, d), dtype=complex)
    corners[0, -1] = corners[-1, 0] = 1.0
    ends = np.zeros((d, d), dtype=complex)
    ends[0, 0] = ends[-1, -1] = 1.0
    if channel == "white":
        return white_noise(projector(ghz(n)), p)
    if channel == "colored":
        return (1 - p) * projector(ghz(n)) + p / 2 * ends
    if channel == "depolarize":
        up = np.diag([1 - p / 2, p / 2]).astype(complex)
        down = np.diag([p / 2, 1 - p / 2]).astype(complex)
        return 0.5 * (qa.kron_power(up, n) + qa.kron_power(down, n) + (1 - p) ** n * corners)
    if channel == "dephase":
        return 0.5 * (ends + (1 - p) ** n * corners)
    if channel == "dissipate":
        decayed = np.diag([p, 1 - p]).astype(complex)
        rho = 0.5 * ((1 - p) ** (n / 2) * corners + qa.kron_power(decayed, n))
        rho[0, 0] += 0.5
        return rho
    raise InvariantError(f"unknown channel {channel!r}; expected one of {GHZ_CHANNELS}")


def werner(p: float) -> np.ndarray:
    """Singlet fraction ``p`` mixed with white noise: ``(1-p) 1/4 + p |psi-><psi-|``."""
    p = _check_prob(p)
    return (1 - p) * np.eye(4) / 4 + p * projector(bell_state("psi-"))


def noisy_singlet_colored(p: float) -> np.ndarray:
    """Singlet fraction ``p`` mixed with ``(2|00><00| + |01><01|)/3``."""
    p = _check_prob(p)
    colored = np.diag([2, 1, 0, 0]).astype(complex) / 3
    return p * projector(bell_state("psi-")) + (1 - p) * colored


def ghz_basis_state(n: int, j: int, sign: int = +1) -> np.ndarray:
    """``(|j 0> + sign |j' 1>)/sqrt(2)`` with ``j`` an ``(n-1)``-bit string and ``j'`` its complement."""
    if not 0 <= j < 2 ** (n - 1):
        raise InvariantError("GHZ-basis label out of range")
    v = np.zeros(2**n, dtype=complex)
    jc = (2 ** (n - 1) - 1) ^ j
    v[2 * j] = 1 / _SQRT2
    v[2 * jc + 1] = sign / _SQRT2
    return v


def dur_bound(n: int, alpha: float = 0.0) -> np.ndarray:
    """PPT bound-entangled family built from a GHZ state and single-excitation projectors.

    ``rho = (|GHZ_alpha><GHZ_alpha| + 1/2 sum_l (P_l + Pbar_l)) / (n + 1)``
    where ``P_l`` projects on the string with a single 1 at qubit ``l``
    and ``Pbar_l`` on its complement.
    """
    d = 2**n
    rho = projector(ghz(n, alpha))
    for q in range(n):
        idx = 1 << (n - 1 - q)
        rho[idx, idx] += 0.5
        rho[d - 1 - idx, d - 1 - idx] += 0.5
    return rho / (n + 1)


def dur_three_qubit() -> np.ndarray:
    """Three-qubit state that is entangled yet separable under every bipartite split but one."""
    rho = projector(ghz(3)) / 3
    for bits in ("001", "010", "101", "110"):
        rho = rho + projector(basis_ket(bits)) / 6
    return rho


def smolin() -> np.ndarray:
    """Four-qubit Smolin state: equal mixture of identical Bell pairs on ab and cd."""
    terms = [projector(qa.kron(bell_state(w), bell_state(w))) for w in ("phi+", "phi-", "psi+", "psi-")]
    return sum(terms) / 4


def four_qubit_singlet() -> np.ndarray:
    """Four-qubit singlet ket, a rotation-invariant state."""
    pair = basis_ket("01") + basis_ket("10")
    v = basis_ket("0011") + basis_ket("1100") - 0.5 * qa.kron(pair, pair)
    return v / np.sqrt(3)


def bisep_counterexample() -> np.ndarray:
    """``(|0><0| (x) P_psi- + |1><1| (x) P_psi+)/2``, separable only under a-(bc)."""
    zero, one = projector(basis_ket("0")), projector(basis_ket("1"))
    return 0.5 * (qa.kron(zero, projector(bell_state("psi-"))) + qa.kron(one, projector(bell_state("psi+"))))


def psi_corr() -> np.ndarray:
    """``(|0101> - |1010>)/sqrt(2)``, the state used in the four-qubit correlation test."""
    return (basis_ket("0101") - basis_ket("1010")) / _SQRT2


def nine_state_basis() -> list[np.ndarray]:
    """Nine product kets of two qutrits forming an orthonormal basis."""
    def k(i: int) -> np.ndarray:
        return basis_ket([i], dim=3)

    def mix(i: int, j: int, s: int) -> np.ndarray:
        return (k(i) + s * k(j)) / _SQRT2

    out = [qa.kron(k(1), k(1))]
    for s in (1, -1):
        out.append(qa.kron(k(0), mix(0, 1, s)))
    for s in (1, -1):
        out.append(qa.kron(k(2), mix(1, 2, s)))
    for s in (1, -1):
        out.append(qa.kron(mix(1, 2, s), k(0)))
    for s in (1, -1):
        out.append(qa.kron(mix(0, 1, s), k(2)))
    return out


def ghz_fidelity(rho: np.ndarray) -> float:
    """Maximal overlap with ``|GHZ_alpha>`` over the phase: ``(rho_11 + rho_dd)/2 + |rho_1d|``."""
    rho = qa.to_density(rho)
    return float(0.5 * (rho[0, 0].real + rho[-1, -1].real) + abs(rho[0, -1]))


def is_ppt(rho: np.ndarray, transpose: Iterable[int], dims: Sequence[int] | None = None,
           tol: float = qa.PSD_TOL) -> bool:
    """True when the partial transpose on ``transpose`` has no eigenvalue below ``-tol``."""
    return qa.min_eigenvalue(qa.partial_transpose(rho, transpose, dims)) >= -tol


# random states


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unitarily invariant random ket from a normalized complex Gaussian vector."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density_matrix(dim: int, rng: np.random.Generator, env_dim: int | None = None) -> np.ndarray:
    """Random mixed state: trace out an environment of size ``env_dim`` (default ``dim``)."""
    env = dim if env_dim is None else env_dim
    psi = random_pure_state(dim * env, rng)
    return qa.partial_trace(psi, [0], dims=[dim, env])


def random_product_state(n: int, rng: np.random.Generator, mixed: bool = True) -> np.ndarray:
    """Tensor product of ``n`` random single-qubit states."""
    factors = [random_density_matrix(2, rng) if mixed else projector(random_pure_state(2, rng)) for _ in range(n)]
    return qa.kron(*factors)


def random_separable_state(n: int, rng: np.random.Generator, terms: int = 4) -> np.ndarray:
    """Random convex mixture of random product states."""
    w = rng.dirichlet(np.ones(terms))
    return sum(wi * random_product_state(n, rng) for wi in w)


# JSON


def state_to_json(rho: np.ndarray) -> dict:
    """Serialize as ``{"parties": N, "matrix": [[[re, im], ...], ...]}``."""
    rho = qa.to_density(rho)
    return {
        "parties": qa.num_qubits(rho.shape[0]),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho],
    }


def state_from_json(obj: dict) -> np.ndarray:
    """Inverse of :func:`state_to_json`, with invariant checks."""
    try:
        raw = np.asarray(obj["matrix"], dtype=float)
        parties = int(obj["parties"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvariantError(f"malformed state record: {exc}") from None
    if raw.ndim != 3 or raw.shape[2] != 2 or raw.shape[0] != raw.shape[1]:
        raise InvariantError("matrix must be a square array of [re, im] pairs")
    rho = raw[..., 0] + 1j * raw[..., 1]
    if rho.shape[0] != 2**parties:
        raise InvariantError(f"matrix size {rho.shape[0]} does not match {parties} qubits")
    return qa.check_density(rho)


NAMED_STATES = {
    "ghz3": lambda: projector(ghz(3)),
    "ghz4": lambda: projector(ghz(4)),
    "w": lambda: projector(w_state()),
    "singlet": lambda: projector(bell_state("psi-")),
    "phi4": lambda: projector(four_qubit_singlet()),
    "dicke24-rotated": lambda: projector(rotate_each_x(dicke(2, 4))),
    "dur4": lambda: dur_bound(4),
    "dur3": dur_three_qubit,
    "smolin": smolin,
    "bisep-a": bisep_counterexample,
}
