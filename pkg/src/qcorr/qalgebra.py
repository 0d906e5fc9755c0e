"""Dense complex-matrix algebra for qubit systems.

Operators and density matrices are plain ``numpy.ndarray`` objects of
dtype ``complex128``. Qubit ``0`` is the most significant tensor factor,
so the computational basis index of ``|b0 b1 ... b_{n-1}>`` is the binary
number ``b0 b1 ... b_{n-1}``. The basis is the eigenbasis of sigma_z with
``|0>`` the +1 eigenvector.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import InvariantError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
UNIT_TOL = 1e-12

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def kron(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices or vectors, left to right."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    return reduce(np.kron, (np.asarray(f, dtype=complex) for f in factors))


def kron_power(op: np.ndarray, n: int) -> np.ndarray:
    """``op`` tensored with itself ``n`` times."""
    return kron(*([op] * n))


def num_qubits(dim: int) -> int:
    """Return ``n`` with ``2**n == dim`` or raise :class:`InvariantError`."""
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 0 or 2**n != dim:
        raise InvariantError(f"dimension {dim} is not a power of two")
    return n


def unit_vector(v: Iterable[float], tol: float = UNIT_TOL) -> np.ndarray:
    """Validate that ``v`` is a real unit 3-vector and return it as an array."""
    arr = np.asarray(list(v), dtype=float)
    if arr.shape != (3,):
        raise InvariantError(f"spin direction must have 3 components, got shape {arr.shape}")
    if abs(np.linalg.norm(arr) - 1.0) > tol:
        raise InvariantError(f"spin direction {arr} is not normalized (norm {np.linalg.norm(arr)})")
    return arr


def spin_op(direction: Iterable[float]) -> np.ndarray:
    """Dichotomic spin observable ``a . sigma`` for a unit vector ``a``.

    Parameters
    ----------
    direction : iterable of 3 floats
        Unit vector. Non-unit input raises :class:`InvariantError`.

    Returns
    -------
    numpy.ndarray
        Traceless 2x2 Hermitian matrix with eigenvalues +1 and -1.
    """
    a = unit_vector(direction)
    return a[0] * SIGMA_X + a[1] * SIGMA_Y + a[2] * SIGMA_Z


def plane_observable(angle: float, plane: str = "xz") -> np.ndarray:
    """Unit spin observable at ``angle`` inside a coordinate plane.

    ``"xz"`` gives ``cos(angle) sigma_z + sin(angle) sigma_x`` and ``"xy"``
    gives ``cos(angle) sigma_x + sin(angle) sigma_y``.
    """
    c, s = np.cos(angle), np.sin(angle)
    if plane == "xz":
        return c * SIGMA_Z + s * SIGMA_X
    if plane == "xy":
        return c * SIGMA_X + s * SIGMA_Y
    raise ValueError(f"unknown plane {plane!r}")


@dataclass(frozen=True)
class OrthonormalTriple:
    """Three mutually orthogonal unit directions for one qubit.

    ``orientation`` is ``"same"`` when ``x cross y == z`` (right handed)
    and ``"opposite"`` when ``x cross y == -z``.
    """

    x: tuple[float, float, float]
    y: tuple[float, float, float]
    z: tuple[float, float, float]
    orientation: str = "same"

    def __post_init__(self) -> None:
        vecs = [unit_vector(v) for v in (self.x, self.y, self.z)]
        for i in range(3):
            for j in range(i + 1, 3):
                if abs(vecs[i] @ vecs[j]) > UNIT_TOL:
                    raise InvariantError("triple directions are not orthogonal")
        cross = np.cross(vecs[0], vecs[1])
        want = 1.0 if self.orientation == "same" else -1.0
        if self.orientation not in ("same", "opposite"):
            raise InvariantError(f"orientation must be 'same' or 'opposite', got {self.orientation!r}")
        if np.linalg.norm(cross - want * vecs[2]) > 1e-10:
            raise InvariantError(f"triple does not have orientation {self.orientation!r}")

    @classmethod
    def pauli(cls, orientation: str = "same") -> "OrthonormalTriple":
        """The coordinate axes, with ``z`` reversed for the opposite orientation."""
        z = (0.0, 0.0, 1.0) if orientation == "same" else (0.0, 0.0, -1.0)
        return cls((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), z, orientation)

    @classmethod
    def from_rotation(cls, rotation: np.ndarray) -> "OrthonormalTriple":
        """Columns of an orthogonal 3x3 matrix; orientation follows the determinant."""
        r = np.asarray(rotation, dtype=float)
        orient = "same" if np.linalg.det(r) > 0 else "opposite"
        return cls(tuple(r[:, 0]), tuple(r[:, 1]), tuple(r[:, 2]), orient)

    def observables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Spin operators along ``x``, ``y`` and ``z``."""
        return spin_op(self.x), spin_op(self.y), spin_op(self.z)


def random_triple(rng: np.random.Generator, orientation: str = "same") -> OrthonormalTriple:
    """Haar-random orthonormal triple with the requested orientation."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if (np.linalg.det(q) > 0) != (orientation == "same"):
        q[:, 2] *= -1
    return OrthonormalTriple.from_rotation(q)


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    """Hermiticity check relative to the largest entry magnitude."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= tol * scale)


def _hermitian_spectrum(h: np.ndarray) -> np.ndarray:
    if not is_hermitian(h):
        raise InvariantError("matrix is not Hermitian within tolerance")
    h = np.asarray(h, dtype=complex)
    return np.linalg.eigvalsh((h + h.conj().T) / 2)


def max_eigenvalue(h: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian matrix."""
    return float(_hermitian_spectrum(h)[-1])


def min_eigenvalue(h: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(_hermitian_spectrum(h)[0])


def to_density(state: np.ndarray) -> np.ndarray:
    """Return a density matrix, promoting kets to projectors."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def check_density(rho: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Validate a density matrix (Hermitian, unit trace, PSD) and return it."""
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho):
        raise InvariantError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise InvariantError(f"density matrix trace is {np.trace(rho).real}, not 1")
    if min_eigenvalue(rho) < -PSD_TOL:
        raise InvariantError("density matrix has a negative eigenvalue")
    return rho


def expectation(op: np.ndarray, state: np.ndarray) -> float:
    """Real part of ``<op>`` for a ket or a density matrix."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return float(np.real(state.conj() @ op @ state))
    return float(np.real(np.trace(op @ state)))


def embed(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Single-qubit ``op`` acting on qubit ``site`` of ``n``."""
    factors = [IDENTITY2] * n
    factors[site] = op
    return kron(*factors)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def _dims_for(rho: np.ndarray, dims: Sequence[int] | None) -> list[int]:
    if dims is None:
        return [2] * num_qubits(rho.shape[0])
    dims = list(dims)
    if int(np.prod(dims)) != rho.shape[0]:
        raise InvariantError(f"subsystem dimensions {dims} do not match matrix size {rho.shape[0]}")
    return dims


def partial_trace(rho: np.ndarray, keep: Iterable[int], dims: Sequence[int] | None = None) -> np.ndarray:
    """Reduced state on the subsystems listed in ``keep``.

    Parameters
    ----------
    rho : ndarray
        Density matrix or ket on the full system.
    keep : iterable of int
        Subsystems to retain, 0-based. Must be non-empty.
    dims : sequence of int, optional
        Local dimensions; qubits are assumed when omitted.
    """
    rho = to_density(rho)
    d = _dims_for(rho, dims)
    keep = sorted(set(keep))
    if not keep:
        raise InvariantError("partial_trace needs a non-empty set of kept subsystems")
    if keep[0] < 0 or keep[-1] >= len(d):
        raise InvariantError(f"kept subsystems {keep} out of range")
    n = len(d)
    t = rho.reshape(d + d)
    traced = [i for i in range(n) if i not in keep]
    # contract traced axes pairwise, highest first so indices stay valid
    for ax in sorted(traced, reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + t.ndim // 2)
    dk = int(np.prod([d[i] for i in keep]))
    return t.reshape(dk, dk)


def partial_transpose(rho: np.ndarray, transpose: Iterable[int], dims: Sequence[int] | None = None) -> np.ndarray:
    """Transpose the indices of the subsystems in ``transpose``.

    For a bipartition pass either side; the spectrum is the same.
    """
    rho = to_density(rho)
    d = _dims_for(rho, dims)
    n = len(d)
    sel = set(transpose)
    t = rho.reshape(d + d)
    perm = list(range(2 * n))
    for i in sel:
        perm[i], perm[n + i] = n + i, i
    return t.transpose(perm).reshape(rho.shape)
