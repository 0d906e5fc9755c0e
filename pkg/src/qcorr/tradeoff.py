"""CHSH value versus the angle between each party's two observables.

Party A measures ``a = (1, 0, 0)`` and ``a' = (cos theta_A, sin theta_A, 0)``
and likewise for B, so ``theta`` controls how far the local observables
are from commuting. Closed forms are given for entangled states
(:func:`c_max`) and separable states (:func:`d_max`); the ``verify_*``
functions recompute both numerically from scratch.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize

from . import qalgebra as qa
from .errors import InvariantError


def c_max(theta_a: float, theta_b: float) -> float:
    """Largest quantum CHSH value at the given local angles."""
    return math.sqrt(4 + 4 * abs(math.sin(theta_a) * math.sin(theta_b)))


def d_max(theta_a: float, theta_b: float) -> float:
    """Largest CHSH value attainable with separable states."""
    s2 = (math.sin(theta_a) * math.sin(theta_b)) ** 2
    return math.sqrt(2 * (1 + math.sqrt(max(0.0, 1 - s2))))


def d_equal(theta: float) -> float:
    """:func:`d_max` on the diagonal ``theta_a == theta_b``."""
    return abs(math.cos(theta)) + math.sqrt(1 + math.sin(theta) ** 2)


def roy_bound(theta: float) -> float:
    """Earlier separable-state bound expressed through ``c = cos(theta)``."""
    c = abs(math.cos(theta))
    if c <= 3 - 2 * math.sqrt(2):
        return math.sqrt(2) * (c + 1)
    return 1 + 2 * math.sqrt(c) - c


def violation_factors(theta: float) -> dict[str, float]:
    """Ratio of the entangled maximum to the separable maximum (``X``) and to 2 (``X_chsh``)."""
    c = c_max(theta, theta)
    return {"X": c / d_max(theta, theta), "X_chsh": c / 2}


def observables(theta_a: float, theta_b: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """``A, A', B, B'`` in the x-y plane."""
    return (qa.plane_observable(0.0, "xy"), qa.plane_observable(theta_a, "xy"),
            qa.plane_observable(0.0, "xy"), qa.plane_observable(theta_b, "xy"))


def chsh_operator(theta_a: float, theta_b: float) -> np.ndarray:
    A, Ap, B, Bp = observables(theta_a, theta_b)
    return np.kron(A, B + Bp) + np.kron(Ap, B - Bp)


def commutator_bound(rho: np.ndarray, theta_a: float, theta_b: float) -> tuple[float, float]:
    """``(|<CHSH>|, sqrt(4 + |<[A,A'] (x) [B,B']>|))`` for a two-qubit state."""
    A, Ap, B, Bp = observables(theta_a, theta_b)
    value = abs(qa.expectation(chsh_operator(theta_a, theta_b), rho))
    comm = np.kron(qa.commutator(A, Ap), qa.commutator(B, Bp))
    bound = math.sqrt(4 + abs(np.trace(comm @ qa.to_density(rho))))
    return value, bound


def separable_quadratic(rho: np.ndarray, triple_a: qa.OrthonormalTriple,
                        triple_b: qa.OrthonormalTriple) -> tuple[float, float]:
    """Both sides of the product-state inequality for orthogonal local triples.

    Returns ``(<AB' + A'B>^2 + <AB - A'B'>^2, (1 - <A''>^2)(1 - <B''>^2))``
    where ``A, A', A''`` are the ``x, y, z`` directions of ``triple_a``.
    Separable states always satisfy ``lhs <= rhs <= 1``.
    """
    rho = qa.to_density(rho)
    A, Ap, App = triple_a.observables()
    B, Bp, Bpp = triple_b.observables()
    eye = qa.IDENTITY2
    x = qa.expectation(np.kron(A, Bp) + np.kron(Ap, B), rho)
    y = qa.expectation(np.kron(A, B) - np.kron(Ap, Bp), rho)
    a3 = qa.expectation(np.kron(App, eye), rho)
    b3 = qa.expectation(np.kron(eye, Bpp), rho)
    return x**2 + y**2, (1 - a3**2) * (1 - b3**2)


def verify_c(theta_a: float, theta_b: float) -> float:
    """Largest absolute eigenvalue of the CHSH operator."""
    eig = np.linalg.eigvalsh(chsh_operator(theta_a, theta_b))
    return float(max(abs(eig[0]), abs(eig[-1])))


def _bloch(gamma, phi):
    s = np.sin(2 * gamma)
    return s * np.cos(phi), s * np.sin(phi)


def _product_value(params: np.ndarray, theta_a: float, theta_b: float) -> np.ndarray:
    """CHSH value on ``|psi(g1, p1)> (x) |psi(g2, p2)>``; ``params`` rows are ``(g1, p1, g2, p2)``."""
    g1, p1, g2, p2 = np.moveaxis(np.asarray(params, dtype=float), -1, 0)
    x1, y1 = _bloch(g1, p1)
    x2, y2 = _bloch(g2, p2)
    a, ap = x1, x1 * math.cos(theta_a) + y1 * math.sin(theta_a)
    b, bp = x2, x2 * math.cos(theta_b) + y2 * math.sin(theta_b)
    return a * (b + bp) + ap * (b - bp)


def verify_d(theta_a: float, theta_b: float, grid: int = 64, full: bool = False) -> float:
    """Largest ``|<CHSH>|`` over product states by grid search plus local refinement.

    Parameters
    ----------
    grid : int
        Points per axis of the coarse search; at least 2.
    full : bool
        Search all four state parameters instead of fixing both ``gamma``
        at ``pi/4`` (where the maximum lies for in-plane observables).
    """
    if grid < 2:
        raise InvariantError("grid needs at least two points per axis")
    phis = np.linspace(0, 2 * np.pi, grid, endpoint=False)
    if full:
        gammas = np.linspace(0, np.pi / 2, grid)
        best, best_val = None, -np.inf
        for g1 in gammas:
            mesh = np.stack(np.meshgrid([g1], phis, gammas, phis, indexing="ij"), axis=-1).reshape(-1, 4)
            vals = np.abs(_product_value(mesh, theta_a, theta_b))
            i = int(np.argmax(vals))
            if vals[i] > best_val:
                best, best_val = mesh[i], vals[i]
        start = best
    else:
        mesh = np.stack(np.meshgrid(phis, phis, indexing="ij"), axis=-1).reshape(-1, 2)
        quarter = np.full(len(mesh), np.pi / 4)
        params = np.column_stack([quarter, mesh[:, 0], quarter, mesh[:, 1]])
        vals = np.abs(_product_value(params, theta_a, theta_b))
        start = params[int(np.argmax(vals))]

    free = slice(None) if full else [1, 3]

    def neg(x: np.ndarray) -> float:
        p = start.copy()
        p[free] = x
        return -abs(float(_product_value(p, theta_a, theta_b)))

    res = minimize(neg, start[free], method="Nelder-Mead", options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 4000})
    return float(max(-res.fun, -neg(start[free])))


def curve(kind: str, grid: int) -> list[tuple[float, float, float]]:
    """Rows ``(theta_a, theta_b, value)`` on a ``grid`` x ``grid`` mesh of [0, pi].

    The single-angle curves ``roy`` and ``x`` are tabulated on the diagonal.
    """
    if grid < 2:
        raise InvariantError("grid needs at least two points per axis")
    thetas = np.linspace(0, np.pi, grid)
    rows = []
    if kind in ("c", "d"):
        fn = c_max if kind == "c" else d_max
        for ta in thetas:
            for tb in thetas:
                rows.append((float(ta), float(tb), fn(ta, tb)))
    elif kind in ("roy", "x", "d-equal"):
        for t in thetas:
            value = {"roy": roy_bound, "d-equal": d_equal}.get(kind, lambda th: violation_factors(th)["X"])(t)
            rows.append((float(t), float(t), value))
    else:
        raise InvariantError(f"unknown curve {kind!r}")
    return rows
