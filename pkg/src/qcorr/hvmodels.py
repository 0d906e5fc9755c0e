"""Hidden-variable model families on finite hidden-variable grids.

Every model exposes :meth:`components`, returning

* ``weights`` of shape ``(K, mA, mB)``: the (possibly sub-normalized)
  distribution of the hidden variable given the settings;
* ``joint`` of shape ``(K, mA, mB, 2, 2)``: outcome probabilities given the
  hidden variable and settings (outcome bit 0 means +1).

:func:`behavior_from_model` assembles a :class:`~qcorr.behaviors.Behavior`
from these. Mass missing from a sub-normalized distribution is filled with
uniformly random outcomes, which leaves every correlator unchanged.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, least_squares

from . import behaviors as bh
from . import qalgebra as qa
from . import statelib as sl
from .errors import InvariantError, SizeCapError

MASS_TOL = 1e-12


def _check_range(arr: np.ndarray, lo: float, hi: float, name: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if arr.size and (arr.min() < lo - 1e-12 or arr.max() > hi + 1e-12):
        raise InvariantError(f"{name} must lie in [{lo}, {hi}]")
    return arr


def _product_joint(mean_a: np.ndarray, mean_b: np.ndarray) -> np.ndarray:
    """Outcome table with independent outcomes of the given means."""
    pa = np.stack([(1 + mean_a) / 2, (1 - mean_a) / 2], axis=-1)
    pb = np.stack([(1 + mean_b) / 2, (1 - mean_b) / 2], axis=-1)
    return pa[..., :, None] * pb[..., None, :]


# ------------------------------------------------------------------ models


@dataclass(frozen=True)
class NonlocalDeterministicModel:
    """Outcome values averaged over deeper variables, with a setting-dependent source.

    ``a(A,B,lam) = sum_w f1[A,lam,w] g1[B,lam,w] k[w]`` and likewise for
    ``b`` with ``f2, g2, l``. The source is
    ``rho(lam|A,B) = sum_c m[c] src_a[c,A,lam] src_b[c,B,lam]``.

    With ``normalized_sources=True`` each ``src_a[c, A, :]`` and
    ``src_b[c, B, :]`` must be a probability vector, so the product has
    total mass at most one. Otherwise the entries only need to lie in
    [0, 1] and the product must itself be normalized; that looser reading
    admits models reaching the algebraic maximum (see
    :func:`normalized_source_counterexample`).
    """

    f1: np.ndarray
    g1: np.ndarray
    f2: np.ndarray
    g2: np.ndarray
    k: np.ndarray
    l: np.ndarray
    src_a: np.ndarray
    src_b: np.ndarray
    m: np.ndarray
    normalized_sources: bool = True

    def __post_init__(self) -> None:
        for name in ("f1", "g1", "f2", "g2"):
            _check_range(getattr(self, name), -1, 1, name)
        for name in ("k", "l", "m"):
            arr = _check_range(getattr(self, name), 0, 1, name)
            if abs(arr.sum() - 1) > 1e-10:
                raise InvariantError(f"{name} must be normalized")
        _check_range(self.src_a, 0, 1, "src_a")
        _check_range(self.src_b, 0, 1, "src_b")
        if self.normalized_sources:
            if np.abs(self.src_a.sum(axis=-1) - 1).max() > 1e-10 or np.abs(self.src_b.sum(axis=-1) - 1).max() > 1e-10:
                raise InvariantError("source factors must be probability vectors")
        elif np.abs(self._weights().sum(axis=0) - 1).max() > 1e-10:
            raise InvariantError("setting-dependent source must be normalized")

    def _weights(self) -> np.ndarray:
        return np.einsum("c,cxk,cyk->kxy", self.m, self.src_a, self.src_b)

    def outcome_values(self) -> tuple[np.ndarray, np.ndarray]:
        """``a`` and ``b`` with shape ``(K, mA, mB)``."""
        a = np.einsum("xkw,ykw,w->kxy", self.f1, self.g1, self.k)
        b = np.einsum("xkv,ykv,v->kxy", self.f2, self.g2, self.l)
        return a, b

    def components(self) -> tuple[np.ndarray, np.ndarray]:
        a, b = self.outcome_values()
        return self._weights(), _product_joint(a, b)


@dataclass(frozen=True)
class NonlocalStochasticModel:
    """Stochastic responses with distant setting and outcome dependence.

    The joint is ``P(a,b|A,B,lam) = f[a,A,lam] x[b,B,lam] gbar[b,B,lam] ybar[A,lam]``
    and the source factorizes as ``src_a[A,lam] src_b[B,lam]``.
    """

    f: np.ndarray
    x: np.ndarray
    gbar: np.ndarray
    ybar: np.ndarray
    src_a: np.ndarray
    src_b: np.ndarray

    def __post_init__(self) -> None:
        for name in ("f", "x", "gbar", "ybar", "src_a", "src_b"):
            _check_range(getattr(self, name), 0, 1, name)
        joint = self._joint()
        if np.abs(joint.sum(axis=(-2, -1)) - 1).max() > 1e-10:
            raise InvariantError("induced joint distributions are not normalized")
        if np.abs(self.src_a.sum(axis=-1) - 1).max() > 1e-10 or np.abs(self.src_b.sum(axis=-1) - 1).max() > 1e-10:
            raise InvariantError("source factors must be probability vectors")

    def _joint(self) -> np.ndarray:
        return np.einsum("axk,byk,byk,xk->kxyab", self.f, self.x, self.gbar, self.ybar)

    def conditional_a_given_b(self) -> np.ndarray:
        """``P(a|A,B,b,lam)`` recovered from the joint; equals ``f x`` where defined."""
        joint = self._joint()
        pb = joint.sum(axis=-2, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(pb > 0, joint / pb, np.nan)

    def components(self) -> tuple[np.ndarray, np.ndarray]:
        weights = np.einsum("xk,yk->kxy", self.src_a, self.src_b)
        return weights, self._joint()


@dataclass(frozen=True)
class LeggettModel:
    """Mixture over polarization pairs with Malus-law local marginals.

    ``P(a,b|avec,bvec,u,v) = (1 + a u.avec + b v.bvec + a b C(u,v,avec,bvec)) / 4``.
    The default correlation is the product ``(u.avec)(v.bvec)``, which is
    always admissible.
    """

    pairs: tuple[tuple[np.ndarray, np.ndarray], ...]
    weights: np.ndarray
    correlation: Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], float] | None = None

    def __post_init__(self) -> None:
        w = _check_range(self.weights, 0, 1, "weights")
        if len(w) != len(self.pairs) or abs(w.sum() - 1) > 1e-10:
            raise InvariantError("one normalized weight per polarization pair is required")
        for u, v in self.pairs:
            qa.unit_vector(u, 1e-9)
            qa.unit_vector(v, 1e-9)

    def components_for(self, a_dirs: Sequence[np.ndarray], b_dirs: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        K, ma, mb = len(self.pairs), len(a_dirs), len(b_dirs)
        joint = np.zeros((K, ma, mb, 2, 2))
        for k, (u, v) in enumerate(self.pairs):
            for x, avec in enumerate(a_dirs):
                for y, bvec in enumerate(b_dirs):
                    ma_, mb_ = float(np.dot(u, avec)), float(np.dot(v, bvec))
                    corr = ma_ * mb_ if self.correlation is None else self.correlation(u, v, avec, bvec)
                    for ia, ib in itertools.product(range(2), repeat=2):
                        sa, sb = 1 - 2 * ia, 1 - 2 * ib
                        joint[k, x, y, ia, ib] = (1 + sa * ma_ + sb * mb_ + sa * sb * corr) / 4
        if joint.min() < -1e-12:
            raise InvariantError("correlation choice gives negative probabilities")
        weights = np.broadcast_to(np.asarray(self.weights, dtype=float)[:, None, None], (K, ma, mb)).copy()
        return weights, joint


@dataclass(frozen=True)
class TableModel:
    """Direct specification by weights and per-hidden-variable joint tables."""

    weights: np.ndarray
    joint: np.ndarray

    def components(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.weights, dtype=float), np.asarray(self.joint, dtype=float)


# ---------------------------------------------------------------- assembly


def behavior_from_components(weights: np.ndarray, joint: np.ndarray) -> bh.Behavior:
    """Exact behavior ``sum_lam w P + (1 - sum_lam w) * uniform``."""
    weights = np.asarray(weights, dtype=float)
    joint = np.asarray(joint, dtype=float)
    if weights.min() < -MASS_TOL:
        raise InvariantError("negative hidden-variable weight")
    mass = weights.sum(axis=0)
    if mass.max() > 1 + 1e-10:
        raise InvariantError(f"hidden-variable distribution has mass {mass.max()} > 1")
    table = np.einsum("kxy,kxyab->xyab", weights, joint)
    table = table + (1 - mass)[..., None, None] * 0.25
    return bh.Behavior(table)


def behavior_from_model(model, integration: str = "exact", samples: int = 10**4,
                        rng: np.random.Generator | None = None,
                        settings: tuple[Sequence[np.ndarray], Sequence[np.ndarray]] | None = None) -> bh.Behavior:
    """Behavior of a model, exactly or from ``samples`` Monte-Carlo runs per setting pair.

    ``settings`` supplies measurement directions for a :class:`LeggettModel`.
    """
    if isinstance(model, LeggettModel):
        if settings is None:
            raise InvariantError("a Leggett model needs measurement directions")
        weights, joint = model.components_for(*settings)
    else:
        weights, joint = model.components()
    if integration == "exact":
        return behavior_from_components(weights, joint)
    if integration != "monte-carlo":
        raise InvariantError(f"unknown integration {integration!r}")
    rng = np.random.default_rng() if rng is None else rng
    K, ma, mb = weights.shape
    table = np.zeros((ma, mb, 2, 2))
    for x, y in itertools.product(range(ma), range(mb)):
        w = np.append(weights[:, x, y], max(0.0, 1 - weights[:, x, y].sum()))
        lam = rng.choice(K + 1, size=samples, p=w / w.sum())
        cells = np.vstack([joint[:, x, y].reshape(K, 4), np.full((1, 4), 0.25)])
        counts = np.zeros(4)
        for k, c in zip(*np.unique(lam, return_counts=True)):
            counts += rng.multinomial(c, cells[k] / cells[k].sum())
        table[x, y] = (counts / samples).reshape(2, 2)
    return bh.Behavior(table)


def max_chsh(b: bh.Behavior) -> float:
    return float(np.max(bh.chsh_facets(b)))


# ------------------------------------------------------------- generators


def random_nonlocal_deterministic(rng: np.random.Generator, grid: int = 16, deep: int = 4,
                                  extreme: bool = False) -> NonlocalDeterministicModel:
    """Random instance; ``extreme=True`` draws responses from {-1, +1} and point sources."""
    def resp(shape):
        return rng.choice([-1.0, 1.0], size=shape) if extreme else rng.uniform(-1, 1, size=shape)

    gammas = 3
    points = rng.integers(grid, size=gammas)

    def probs(shape):
        if extreme:
            # one hidden-variable value per deeper variable, shared by both sides
            out = np.zeros(shape)
            out[np.arange(gammas), :, points] = 1.0
            return out
        return rng.dirichlet(np.ones(shape[-1]), size=shape[:-1])

    return NonlocalDeterministicModel(
        f1=resp((2, grid, deep)), g1=resp((2, grid, deep)),
        f2=resp((2, grid, deep)), g2=resp((2, grid, deep)),
        k=rng.dirichlet(np.ones(deep)), l=rng.dirichlet(np.ones(deep)),
        src_a=probs((gammas, 2, grid)), src_b=probs((gammas, 2, grid)),
        m=rng.dirichlet(np.ones(gammas)),
    )


def normalized_source_counterexample() -> NonlocalDeterministicModel:
    """Literal-range source factors whose normalized product encodes both settings.

    Hidden variable ``lam = (s, t)``; ``src_a`` selects ``s = A`` and
    ``src_b`` selects ``t = B``, so ``rho(lam|A,B)`` is a point mass on
    ``(A, B)``. Outcomes ``a = +1`` and ``b = (-1)**(s t)`` then give CHSH 4.
    """
    grid = 4
    lam = [(s, t) for s in range(2) for t in range(2)]
    f1 = np.ones((2, grid, 1))
    g1 = np.ones((2, grid, 1))
    f2 = np.ones((2, grid, 1))
    g2 = np.array([[[(-1.0) ** (s * t)] for s, t in lam]] * 2)
    src_a = np.array([[[1.0 if s == A else 0.0 for s, _ in lam] for A in range(2)]])
    src_b = np.array([[[1.0 if t == B else 0.0 for _, t in lam] for B in range(2)]])
    return NonlocalDeterministicModel(f1, g1, f2, g2, np.ones(1), np.ones(1), src_a, src_b, np.ones(1),
                                      normalized_sources=False)


def random_nonlocal_stochastic(rng: np.random.Generator, grid: int = 16) -> NonlocalStochasticModel:
    """Random instance with piecewise-constant responses on a ``grid``-point hidden variable.

    Normalization of the joint forces ``x`` to be constant in the distant
    outcome and ``ybar`` to be independent of ``A``; within those
    constraints ``f`` is a random distribution, ``x = 1``, ``ybar`` is
    uniform in ``[max q, 1]`` and ``gbar = q / ybar`` for a random
    distribution ``q``.
    """
    p = rng.uniform(size=(2, grid))
    q = rng.uniform(size=(2, grid))
    f = np.stack([p, 1 - p])
    qb = np.stack([q, 1 - q])
    c = rng.uniform(qb.max(axis=(0, 1)), 1.0)
    return NonlocalStochasticModel(
        f=f, x=np.ones((2, 2, grid)), gbar=qb / c, ybar=np.broadcast_to(c, (2, grid)).copy(),
        src_a=rng.dirichlet(np.ones(grid), size=2), src_b=rng.dirichlet(np.ones(grid), size=2),
    )


def random_swap_model(rng: np.random.Generator, grid: int = 16) -> TableModel:
    """Deterministic outcomes fixed by the distant setting only: ``a(B, lam)``, ``b(A, lam)``."""
    a = rng.choice([-1.0, 1.0], size=(grid, 2))
    b = rng.choice([-1.0, 1.0], size=(grid, 2))
    mean_a = np.broadcast_to(a[:, None, :], (grid, 2, 2))
    mean_b = np.broadcast_to(b[:, :, None], (grid, 2, 2))
    weights = np.broadcast_to(rng.dirichlet(np.ones(grid))[:, None, None], (grid, 2, 2)).copy()
    return TableModel(weights, _product_joint(mean_a, mean_b))


def sphere_grid(points: int) -> np.ndarray:
    """Near-uniform unit vectors (golden-angle spiral)."""
    i = np.arange(points) + 0.5
    z = 1 - 2 * i / points
    r = np.sqrt(1 - z * z)
    phi = math.pi * (3 - math.sqrt(5)) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def sign_product_model(alpha: float, beta: float, a_dirs: Sequence[np.ndarray], b_dirs: Sequence[np.ndarray],
                       points: int = 500) -> TableModel:
    """``P(a|avec,bvec,lam) = 1/2 + a alpha s_a s_b`` and ``P(b|..) = 1/2 + b beta s_b s_a``, outcome independent.

    ``s_a = sgn(avec . lam)``; the correlation is ``4 alpha beta`` for every setting pair.
    """
    if abs(alpha) > 0.5 or abs(beta) > 0.5:
        raise InvariantError("alpha and beta must lie in [-1/2, 1/2]")
    lam = sphere_grid(points)
    sgn = lambda v: np.where(v >= 0, 1.0, -1.0)  # noqa: E731
    sa = np.stack([sgn(lam @ np.asarray(a)) for a in a_dirs], axis=1)
    sb = np.stack([sgn(lam @ np.asarray(b)) for b in b_dirs], axis=1)
    both = sa[:, :, None] * sb[:, None, :]
    weights = np.full(both.shape, 1.0 / points)
    return TableModel(weights, _product_joint(2 * alpha * both, 2 * beta * both))


def random_leggett_model(rng: np.random.Generator, pairs: int = 8) -> LeggettModel:
    def unit():
        v = rng.normal(size=3)
        return v / np.linalg.norm(v)

    return LeggettModel(tuple((unit(), unit()) for _ in range(pairs)), rng.dirichlet(np.ones(pairs)))


FAMILIES = ("nonlocal-det", "nonlocal-stoch", "swap", "leggett")


def audit_chsh(family: str, samples: int, rng: np.random.Generator) -> dict:
    """Largest CHSH facet value over ``samples`` random members of ``family`` (exact evaluation)."""
    worst, worst_index = -math.inf, -1
    for i in range(samples):
        if family == "nonlocal-det":
            model = random_nonlocal_deterministic(rng, extreme=bool(i % 2))
            b = behavior_from_model(model)
        elif family == "nonlocal-stoch":
            b = behavior_from_model(random_nonlocal_stochastic(rng))
        elif family == "swap":
            b = behavior_from_model(random_swap_model(rng))
        elif family == "leggett":
            dirs = [sphere_grid(7)[rng.integers(7)] for _ in range(4)]
            b = behavior_from_model(random_leggett_model(rng), settings=(dirs[:2], dirs[2:]))
        else:
            raise InvariantError(f"unknown model family {family!r}")
        value = max_chsh(b)
        if value > worst:
            worst, worst_index = value, i
    return {"family": family, "samples": samples, "max_chsh": worst, "bound": 2.0,
            "violations": int(worst > 2 + 1e-9), "worst_sample": worst_index}


# ----------------------------------------------------------- Leggett-type


def branciard_lhs_singlet(phi: float) -> float:
    return 2 * abs(math.cos(phi / 2))


def branciard_bound(phi: float) -> float:
    return 2 - (2 / 3) * abs(math.sin(phi / 2))


def triplet_geometry(phi: float) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Three orthogonal ``a_i`` with ``b_i, b_i'`` at angle ``phi`` symmetric about ``a_i``."""
    e = np.eye(3)
    out = []
    for i in range(3):
        a, n = e[i], e[(i + 1) % 3]
        out.append((a, math.cos(phi / 2) * a + math.sin(phi / 2) * n, math.cos(phi / 2) * a - math.sin(phi / 2) * n))
    return out


def branciard_check(phi: float, geometry: Sequence[tuple[np.ndarray, np.ndarray, np.ndarray]] | None = None) -> dict:
    """Singlet value of ``(1/3) sum_i |<a_i b_i> + <a_i b_i'>|`` against the Leggett-type bound."""
    geometry = triplet_geometry(phi) if geometry is None else geometry
    singlet = sl.projector(sl.bell_state("psi-"))
    total = 0.0
    for a, b, bp in geometry:
        ea = qa.spin_op(a)
        total += abs(qa.expectation(np.kron(ea, qa.spin_op(b)), singlet) + qa.expectation(np.kron(ea, qa.spin_op(bp)), singlet))
    lhs = total / 3
    bound = branciard_bound(phi)
    return {"phi": phi, "lhs_singlet": lhs, "lhs_formula": branciard_lhs_singlet(phi), "bound": bound,
            "violated": bool(lhs > bound + 1e-12)}


def branciard_window() -> float:
    """Upper end ``phi*`` of the violation window, where ``2 cos(phi/2) = 2 - (2/3) sin(phi/2)``."""
    return float(brentq(lambda p: branciard_lhs_singlet(p) - branciard_bound(p), 1e-6, math.pi, xtol=1e-14))


# ------------------------------------------------------ logical implications


def _maudlin_views(table: np.ndarray, prior: np.ndarray) -> dict[str, np.ndarray]:
    """Conditional probabilities used by the two pairs of conditions.

    ``table[A, B, a, b]`` is ``P(a,b|A,B)`` at fixed hidden variable and
    ``prior[A, B]`` the settings distribution.
    """
    p_a_AB = table.sum(axis=3)
    p_b_AB = table.sum(axis=2)
    wb = prior / prior.sum(axis=1, keepdims=True)  # P(B|A)
    wa = prior / prior.sum(axis=0, keepdims=True)  # P(A|B)
    p_a_A = np.einsum("xy,xya->xa", wb, p_a_AB)
    p_b_B = np.einsum("xy,xyb->yb", wa, p_b_AB)
    joint_Ab = np.einsum("xy,xyab->xab", wb, table)
    p_b_A = np.einsum("xy,xyb->xb", wb, p_b_AB)
    joint_Ba = np.einsum("xy,xyab->yab", wa, table)
    p_a_B = np.einsum("xy,xya->ya", wa, p_a_AB)
    # conditionals on probability-zero events come out as NaN
    with np.errstate(invalid="ignore", divide="ignore"):
        return {
            "p_a_AB": p_a_AB, "p_b_AB": p_b_AB, "p_a_A": p_a_A, "p_b_B": p_b_B,
            "p_a_Ab": joint_Ab / p_b_A[:, None, :],
            "p_b_Ba": joint_Ba / p_a_B[:, :, None],
            "p_a_ABb": table / p_b_AB[:, :, None, :],
            "p_b_ABa": table / p_a_AB[:, :, :, None],
        }


def maudlin_residuals(table: np.ndarray, prior: np.ndarray, which: str = "both") -> np.ndarray:
    """Residuals of the outcome condition (first) and the setting condition (second).

    Conditions on probability-zero events are vacuous and contribute 0.
    """
    v = _maudlin_views(table, prior)
    first = np.concatenate([
        (v["p_a_Ab"] - v["p_a_A"][:, :, None]).ravel(),
        (v["p_b_Ba"] - v["p_b_B"][:, None, :]).ravel(),
    ])
    second = np.concatenate([
        (v["p_a_ABb"] - v["p_a_Ab"][:, None, :, :]).ravel(),
        (v["p_b_ABa"] - v["p_b_Ba"][None, :, :, :]).ravel(),
    ])
    out = {"first": first, "second": second, "both": np.concatenate([first, second])}[which]
    return np.nan_to_num(out, nan=0.0)


def factorization_gap(table: np.ndarray, prior: np.ndarray) -> float:
    """``max |P(a,b|A,B) - P(a|A) P(b|B)|`` with the marginals averaged over the settings prior."""
    v = _maudlin_views(table, prior)
    product = v["p_a_A"][:, None, :, None] * v["p_b_B"][None, :, None, :]
    return float(np.abs(table - product).max())


def _softmax_table(params: np.ndarray, ma: int, mb: int) -> np.ndarray:
    z = params.reshape(ma, mb, 4)
    z = np.exp(z - z.max(axis=-1, keepdims=True))
    return (z / z.sum(axis=-1, keepdims=True)).reshape(ma, mb, 2, 2)


def constrained_instance(rng: np.random.Generator, which: str = "both", settings: int = 2,
                         tol: float = 1e-13, attempts: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Random ``(table, prior)`` solving the requested conditions to ``tol``.

    The prior is drawn from a flat Dirichlet; the table starts random and
    is driven onto the constraint set by least squares on the residuals.
    """
    for _ in range(attempts):
        prior = rng.dirichlet(np.ones(settings * settings)).reshape(settings, settings)
        x0 = rng.normal(scale=1.0, size=settings * settings * 4)

        def fun(params: np.ndarray) -> np.ndarray:
            return maudlin_residuals(_softmax_table(params, settings, settings), prior, which)

        sol = least_squares(fun, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=5000)
        table = _softmax_table(sol.x, settings, settings)
        if np.abs(fun(sol.x)).max() <= tol and table.min() > 1e-6:
            return table, prior
    raise InvariantError("could not construct an instance satisfying the conditions")


def maudlin_implication_check(samples: int, rng: np.random.Generator, tol: float = 1e-10) -> dict:
    """Construct instances satisfying both conditions and test factorizability on each."""
    gaps = []
    for _ in range(samples):
        table, prior = constrained_instance(rng)
        gaps.append(factorization_gap(table, prior))
    worst = max(gaps) if gaps else 0.0
    return {"samples": samples, "max_gap": worst, "passed": bool(worst <= tol)}


def setting_dependent_instance(prior: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Negative control: ``a`` follows the distant setting with probability 0.9, ``b`` is a fair coin.

    The outcome condition holds, the setting condition fails, and the table
    does not factorize.
    """
    prior = np.full((2, 2), 0.25) if prior is None else prior
    table = np.zeros((2, 2, 2, 2))
    for A, B in itertools.product(range(2), repeat=2):
        table[A, B, B, :] = 0.45
        table[A, B, 1 - B, :] = 0.05
    return table, prior


def deterministic_instance(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Local deterministic table with a random settings prior."""
    ra, rb = rng.integers(2, size=2), rng.integers(2, size=2)
    table = np.zeros((2, 2, 2, 2))
    for A, B in itertools.product(range(2), repeat=2):
        table[A, B, ra[A], rb[B]] = 1.0
    return table, rng.dirichlet(np.ones(4)).reshape(2, 2)


def det_ns_implies_local(parties: int = 2, cap: int = 2**17) -> dict:
    """Exhaustive check that deterministic no-signaling tables are local.

    Two parties: every 0/1 assignment to the 16 table entries is generated
    and the normalized ones are audited. Three parties: the ``8**8``
    deterministic tables are audited directly (pass a larger ``cap``).
    """
    if parties == 2:
        total = 2**16
        if total > cap:
            raise SizeCapError(f"{total} tables exceed the cap {cap}")
        codes = np.arange(total, dtype=np.int64)
        bits = ((codes[:, None] >> np.arange(16)) & 1).reshape(-1, 2, 2, 2, 2)
        valid = (bits.sum(axis=(3, 4)) == 1).all(axis=(1, 2))
        tables = bits[valid]
        a_bits = tables.sum(axis=4).argmax(axis=3)  # (T, A, B)
        b_bits = tables.sum(axis=3).argmax(axis=3)
        ns = (a_bits[:, :, 0] == a_bits[:, :, 1]).all(axis=1) & (b_bits[:, 0, :] == b_bits[:, 1, :]).all(axis=1)
        # a no-signaling deterministic table is the product of its response functions
        rebuilt = np.zeros_like(tables)
        idx = np.nonzero(ns)[0]
        for A, B in itertools.product(range(2), repeat=2):
            rebuilt[idx, A, B, a_bits[idx, A, 0], b_bits[idx, 0, B]] = 1
        local_ok = bool((rebuilt[idx] == tables[idx]).all())
        return {"parties": 2, "tables": int(total), "deterministic": int(valid.sum()),
                "no_signaling": int(ns.sum()), "all_local": local_ok}
    if parties == 3:
        total = 8**8
        if total > cap:
            raise SizeCapError(f"{total} tables exceed the cap {cap}")
        ns_count, ok = 0, True
        chunk = 2**20
        for start in range(0, total, chunk):
            codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
            outs = (codes[:, None] // (8 ** np.arange(8))) % 8  # setting tuple -> outcome triple
            outs = outs.reshape(-1, 2, 2, 2)
            bit = [(outs >> (2 - p)) & 1 for p in range(3)]
            ns = ((bit[0] == bit[0][:, :, :1, :1]).all(axis=(1, 2, 3))
                  & (bit[1] == bit[1][:, :1, :, :1]).all(axis=(1, 2, 3))
                  & (bit[2] == bit[2][:, :1, :1, :]).all(axis=(1, 2, 3)))
            ns_count += int(ns.sum())
            prod = (bit[0][:, :, :1, :1] << 2) | (bit[1][:, :1, :, :1] << 1) | bit[2][:, :1, :1, :]
            ok &= bool((prod[ns] == outs[ns]).all())
        return {"parties": 3, "tables": int(total), "deterministic": int(total),
                "no_signaling": ns_count, "all_local": ok}
    raise InvariantError("only two or three parties are supported")
