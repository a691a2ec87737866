"""Special functions and quadrature engines.

Two-variable Hermite polynomials H_n(x, y), Bessel J0/K0, and the two
integration engines (half-line and real-line) every solver in this package
is built on.

Half-line rules
---------------
``gauss_laguerre``
    Gauss-Laguerre with the weight folded back in; suited to integrands with
    an e^{-cs} envelope.
``adaptive_subdivision``
    Globally adaptive subdivision (QUADPACK), for integrands with endpoint
    singularities or awkward scales.
``inverse_square_substitution``
    Substitutes t = 1/xi^2 and integrates the transformed integrand with
    composite Gauss-Legendre panels. This removes the t -> 0 essential
    singularity of subordination kernels t^{-3/2} e^{-1/(4t) - ct} (which
    become smooth Gaussian-decaying functions of xi) and is the default for
    kernels of that shape. It is *not* a good choice for plain e^{-s}
    integrands, whose transformed tail decays only like xi^{-3}.

All rules use fixed node sets and compensated (Neumaier) accumulation in a
fixed order, so results are bit-identical across runs and schedulers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.laguerre import laggauss
from numpy.polynomial.legendre import leggauss
from scipy import integrate as _integrate
from scipy import special as _special

from .errors import ConvergenceError

__all__ = [
    "QuadratureConfig",
    "IntegralResult",
    "hermite2",
    "bessel",
    "integrate_halfline",
    "integrate_realline",
]

HALFLINE_RULES = ("gauss_laguerre", "adaptive_subdivision", "inverse_square_substitution")
REALLINE_RULES = ("gauss_hermite", "truncated_adaptive")

# Largest Gauss-Laguerre order whose scaled weights w_i e^{x_i} stay inside
# double range (largest node ~ 4n + 2 must remain well below 709).
_LAGUERRE_CAP = 160
_HERMITE_CAP = 256
# hermite2: switch from the defining factorial sum to the recurrence here.
_HERMITE_SUM_MAX = 20
# hermite2: hard cap; far above this the values themselves overflow doubles.
_HERMITE_N_CAP = 1000


@dataclass(frozen=True)
class QuadratureConfig:
    """Rule selection and tolerances for the two integration engines.

    Orders are node counts of the *initial* rule; refinement doubles them
    (Gauss rules) or deepens the subdivision (adaptive rules) up to
    ``max_refinements`` times.
    """

    halfline_rule: str = "gauss_laguerre"
    halfline_order: int = 64
    realline_rule: str = "gauss_hermite"
    realline_order: int = 64
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_refinements: int = 6

    def __post_init__(self):
        if self.halfline_rule not in HALFLINE_RULES:
            raise ValueError(f"unknown halfline_rule {self.halfline_rule!r}")
        if self.realline_rule not in REALLINE_RULES:
            raise ValueError(f"unknown realline_rule {self.realline_rule!r}")
        if self.halfline_order < 2 or self.realline_order < 2:
            raise ValueError("quadrature orders must be >= 2")
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("abs_tol and rel_tol must not both be zero")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be positive")


@dataclass(frozen=True)
class IntegralResult:
    """Value of an integral together with the achieved error estimate."""

    value: complex
    error: float

    def __complex__(self) -> complex:
        return complex(self.value)


DEFAULT_CONFIG = QuadratureConfig()


# ----------------------------------------------------------------------
# special functions


def hermite2(n: int, x: float, y: float) -> float:
    """Two-variable Hermite polynomial H_n(x, y).

    Defined by H_n(x, y) = n! sum_k x^{n-2k} y^k / ((n-2k)! k!); satisfies
    the recurrence H_{n+1} = x H_n + 2 y n H_{n-1} and the operational
    identity d^n/dx^n e^{a x^2} = H_n(2ax, a) e^{a x^2}.

    The defining sum is evaluated directly for n <= 20; larger orders use
    the recurrence (the factorial coefficients overflow long before the
    polynomial values do). Orders above 1000 are refused.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError("n must be a nonnegative integer")
    if n < 0:
        raise ValueError("n must be a nonnegative integer")
    if n > _HERMITE_N_CAP:
        raise OverflowError(f"hermite2 order {n} exceeds the supported cap {_HERMITE_N_CAP}")
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError("x and y must be finite")
    if n <= _HERMITE_SUM_MAX:
        total = 0.0
        for k in range(n // 2 + 1):
            coeff = math.factorial(n) // (math.factorial(n - 2 * k) * math.factorial(k))
            total += coeff * x ** (n - 2 * k) * y**k
        return float(total)
    h_prev = 1.0
    h_cur = x
    for m in range(1, n):
        h_prev, h_cur = h_cur, x * h_cur + 2.0 * y * m * h_prev
    return float(h_cur)


def bessel(kind: str, x: float) -> float:
    """Bessel function J0(x) (any real x) or K0(x) (x > 0)."""
    if kind == "J0":
        if not math.isfinite(x):
            raise ValueError("x must be finite")
        return float(_special.j0(x))
    if kind == "K0":
        if not math.isfinite(x):
            raise ValueError("x must be finite")
        if x <= 0:
            raise ValueError("K0 requires x > 0")
        return float(_special.k0(x))
    raise ValueError(f"unknown Bessel kind {kind!r}; expected 'J0' or 'K0'")


# ----------------------------------------------------------------------
# compensated summation


def _neumaier_axis0(terms: np.ndarray) -> np.ndarray:
    """Neumaier-compensated sum along axis 0, fixed iteration order."""
    s = np.zeros(terms.shape[1:], dtype=terms.dtype)
    c = np.zeros_like(s)
    for t in terms:
        tmp = s + t
        big = np.abs(s) >= np.abs(t)
        c = c + np.where(big, (s - tmp) + t, (t - tmp) + s)
        s = tmp
    return s + c


def _csum(terms: np.ndarray) -> np.ndarray:
    terms = np.asarray(terms)
    if np.iscomplexobj(terms):
        return _neumaier_axis0(terms.real.astype(float)) + 1j * _neumaier_axis0(
            terms.imag.astype(float)
        )
    return _neumaier_axis0(terms.astype(float))


# ----------------------------------------------------------------------
# node caches


@lru_cache(maxsize=64)
def _laguerre_nodes(order: int):
    x, w = laggauss(order)
    scaled = np.exp(np.log(w) + x)  # w_i e^{x_i} without overflow
    x.setflags(write=False)
    scaled.setflags(write=False)
    return x, scaled


@lru_cache(maxsize=64)
def _hermite_nodes(order: int):
    x, w = hermgauss(order)
    scaled = np.exp(np.log(w) + x * x)
    x.setflags(write=False)
    scaled.setflags(write=False)
    return x, scaled


@lru_cache(maxsize=16)
def _legendre_nodes(order: int):
    x, w = leggauss(order)
    # map to [0, 1]
    x01 = 0.5 * (x + 1.0)
    w01 = 0.5 * w
    x01.setflags(write=False)
    w01.setflags(write=False)
    return x01, w01


def _eval_nodes(f: Callable, nodes: np.ndarray) -> np.ndarray:
    vals = [np.asarray(f(float(t))) for t in nodes]
    return np.stack(vals, axis=0)


def _tol(cfg: QuadratureConfig, scale: float) -> float:
    return max(cfg.abs_tol, cfg.rel_tol * scale)


# ----------------------------------------------------------------------
# engine cores (vector-valued integrands; scalars go through shape-() arrays)


def _gauss_refine(f: Callable, cfg: QuadratureConfig, nodes_of, order0: int, cap: int):
    """Shared doubling-refinement loop for the Gauss rules."""
    # Keep room for at least one doubling so an error estimate always exists.
    order = min(order0, cap // 2)
    x, w = nodes_of(order)
    vals = _eval_nodes(f, x)
    est = _csum(w.reshape((-1,) + (1,) * (vals.ndim - 1)) * vals)
    err = math.inf
    for _ in range(cfg.max_refinements):
        if order >= cap:
            break
        order = min(2 * order, cap)
        x, w = nodes_of(order)
        vals = _eval_nodes(f, x)
        new = _csum(w.reshape((-1,) + (1,) * (vals.ndim - 1)) * vals)
        err = float(np.max(np.abs(new - est)))
        est = new
        if np.all(np.isfinite(np.atleast_1d(est))) and err <= _tol(cfg, float(np.max(np.abs(est)))):
            return est, err
    if err <= _tol(cfg, float(np.max(np.abs(np.atleast_1d(est))))) and np.all(
        np.isfinite(np.atleast_1d(est))
    ):
        return est, err
    raise ConvergenceError(
        f"Gauss rule did not converge by order {order}",
        estimate=est if np.ndim(est) == 0 else None,
        error_bound=err,
    )


def _panel_sum(g: Callable, edges: np.ndarray, order: int) -> np.ndarray:
    """Composite Gauss-Legendre over consecutive [edges[i], edges[i+1]] panels."""
    x01, w01 = _legendre_nodes(order)
    pieces = []
    weights = []
    for a, b in zip(edges[:-1], edges[1:]):
        span = b - a
        pieces.append(a + span * x01)
        weights.append(span * w01)
    ts = np.concatenate(pieces)
    ws = np.concatenate(weights)
    vals = _eval_nodes(g, ts)
    return _csum(ws.reshape((-1,) + (1,) * (vals.ndim - 1)) * vals)


def _inverse_square_core(f: Callable, cfg: QuadratureConfig):
    """Integrate f over (0, inf) after the substitution t = 1/xi^2.

    The transformed integrand g(xi) = 2 f(1/xi^2) / xi^3 is integrated with
    composite Gauss-Legendre panels on [0, XI]; the upper limit is extended
    geometrically while the outermost panel still contributes, and the panel
    count is doubled until two successive estimates agree.
    """

    def g(xi: float):
        t = 1.0 / (xi * xi)
        return np.asarray(f(t)) * (2.0 / xi**3)

    order = 16
    upper = 16.0
    # Extend the truncation point while the tail still matters.
    probe = _panel_sum(g, np.array([upper, 1.5 * upper]), order)
    budget = cfg.abs_tol if cfg.abs_tol > 0 else 1e-15
    while float(np.max(np.abs(probe))) > budget / 16.0:
        upper *= 1.5
        if upper > 65536.0:
            raise ConvergenceError(
                "inverse-square rule: transformed integrand has a slowly decaying "
                "tail (integrand lacks t->0 decay); use another rule",
                error_bound=float(np.max(np.abs(probe))),
            )
        probe = _panel_sum(g, np.array([upper, 1.5 * upper]), order)

    n_panels = 8
    edges = np.linspace(0.0, upper, n_panels + 1)
    est = _panel_sum(g, edges, order)
    err = math.inf
    for _ in range(cfg.max_refinements):
        n_panels *= 2
        edges = np.linspace(0.0, upper, n_panels + 1)
        new = _panel_sum(g, edges, order)
        err = float(np.max(np.abs(new - est)))
        est = new
        if np.all(np.isfinite(np.atleast_1d(est))) and err <= _tol(cfg, float(np.max(np.abs(est)))):
            return est, err
    raise ConvergenceError(
        f"inverse-square rule did not converge with {n_panels} panels",
        estimate=est if np.ndim(est) == 0 else None,
        error_bound=err,
    )


def _quadpack_scalar(f: Callable, a, b, cfg: QuadratureConfig):
    """scipy.integrate.quad on the real and imaginary parts separately."""
    limit = 50 * cfg.max_refinements
    epsabs = max(cfg.abs_tol, 1e-14)
    epsrel = max(cfg.rel_tol, 1e-12)
    out = []
    for part in (np.real, np.imag):
        val, err, info, *rest = _integrate.quad(
            lambda t: float(part(f(t))), a, b, limit=limit, epsabs=epsabs, epsrel=epsrel,
            full_output=True,
        )
        # A QUADPACK warning (e.g. roundoff detected) is only fatal when the
        # achieved error bound also misses the configured tolerance.
        if rest and err > _tol(cfg, abs(val)):
            raise ConvergenceError(
                f"adaptive quadrature failed: {rest[0]}", estimate=val, error_bound=err
            )
        out.append((val, err))
    (vr, er), (vi, ei) = out
    return complex(vr, vi), er + ei


def _halfline_engine(f: Callable, cfg: QuadratureConfig):
    if cfg.halfline_rule == "gauss_laguerre":
        return _gauss_refine(f, cfg, _laguerre_nodes, cfg.halfline_order, _LAGUERRE_CAP)
    if cfg.halfline_rule == "inverse_square_substitution":
        return _inverse_square_core(f, cfg)
    # adaptive_subdivision
    probe = np.asarray(f(1.0))
    if probe.ndim == 0:
        return _quadpack_scalar(f, 0.0, np.inf, cfg)
    # vector integrand: integrate each component independently
    vals = np.empty(probe.shape, dtype=complex)
    worst = 0.0
    for idx in np.ndindex(probe.shape):
        vals[idx], err = _quadpack_scalar(lambda t: np.asarray(f(t))[idx], 0.0, np.inf, cfg)
        worst = max(worst, err)
    return vals, worst


def _realline_engine(f: Callable, cfg: QuadratureConfig):
    if cfg.realline_rule == "gauss_hermite":
        return _gauss_refine(f, cfg, _hermite_nodes, cfg.realline_order, _HERMITE_CAP)
    probe = np.asarray(f(0.5))
    if probe.ndim == 0:
        return _quadpack_scalar(f, -np.inf, np.inf, cfg)
    vals = np.empty(probe.shape, dtype=complex)
    worst = 0.0
    for idx in np.ndindex(probe.shape):
        vals[idx], err = _quadpack_scalar(lambda t: np.asarray(f(t))[idx], -np.inf, np.inf, cfg)
        worst = max(worst, err)
    return vals, worst


# ----------------------------------------------------------------------
# public API


def integrate_halfline(f: Callable[[float], complex], cfg: QuadratureConfig | None = None) -> IntegralResult:
    """Integrate ``f`` over (0, inf) with the configured half-line rule.

    Gauss-Laguerre weights are evaluated with the e^{-x} factor folded back
    in, so ``f`` is the plain integrand. Raises
    :class:`~pseudoflow.errors.ConvergenceError` if the refinement loop runs
    out before the tolerance max(abs_tol, rel_tol * |I|) is met.
    """
    cfg = cfg or DEFAULT_CONFIG
    value, error = _halfline_engine(lambda t: np.asarray(f(t)), cfg)
    return IntegralResult(complex(value), float(error))


def integrate_realline(f: Callable[[float], complex], cfg: QuadratureConfig | None = None) -> IntegralResult:
    """Integrate ``f`` over (-inf, inf); see :func:`integrate_halfline`."""
    cfg = cfg or DEFAULT_CONFIG
    value, error = _realline_engine(lambda t: np.asarray(f(t)), cfg)
    return IntegralResult(complex(value), float(error))


def _integrate_halfline_vec(f: Callable[[float], np.ndarray], cfg: QuadratureConfig | None = None):
    """Vector-valued half-line integral (internal; used by the solvers)."""
    cfg = cfg or DEFAULT_CONFIG
    return _halfline_engine(f, cfg)


def _integrate_realline_vec(f: Callable[[float], np.ndarray], cfg: QuadratureConfig | None = None):
    cfg = cfg or DEFAULT_CONFIG
    return _realline_engine(f, cfg)
