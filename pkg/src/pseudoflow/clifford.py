"""Pauli/Dirac matrix parametrizations of operator square roots.

The algebraic identity (sigma . v)^2 = (v . v) 1 and its 4x4 analogues turn
square roots of scalars-plus-operators into first-order matrix forms; this
module provides the generators, the closed-form exponentials they admit,
the 2D/4D evolution operators, the Heisenberg position operator with its
Zitterbewegung term, and eigenprojection powers of line matrices
R = a 1 + b sigma_1.

All matrices are small dense complex numpy arrays (``Mat2``/``Mat4`` are
aliases); generator entries are exact integers (or +-i), so the
anticommutation tables hold exactly in floating point.

Note: beta is diag(1, 1, -1, -1), the unique diagonal choice satisfying
beta^2 = 1 and {alpha_j, beta} = 0 with the standard alpha block form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Mat2",
    "Mat4",
    "PauliVector",
    "GENERATOR_KINDS",
    "generators",
    "pauli_sqrt_identity",
    "exp_pauli",
    "dirac2_evolution",
    "bloch_evolve",
    "dirac4_evolution",
    "position_evolution",
    "sqrt_symbol_check",
    "kappa_parametrization",
    "pauli_line_power",
]

Mat2 = np.ndarray  # 2x2 complex
Mat4 = np.ndarray  # 4x4 complex

_ID2 = np.eye(2, dtype=complex)
_ID4 = np.eye(4, dtype=complex)

_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

_ZERO2 = np.zeros((2, 2), dtype=complex)
_ALPHA = tuple(
    np.block([[_ZERO2, s], [s, _ZERO2]]) for s in _SIGMA
)
_BETA = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
_GAMMA = tuple(_BETA @ a for a in _ALPHA)
_KAPPA = (-_ALPHA[2], _ALPHA[0], _BETA)
_DELTA = np.array(
    [
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [-1, 0, 0, 0],
        [0, -1, 0, 0],
    ],
    dtype=complex,
)

_GENERATORS = {
    "sigma1": _SIGMA[0],
    "sigma2": _SIGMA[1],
    "sigma3": _SIGMA[2],
    "alpha1": _ALPHA[0],
    "alpha2": _ALPHA[1],
    "alpha3": _ALPHA[2],
    "beta": _BETA,
    "gamma1": _GAMMA[0],
    "gamma2": _GAMMA[1],
    "gamma3": _GAMMA[2],
    "kappa1": _KAPPA[0],
    "kappa2": _KAPPA[1],
    "kappa3": _KAPPA[2],
    "delta": _DELTA,
    "identity2": _ID2,
    "identity4": _ID4,
}

GENERATOR_KINDS = tuple(_GENERATORS)


@dataclass(frozen=True)
class PauliVector:
    """Coefficients (c0, v) of c0 * 1 + v . sigma (or v . kappa in 4x4)."""

    c0: complex
    v: tuple

    def __post_init__(self):
        v = tuple(complex(c) for c in self.v)
        if len(v) != 3:
            raise ValueError("v must have exactly three components")
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in v):
            raise ValueError("v must be finite")
        c0 = complex(self.c0)
        if not (math.isfinite(c0.real) and math.isfinite(c0.imag)):
            raise ValueError("c0 must be finite")
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "v", v)

    def as_mat2(self) -> Mat2:
        return self.c0 * _ID2 + pauli_sqrt_identity(self.v)


def generators(kind: str) -> np.ndarray:
    """Return a fresh copy of the named generator matrix.

    Kinds: sigma1..3 (2x2 Pauli), alpha1..3 / beta / gamma1..3 (4x4 Dirac,
    gamma_k = beta alpha_k), kappa1..3 / delta (the non-Hermitian variant:
    kappa1 = -alpha3, kappa2 = alpha1, kappa3 = beta, delta^2 = -1),
    identity2 / identity4.
    """
    try:
        return _GENERATORS[kind].copy()
    except KeyError:
        raise ValueError(
            f"unknown generator kind {kind!r}; expected one of {GENERATOR_KINDS}"
        ) from None


def _vec3(v: Sequence[complex]) -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.shape != (3,):
        raise ValueError("expected a 3-sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("components must be finite")
    return arr


def pauli_sqrt_identity(v: Sequence[complex]) -> Mat2:
    """N = sigma . v, which squares to (v1^2 + v2^2 + v3^2) * 1.

    The scalar is the *algebraic* sum of squares (no conjugation), so it is
    complex in general; this is what makes N a matrix square root of
    v . v.
    """
    arr = _vec3(v)
    return arr[0] * _SIGMA[0] + arr[1] * _SIGMA[1] + arr[2] * _SIGMA[2]


def exp_pauli(y: complex, v: Sequence[complex]) -> Mat2:
    """Closed-form exponential e^{y (sigma . v)}.

    With N^2 = (v . v) 1 the series collapses to
    cosh(y N) 1 + sinh(y N)/N * (sigma . v), where N = sqrt(v . v) on any
    branch (both coefficient functions are even). N = 0 degenerates to
    1 + y (sigma . v).

    The two-component first-order form of the sqrt(1 - d^2) flow is the
    preset ``exp_pauli(-tau, (1j * k, 0, 1))``: the Fourier-symbol
    exponential e^{-tau (sigma3 + i k sigma1)}.
    """
    mat = pauli_sqrt_identity(v)
    n2 = complex(np.asarray(v, dtype=complex) @ np.asarray(v, dtype=complex))
    n = np.sqrt(n2)
    y = complex(y)
    if n == 0:
        return _ID2 + y * mat
    return np.cosh(y * n) * _ID2 + (np.sinh(y * n) / n) * mat


def dirac2_evolution(pi: float, tau: float) -> Mat2:
    """Two-component evolution U(tau) = e^{-i tau (sigma1 pi + sigma3)}.

    Closed form cos(E tau) 1 - i sin(E tau)/E (sigma1 pi + sigma3) with
    E = sqrt(1 + pi^2); unitary for real arguments.
    """
    e = math.sqrt(1.0 + pi * pi)
    h = pi * _SIGMA[0] + _SIGMA[2]
    return math.cos(e * tau) * _ID2 - 1j * (math.sin(e * tau) / e) * h


def bloch_evolve(
    sigma0: Sequence[float], pi: float, tau: float, dt: float
) -> np.ndarray:
    """Integrate the precession dsigma/dt = Omega x sigma, Omega = 2(pi, 0, 1).

    Fixed-step classical Runge-Kutta from 0 to tau (step count
    ceil(tau/dt)); the motion is an exact rotation about Omega, so |sigma|
    is conserved up to the integrator's O(dt^4) error.
    """
    s = np.asarray(sigma0, dtype=float)
    if s.shape != (3,):
        raise ValueError("sigma0 must be a 3-sequence")
    if float(np.linalg.norm(s)) == 0.0:
        raise ValueError("sigma0 must be nonzero")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if tau == 0:
        return s.copy()
    if dt > tau:
        raise ValueError("dt must not exceed tau")
    omega = np.array([2.0 * pi, 0.0, 2.0])
    steps = math.ceil(tau / dt)
    h = tau / steps
    for _ in range(steps):
        k1 = np.cross(omega, s)
        k2 = np.cross(omega, s + 0.5 * h * k1)
        k3 = np.cross(omega, s + 0.5 * h * k2)
        k4 = np.cross(omega, s + h * k3)
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return s


def dirac4_evolution(pi: Sequence[float], tau: float) -> Mat4:
    """Four-component evolution U(tau) = e^{-i tau (alpha . pi + beta)}.

    Since H = alpha . pi + beta satisfies H^2 = (1 + pi^2) 1, the
    exponential is cos(E tau) 1 - i sin(E tau)/E H with E = sqrt(1 + pi^2).
    """
    p = np.asarray(pi, dtype=float)
    if p.shape != (3,):
        raise ValueError("pi must be a 3-sequence")
    h = p[0] * _ALPHA[0] + p[1] * _ALPHA[1] + p[2] * _ALPHA[2] + _BETA
    e = math.sqrt(1.0 + float(p @ p))
    return math.cos(e * tau) * _ID4 - 1j * (math.sin(e * tau) / e) * h


POSITION_PARAMETRIZATIONS = ("dirac", "beta_diagonal")


def position_evolution(pi: float, tau: float, parametrization: str = "dirac") -> Mat4:
    """Heisenberg position displacement eta(tau) - eta(0) at momentum pi
    (1D motion along x).

    ``dirac``: tau pi H^{-1} + (i/2) H^{-1} (alpha1 - pi H^{-1})
    (1 - e^{-2 i tau H}), with H = alpha1 pi + beta and H^{-1} = H/(1+pi^2).
    The first term is the classical drift; the second is the Zitterbewegung
    oscillation between the energy branches. Because (alpha1 - pi H^{-1})
    anticommutes with H, the sign of the exponent depends on which side the
    oscillating factor is written; the convention here is the one whose
    tau-derivative equals the Heisenberg velocity U(tau)^dag alpha1 U(tau).

    ``beta_diagonal``: the interference-free parametrization, a pure
    two-branch drift tau beta pi / sqrt(1 + pi^2).
    """
    if parametrization not in POSITION_PARAMETRIZATIONS:
        raise ValueError(
            f"unknown parametrization {parametrization!r}; "
            f"expected one of {POSITION_PARAMETRIZATIONS}"
        )
    e2 = 1.0 + pi * pi
    e = math.sqrt(e2)
    if parametrization == "beta_diagonal":
        return (tau * pi / e) * _BETA
    h = pi * _ALPHA[0] + _BETA
    h_inv = h / e2
    evol = math.cos(2.0 * tau * e) * _ID4 - 1j * (math.sin(2.0 * tau * e) / e) * h
    return tau * pi * h_inv + 0.5j * h_inv @ (_ALPHA[0] - pi * h_inv) @ (_ID4 - evol)


def sqrt_symbol_check(k: float) -> Mat4:
    """Fourier symbol M(k) of the operator square root i alpha . grad/sqrt(3) + beta
    specialised to a plane wave: M(k) = -(k/sqrt(3))(alpha1+alpha2+alpha3) + beta.

    Squares to (1 + k^2) 1 because (alpha1+alpha2+alpha3)^2 = 3 and the
    cross terms with beta cancel.
    """
    return (-k / math.sqrt(3.0)) * (_ALPHA[0] + _ALPHA[1] + _ALPHA[2]) + _BETA


KAPPA_VARIANTS = ("i_delta", "plain_delta")


def kappa_parametrization(
    w: Sequence[float], r: float, variant: str = "i_delta"
) -> Mat4:
    """Non-Hermitian square-root parametrization over the kappa/delta set.

    ``i_delta``:    N = kappa . w + i delta r,  N^2 = (w^2 + r^2) 1.
    ``plain_delta``: N = kappa . w + delta r,   N^2 = (w^2 - r^2) 1 —
    which reaches sqrt(-1) (w = 0) and even the nilpotent square root of
    the zero matrix (w^2 = r^2).
    """
    if variant not in KAPPA_VARIANTS:
        raise ValueError(
            f"unknown variant {variant!r}; expected one of {KAPPA_VARIANTS}"
        )
    arr = np.asarray(w, dtype=float)
    if arr.shape != (3,):
        raise ValueError("w must be a 3-sequence")
    n = arr[0] * _KAPPA[0] + arr[1] * _KAPPA[1] + arr[2] * _KAPPA[2]
    if variant == "i_delta":
        return n + 1j * r * _DELTA
    return n + r * _DELTA


def pauli_line_power(a: float, b: float, p: float) -> Mat2:
    """Power R^p of the positive-definite line matrix R = a 1 + b sigma1.

    Eigenprojection form:
    R^p = [(a-b)^p (1 - sigma1) + (a+b)^p (1 + sigma1)] / 2.
    Requires a > |b| so both eigenvalues a -+ b are positive and every real
    power is unambiguous.
    """
    if not a > abs(b):
        raise ValueError("pauli_line_power requires a > |b| (positive definite)")
    lo = (a - b) ** p
    hi = (a + b) ** p
    return 0.5 * (lo * (_ID2 - _SIGMA[0]) + hi * (_ID2 + _SIGMA[0]))
