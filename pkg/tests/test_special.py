"""Hermite polynomials, Bessel J0/K0, and the integration engines."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudoflow import (
    ConvergenceError,
    QuadratureConfig,
    bessel,
    hermite2,
    integrate_halfline,
    integrate_realline,
)

SQRT_PI = math.sqrt(math.pi)

# Independent evaluation of int_0^inf e^{-cosh t} dt (scipy.integrate.quad,
# reported error 1.4e-8); K0(1) must match it.
K0_ONE_INTEGRAL = 4.210244382406774e-01
# First positive zero of J0, from bisection against the power series.
J0_FIRST_ROOT = 2.404825557695773


# ----------------------------------------------------------------------
# hermite2


def _hermite2_sum(n, x, y):
    # defining sum, written via binomial coefficients rather than the
    # factorial ratio the library uses
    total = 0.0
    for k in range(n // 2 + 1):
        coeff = math.comb(n, 2 * k) * math.factorial(2 * k) // math.factorial(k)
        total += coeff * x ** (n - 2 * k) * y**k
    return total


def test_hermite2_order_zero_is_one():
    assert hermite2(0, 3.0, 2.0) == 1.0


def test_hermite2_quadratic():
    # H_2(x, y) = x^2 + 2y
    assert hermite2(2, 3.0, 2.0) == 13.0
    assert hermite2(2, -1.5, 0.25) == pytest.approx(2.75, abs=1e-14)


def test_hermite2_matches_defining_sum():
    got = hermite2(6, 1.7, -0.4)
    want = _hermite2_sum(6, 1.7, -0.4)
    assert got == pytest.approx(want, rel=1e-13)
    assert got == pytest.approx(-0.535631, abs=1e-12)


def test_hermite2_recurrence_switchover_consistent():
    """The n > 20 recurrence path must continue the n <= 20 sum path."""
    # exact integer arithmetic for the defining sum at integer arguments
    n, x, y = 25, 3, 2
    exact = sum(
        math.factorial(n)
        // (math.factorial(n - 2 * k) * math.factorial(k))
        * x ** (n - 2 * k)
        * y**k
        for k in range(n // 2 + 1)
    )
    assert hermite2(n, float(x), float(y)) == pytest.approx(float(exact), rel=1e-11)


@settings(max_examples=200, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=50),
    x=st.floats(min_value=-5, max_value=5),
    y=st.floats(min_value=-5, max_value=5),
)
def test_hermite2_recurrence(n, x, y):
    lhs = hermite2(n + 1, x, y)
    rhs = x * hermite2(n, x, y) + 2.0 * y * n * hermite2(n - 1, x, y)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs), abs(rhs))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_hermite2_gaussian_derivative_identity(n):
    """d^n/dx^n e^{a x^2} equals H_n(2ax, a) e^{a x^2}."""
    a, x = 0.3, 0.7

    def f(z):
        return math.exp(a * z * z)

    def fd(h):
        if n == 1:
            return (f(x + h) - f(x - h)) / (2 * h)
        if n == 2:
            return (f(x + h) - 2 * f(x) + f(x - h)) / h**2
        if n == 3:
            return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (
                2 * h**3
            )
        return (
            f(x + 2 * h) - 4 * f(x + h) + 6 * f(x) - 4 * f(x - h) + f(x - 2 * h)
        ) / h**4

    h = 0.02
    richardson = (4.0 * fd(h / 2) - fd(h)) / 3.0
    want = hermite2(n, 2 * a * x, a) * f(x)
    assert abs(richardson - want) <= 1e-6 * max(1.0, abs(want))


def test_hermite2_rejects_bad_orders():
    with pytest.raises(ValueError):
        hermite2(-1, 1.0, 1.0)
    with pytest.raises(ValueError):
        hermite2(2.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        hermite2(True, 1.0, 1.0)
    with pytest.raises(OverflowError):
        hermite2(1001, 0.1, 0.1)


def test_hermite2_rejects_nonfinite_arguments():
    with pytest.raises(ValueError):
        hermite2(3, math.inf, 0.0)
    with pytest.raises(ValueError):
        hermite2(3, 0.0, math.nan)


def test_hermite2_accepts_large_orders():
    # the documented range guarantee: orders up to a few hundred evaluate
    # without tripping the factorial overflow of the defining sum
    assert math.isfinite(hermite2(200, 0.1, -0.2))
    hermite2(1000, 0.1, -0.2)  # accepted even where the value saturates


# ----------------------------------------------------------------------
# bessel


def test_j0_at_zero():
    assert bessel("J0", 0.0) == 1.0


def _j0_series(x):
    # power series sum((-x^2/4)^k / (k!)^2); plenty for |x| < 4
    term, total = 1.0, 1.0
    for k in range(1, 40):
        term *= -(x * x) / 4.0 / (k * k)
        total += term
    return total


def test_j0_first_root():
    lo, hi = 2.0, 3.0
    assert bessel("J0", lo) > 0 > bessel("J0", hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if bessel("J0", mid) > 0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    assert root == pytest.approx(J0_FIRST_ROOT, abs=1e-10)
    assert abs(_j0_series(root)) <= 1e-10


def test_j0_matches_power_series():
    for x in (0.3, 1.0, 2.4, 3.7):
        assert bessel("J0", x) == pytest.approx(_j0_series(x), abs=1e-12)


def test_j0_satisfies_bessel_equation():
    """|x f'' + f' + x f| small by high-order finite differences."""
    h = 5e-3
    for x in np.linspace(0.5, 20.0, 40):
        f = [bessel("J0", x + m * h) for m in (-2, -1, 0, 1, 2)]
        d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
        d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        assert abs(x * d2 + d1 + x * f[2]) <= 1e-8


def test_k0_matches_integral_representation():
    assert bessel("K0", 1.0) == pytest.approx(K0_ONE_INTEGRAL, abs=5e-8)


def test_k0_integral_recomputed_in_process():
    cfg = QuadratureConfig(halfline_rule="adaptive_subdivision")
    res = integrate_halfline(
        lambda t: math.exp(-math.cosh(t)) if t < 700.0 else 0.0, cfg
    )
    assert bessel("K0", 1.0) == pytest.approx(res.value.real, abs=1e-9)


def test_k0_domain_errors():
    with pytest.raises(ValueError):
        bessel("K0", 0.0)
    with pytest.raises(ValueError):
        bessel("K0", -1.0)


def test_bessel_unknown_kind():
    with pytest.raises(ValueError, match="J0"):
        bessel("Y0", 1.0)


def test_bessel_nonfinite_argument():
    with pytest.raises(ValueError):
        bessel("J0", math.inf)


# ----------------------------------------------------------------------
# half-line integration


def test_halfline_exponential():
    res = integrate_halfline(lambda s: math.exp(-s))
    assert res.value.real == pytest.approx(1.0, rel=1e-10)
    assert res.value.imag == 0.0
    assert res.error <= 1e-8
    assert complex(res) == res.value


def test_halfline_gamma_three_halves():
    # sqrt(s) kinks at the origin, so this goes to the adaptive rule
    cfg = QuadratureConfig(halfline_rule="adaptive_subdivision")
    res = integrate_halfline(lambda s: math.sqrt(s) * math.exp(-s), cfg)
    assert res.value.real == pytest.approx(SQRT_PI / 2.0, rel=1e-10)


@pytest.mark.parametrize("rule", ["inverse_square_substitution", "adaptive_subdivision"])
def test_halfline_subordination_kernel_normalization(rule):
    # int_0^inf t^{-3/2} e^{-1/(4t)} dt = 2 sqrt(pi); singular at t = 0
    cfg = QuadratureConfig(halfline_rule=rule)
    res = integrate_halfline(lambda t: t**-1.5 * math.exp(-0.25 / t), cfg)
    assert res.value.real == pytest.approx(2 * SQRT_PI, rel=1e-9)


def test_halfline_laguerre_rejects_singular_kernel():
    # same integrand as above: the Laguerre ladder cannot see the t -> 0
    # essential region and must admit it rather than return garbage
    with pytest.raises(ConvergenceError) as exc_info:
        integrate_halfline(lambda t: t**-1.5 * math.exp(-0.25 / t - t * t))
    assert exc_info.value.error_bound is None or exc_info.value.error_bound > 0


def test_halfline_inverse_square_rejects_slow_tail():
    # e^{-s} has no t -> 0 decay after the substitution; the rule refuses
    cfg = QuadratureConfig(halfline_rule="inverse_square_substitution")
    with pytest.raises(ConvergenceError):
        integrate_halfline(lambda s: math.exp(-s), cfg)


def test_halfline_complex_integrand():
    res = integrate_halfline(lambda s: (1 + 2j) * math.exp(-s))
    assert res.value == pytest.approx(1 + 2j, rel=1e-10)


@pytest.mark.parametrize(
    "rule", ["gauss_laguerre", "adaptive_subdivision", "inverse_square_substitution"]
)
def test_halfline_deterministic(rule):
    cfg = QuadratureConfig(halfline_rule=rule)

    def f(t):
        if rule == "inverse_square_substitution":
            return t**-1.5 * math.exp(-0.25 / t)
        return math.cos(t) * math.exp(-t)

    first = integrate_halfline(f, cfg)
    second = integrate_halfline(f, cfg)
    assert first.value == second.value
    assert first.error == second.error


# ----------------------------------------------------------------------
# real-line integration


def test_realline_gaussian():
    res = integrate_realline(lambda x: math.exp(-x * x))
    assert res.value.real == pytest.approx(SQRT_PI, rel=1e-10)


def test_realline_gaussian_second_moment():
    res = integrate_realline(lambda x: x * x * math.exp(-x * x))
    assert res.value.real == pytest.approx(SQRT_PI / 2.0, rel=1e-10)


@pytest.mark.parametrize("rule", ["gauss_hermite", "truncated_adaptive"])
def test_realline_translated_gaussian(rule):
    cfg = QuadratureConfig(realline_rule=rule)
    res = integrate_realline(lambda x: math.exp(-0.5 * (x - 3.0) ** 2), cfg)
    assert res.value.real == pytest.approx(math.sqrt(2 * math.pi), rel=1e-9)


@pytest.mark.parametrize("rule", ["gauss_hermite", "truncated_adaptive"])
def test_realline_deterministic(rule):
    cfg = QuadratureConfig(realline_rule=rule)
    first = integrate_realline(lambda x: math.exp(-x * x) * math.cos(x), cfg)
    second = integrate_realline(lambda x: math.exp(-x * x) * math.cos(x), cfg)
    assert first.value == second.value
    assert first.error == second.error


# ----------------------------------------------------------------------
# configuration validation


def test_config_rejects_unknown_rules():
    with pytest.raises(ValueError, match="halfline_rule"):
        QuadratureConfig(halfline_rule="simpson")
    with pytest.raises(ValueError, match="realline_rule"):
        QuadratureConfig(realline_rule="simpson")


def test_config_rejects_tiny_orders():
    with pytest.raises(ValueError):
        QuadratureConfig(halfline_order=1)
    with pytest.raises(ValueError):
        QuadratureConfig(realline_order=0)


def test_config_rejects_zero_tolerances():
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=0.0, rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=-1e-12)


def test_config_rejects_zero_refinements():
    with pytest.raises(ValueError):
        QuadratureConfig(max_refinements=0)
