import math
import subprocess
import sys

import mpmath
import numpy as np
import pytest
from mpmath import mpf

from besselmoments import AccuracyError, PrecisionContext, UnsupportedDimensionError
from besselmoments.quadrature import (
    FLOAT_MIN_TOL,
    cumulative_inner,
    integrate_finite,
    integrate_nested,
    integrate_semi_infinite,
    integrate_simplex,
    integrate_simplex_float,
)


def tol_of(ctx, extra=3):
    return mpf(10) ** -(ctx.target_digits + extra)


@pytest.fixture
def ctx():
    return PrecisionContext(40)


@pytest.mark.parametrize("f,lo,hi,exact", [
    (lambda x: mpmath.log(x) ** 2, 0, 1, lambda: mpf(2)),
    (lambda x: mpmath.sin(x), 0, mpmath.pi, lambda: mpf(2)),
    (lambda x: mpmath.log(1 - x) / x, 0, 1, lambda: -mpmath.pi ** 2 / 6),
    (lambda x: 1 / (1 + x * x), -1, 3, lambda: mpmath.atan(3) + mpmath.pi / 4),
])
def test_finite_with_endpoint_singularities(ctx, f, lo, hi, exact):
    with ctx.workdps():
        r = integrate_finite(f, lo, hi, ctx, tol_of(ctx))
        assert abs(r.value - exact()) < tol_of(ctx, 0)
        assert r.error_estimate <= tol_of(ctx)
        assert r.levels_used >= 2


def test_algebraic_singularity_within_half_working_precision():
    ctx = PrecisionContext(20)   # 54 working digits, half of which covers the target
    with ctx.workdps():
        r = integrate_finite(lambda x: 1 / mpmath.sqrt(x), 0, 1, ctx, tol_of(ctx))
        assert abs(r.value - 2) < tol_of(ctx, 0)


@pytest.mark.parametrize("f,exact", [
    (lambda x: x ** 3 * mpmath.exp(-x), lambda: mpf(6)),
    (lambda x: mpmath.log(x) * mpmath.exp(-x), lambda: -mpmath.euler),
    (lambda x: mpmath.exp(-3 * x) / mpmath.sqrt(x), lambda: mpmath.sqrt(mpmath.pi / 3)),
])
def test_semi_infinite(ctx, f, exact):
    with ctx.workdps():
        r = integrate_semi_infinite(f, ctx, tol_of(ctx))
        assert abs(r.value - exact()) < tol_of(ctx, 0)


def test_semi_infinite_shifted_and_scaled(ctx):
    with ctx.workdps():
        r = integrate_semi_infinite(lambda x: mpmath.exp(-x / 4), ctx, tol_of(ctx), lo=2, scale=4)
        assert abs(r.value - 4 * mpmath.exp(-mpf(1) / 2)) < tol_of(ctx, 0)


def test_matches_mpmath_quad_oracle():
    ctx = PrecisionContext(25)
    f = lambda x: x * mpmath.besselk(0, x) ** 2 * mpmath.exp(-x)
    with ctx.workdps():
        ours = integrate_semi_infinite(f, ctx, tol_of(ctx)).value
        ref = mpmath.quad(f, [0, 1, mpmath.inf])
        assert abs(ours - ref) < mpf(10) ** -25


def test_no_convergence_raises():
    ctx = PrecisionContext(20, max_refinement=3)
    with ctx.workdps():
        with pytest.raises(AccuracyError) as info:
            integrate_finite(lambda x: mpmath.sin(1 / x) / x, 0, 1, ctx, tol_of(ctx))
    assert info.value.best is not None


def test_cumulative_inner(ctx):
    with ctx.workdps():
        for u in ("0.5", "3", "40"):
            u = mpf(u)
            got = cumulative_inner(lambda x: mpmath.exp(-2 * x), u, ctx, tol_of(ctx))
            assert abs(got - (1 - mpmath.exp(-2 * u)) / 2) < tol_of(ctx, 0)


# int_0^inf e^{-a u} int_0^u e^{-b x} dx du = 1 / (a (a + b))
PAIRS = [(1, 1), (2, 1), (1, 3), (4, 2), (3, 5)]


@pytest.mark.parametrize("method", ["sinc", "adaptive"])
@pytest.mark.parametrize("a,b", PAIRS)
def test_nested_exponential_pairs(a, b, method):
    ctx = PrecisionContext(25)
    with ctx.workdps():
        f = lambda u: mpmath.exp(-a * u)
        g = lambda x: mpmath.exp(-b * x)
        r = integrate_nested(f, g, ctx, tol_of(ctx), method=method)
        assert abs(r.value - mpf(1) / (a * (a + b))) < tol_of(ctx, 0)


@pytest.mark.parametrize("a,b", PAIRS)
def test_shuffle_on_exponential_pairs(a, b):
    ctx = PrecisionContext(30)
    with ctx.workdps():
        f = lambda u: mpmath.exp(-a * u)
        g = lambda x: mpmath.exp(-b * x)
        fg = integrate_nested(f, g, ctx, tol_of(ctx)).value
        gf = integrate_nested(g, f, ctx, tol_of(ctx)).value
        assert abs(fg + gf - mpf(1) / (a * b)) < tol_of(ctx, 0)


def test_nested_routes_agree_on_log_singular_pair():
    # inner integrand with a log singularity at 0, outer polynomial-exponential
    ctx = PrecisionContext(20)
    with ctx.workdps():
        f = lambda u: u * mpmath.exp(-u)
        g = lambda x: -mpmath.log(x) * mpmath.exp(-x)
        s = integrate_nested(f, g, ctx, tol_of(ctx), method="sinc").value
        a = integrate_nested(f, g, ctx, tol_of(ctx), method="adaptive").value
        ref = mpmath.quad(lambda u: f(u) * mpmath.quad(g, [0, u]), [0, 1, 10, mpmath.inf])
        assert abs(s - a) < tol_of(ctx, 0)
        assert abs(s - ref) < mpf(10) ** -15


def test_nested_unknown_method(ctx):
    with pytest.raises(ValueError):
        integrate_nested(mpmath.exp, mpmath.exp, ctx, 1e-10, method="midpoint")


@pytest.mark.parametrize("m", [1, 2, 3])
def test_simplex_volume_and_moments(m):
    ctx = PrecisionContext(20)
    with ctx.workdps():
        vol = integrate_simplex(lambda x, s: mpf(1), m, ctx, tol_of(ctx)).value
        assert abs(vol - mpf(1) / math.factorial(m)) < tol_of(ctx, 0)
        # Dirichlet integral of the slack: int s dx = 1/(m+1)!
        lin = integrate_simplex(lambda x, s: s, m, ctx, tol_of(ctx)).value
        assert abs(lin - mpf(1) / math.factorial(m + 1)) < tol_of(ctx, 0)


def test_simplex_with_face_singularity():
    # int over the triangle of (x y s)^{-1/2} = Gamma(1/2)^3 / Gamma(3/2) = 2 pi
    ctx = PrecisionContext(20)
    with ctx.workdps():
        r = integrate_simplex(lambda x, s: 1 / mpmath.sqrt(x[0] * x[1] * s), 2, ctx, tol_of(ctx))
        assert abs(r.value - 2 * mpmath.pi) < tol_of(ctx, 0)


def test_simplex_dimension_cap(ctx):
    with pytest.raises(UnsupportedDimensionError):
        integrate_simplex(lambda x, s: mpf(1), 5, ctx, 1e-10)
    with pytest.raises(UnsupportedDimensionError):
        integrate_simplex_float(lambda x, s: s, 5, 1e-8)
    with pytest.raises(ValueError):
        integrate_simplex(lambda x, s: mpf(1), 0, ctx, 1e-10)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_float_simplex(m):
    r = integrate_simplex_float(lambda x, s: np.ones_like(s), m, 1e-11)
    assert abs(float(r.value) - 1 / math.factorial(m)) < 1e-11
    r = integrate_simplex_float(lambda x, s: 1 / np.sqrt(x[0] * s), m, 1e-9)
    # Dirichlet: Gamma(1/2)^2 Gamma(1)^(m-1) / Gamma(m)
    exact = math.pi / math.gamma(m)
    assert abs(float(r.value) - exact) < 1e-9


def test_float_simplex_rejects_tight_tolerance():
    with pytest.raises(ValueError):
        integrate_simplex_float(lambda x, s: s, 2, FLOAT_MIN_TOL / 10)


def test_bit_identical_reruns():
    ctx = PrecisionContext(30)
    with ctx.workdps():
        f = lambda u: u * mpmath.besselk(0, u) ** 3
        a = integrate_semi_infinite(f, ctx, tol_of(ctx))
        b = integrate_semi_infinite(f, ctx, tol_of(ctx))
        assert a.value._mpf_ == b.value._mpf_ and a.error_estimate._mpf_ == b.error_estimate._mpf_
        g = lambda x: mpmath.exp(-x) / (1 + x)
        n1 = integrate_nested(f, g, ctx, tol_of(ctx)).value
        n2 = integrate_nested(f, g, ctx, tol_of(ctx)).value
        assert n1._mpf_ == n2._mpf_


def test_bit_identical_across_processes():
    code = ("from besselmoments import PrecisionContext, M, zeta_tilde; import mpmath;"
            "c = PrecisionContext(25); print(repr(M(4, 3, c)._mpf_), repr(zeta_tilde(3, 1, c)._mpf_))")
    outs = {subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True).stdout
            for _ in range(2)}
    assert len(outs) == 1
