import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mpf

from besselmoments import Combination, DomainError, IntegrandFamily, MomentSpec, PrecisionContext, bessel_set
from besselmoments.kernels import (
    bessel_i0_scaled,
    bessel_i1_scaled,
    bessel_k0,
    bessel_k1,
    eval_family,
    eval_moment_integrand,
    integrand_function,
    wronskian_defect,
    wronskian_grid,
)

POINTS = ["1e-8", "1e-3", "0.1", "0.5", "1", "2.75", "7", "15", "33.3", "60", "125", "400"]


def _rel(a, b):
    return abs(a - b) / abs(b)


@pytest.mark.parametrize("digits", [20, 50, 90])
@pytest.mark.parametrize("u", POINTS)
def test_against_mpmath(digits, u):
    ctx = PrecisionContext(digits)
    bs = bessel_set(u, ctx)
    with mpmath.workdps(ctx.working_digits + 30):
        x = mpf(u)
        ref = {
            "k0": mpmath.besselk(0, x), "k1": mpmath.besselk(1, x),
            "i0e": mpmath.besseli(0, x) * mpmath.exp(-x), "i1e": mpmath.besseli(1, x) * mpmath.exp(-x),
        }
        tol = mpf(10) ** (-(digits + 5))
        assert _rel(bs.k0, ref["k0"]) < tol
        assert _rel(bs.k1, ref["k1"]) < tol
        assert _rel(bs.i0e, ref["i0e"]) < tol
        assert _rel(bs.i1e, ref["i1e"]) < tol


@pytest.mark.parametrize("u", ["80", "150", "300"])
def test_series_and_asymptotic_branches_agree(u):
    ctx = PrecisionContext(20)
    a = bessel_set(u, ctx, method="series")
    b = bessel_set(u, ctx, method="asymptotic")
    with ctx.workdps():
        for x, y in zip(a[1:], b[1:]):
            assert _rel(x, y) < mpf(10) ** -25


def test_public_wrappers(ctx20):
    with ctx20.workdps():
        assert _rel(bessel_k0(1, ctx20), mpmath.besselk(0, 1)) < 1e-22
        assert _rel(bessel_k1(2, ctx20), mpmath.besselk(1, 2)) < 1e-22
        assert bessel_i0_scaled(0, ctx20) == 1
        assert bessel_i1_scaled(0, ctx20) == 0
        assert _rel(bessel_i1_scaled(3, ctx20), mpmath.besseli(1, 3) * mpmath.exp(-3)) < 1e-22


@pytest.mark.parametrize("bad", [0, -1, "-0.5"])
def test_domain(bad, ctx20):
    with pytest.raises(DomainError):
        bessel_set(bad, ctx20)


def test_unknown_method(ctx20):
    with pytest.raises(ValueError):
        bessel_set(1, ctx20, method="chebyshev")


def test_wronskian_grid(ctx30):
    u, worst = wronskian_grid(ctx30)
    assert worst < mpf(10) ** -(ctx30.target_digits + 5)
    assert abs(wronskian_defect("0.001", ctx30)) < mpf(10) ** -35


@given(st.integers(0, 9).map(lambda k: 2 * k + 1), st.integers(0, 6), st.integers(0, 6),
       st.integers(0, 3), st.integers(0, 3))
def test_moment_spec_key_round_trip(p, a, b, c, d):
    if a + b <= c + d:
        with pytest.raises(DomainError):
            MomentSpec(p, a, b, c, d)
        return
    spec = MomentSpec(p, a, b, c, d)
    assert MomentSpec.from_key(spec.key) == spec
    assert spec.decay_rate == a + b - c - d


@pytest.mark.parametrize("args,msg", [((2, 4), "odd"), ((1, 1, 0, 1), "diverges"), ((1, -1), "non-negative")])
def test_moment_spec_validation(args, msg):
    with pytest.raises(DomainError, match=msg):
        MomentSpec(*args)


def test_integrand_values(ctx30):
    with mpmath.workdps(ctx30.working_digits):
        u = mpf("1.25")
        k0, k1, i0, i1 = (mpmath.besselk(0, u), mpmath.besselk(1, u), mpmath.besseli(0, u), mpmath.besseli(1, u))
        ref = u ** 3 * k0 ** 2 * (u * k1) * i0 * (u * i1)
        assert _rel(eval_moment_integrand(MomentSpec(3, 2, 1, 1, 1), u, ctx30), ref) < 1e-33
        assert _rel(eval_family(IntegrandFamily("F", 3), u, ctx30), u ** 3 * k0 ** 2 * k1 ** 2) < 1e-33
        assert _rel(eval_family(IntegrandFamily("G", 1), u, ctx30), u * k1 * i1 * k0 ** 2) < 1e-33


def test_integrand_family_validation():
    with pytest.raises(DomainError):
        IntegrandFamily("H", 1)


def test_combination_linear(ctx20):
    a, b = MomentSpec(1, 1, 2, 1, 0), MomentSpec(1, 2, 1, 0, 1)
    combo = Combination(((1, a), (-1, b)))
    with ctx20.workdps():
        u = mpf(2)
        expect = eval_moment_integrand(a, u, ctx20) - eval_moment_integrand(b, u, ctx20)
        assert abs(integrand_function(combo, ctx20)(u) - expect) < mpf(10) ** -45


def test_integrand_cutoff(ctx20):
    f = integrand_function(MomentSpec(1, 4), ctx20)
    with ctx20.workdps():
        assert f(mpf(100)) == 0
        assert f(mpf(1)) > 0


def test_cache_is_keyed_by_precision():
    lo, hi = PrecisionContext(15), PrecisionContext(60)
    a = bessel_set("0.7", lo)
    b = bessel_set("0.7", hi)
    assert a.k0e._mpf_ != b.k0e._mpf_
    assert bessel_set("0.7", hi).k0e._mpf_ == b.k0e._mpf_
