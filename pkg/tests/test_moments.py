import warnings

import mpmath
import pytest
from mpmath import mpf

from besselmoments import (
    DomainError,
    IntegrandFamily,
    M,
    MomentSpec,
    NestedSpec,
    PrecisionContext,
    Tail,
    VerificationRecord,
    i_rho2_alpha6,
    moment,
    nested_zeta,
    trigamma,
    zeta,
    zeta_log_integral,
    zeta_tilde,
)
from besselmoments.cache import MomentStore
from besselmoments.kernels import integrand_function
from besselmoments.moments import _borwein_d, attach_store, clear_memory
from besselmoments.quadrature import integrate_semi_infinite


@pytest.mark.parametrize("s", range(2, 13))
def test_zeta_against_mpmath(s):
    ctx = PrecisionContext(60)
    with ctx.workdps():
        assert abs(zeta(s, ctx) - mpmath.zeta(s)) < mpf(10) ** -(ctx.working_digits - 2)


def test_zeta_closed_forms(ctx30):
    with ctx30.workdps():
        assert abs(zeta(2, ctx30) - mpmath.pi ** 2 / 6) < mpf(10) ** -60
        assert abs(zeta(4, ctx30) - mpmath.pi ** 4 / 90) < mpf(10) ** -60


@pytest.mark.parametrize("s", [1, 0, -3, 2.5, True])
def test_zeta_domain(s, ctx20):
    with pytest.raises(DomainError):
        zeta(s, ctx20)


def test_borwein_weights_are_integers():
    d = _borwein_d(10)
    assert d[0] == 1 and all(isinstance(x, int) for x in d)
    assert d == sorted(d)


def test_trigamma(ctx30):
    with ctx30.workdps():
        assert abs(trigamma("0.5", ctx30) - mpmath.pi ** 2 / 2) < mpf(10) ** -60
        # psi1(1/4) = pi^2 + 8 G
        assert abs(trigamma(mpf(1) / 4, ctx30) - mpmath.pi ** 2 - 8 * mpmath.catalan) < mpf(10) ** -60
    with pytest.raises(DomainError):
        trigamma(2, ctx30)


@pytest.mark.parametrize("n", range(2, 7))
def test_zeta_log_integral(n, ctx30):
    with ctx30.workdps():
        expect = mpf(2 ** n - 1) / 2 ** (n - 1) * mpmath.zeta(n)
        assert abs(zeta_log_integral(n, ctx30) - expect) < mpf(10) ** -33
    with pytest.raises(DomainError):
        zeta_log_integral(1, ctx30)


def test_simple_moments(ctx30):
    with ctx30.workdps():
        assert abs(moment(MomentSpec(1, 1), ctx30) - 1) < mpf(10) ** -33
        assert abs(M(2, 1, ctx30) - mpf(1) / 2) < mpf(10) ** -33
        assert abs(M(4, 1, ctx30) - 7 * mpmath.zeta(3) / 8) < mpf(10) ** -33
        assert abs(moment(MomentSpec(1, 3, 0, 1, 0), ctx30) - mpmath.pi ** 2 / 16) < mpf(10) ** -33


@pytest.mark.parametrize("spec", [MomentSpec(1, 4), MomentSpec(1, 2, 2), MomentSpec(1, 1, 2, 1, 0),
                                  MomentSpec(3, 2, 1, 0, 1), MomentSpec(5, 3, 1, 1, 1)])
def test_moments_against_mpmath_quad(spec):
    ctx = PrecisionContext(20)
    with ctx.workdps():
        def f(u):
            k0, k1, i0, i1 = (mpmath.besselk(0, u), mpmath.besselk(1, u),
                              mpmath.besseli(0, u), mpmath.besseli(1, u))
            return u ** spec.p * k0 ** spec.a * (u * k1) ** spec.b * i0 ** spec.c * (u * i1) ** spec.d
        ref = mpmath.quad(f, [0, 1, 4, 16, 64])
        got = moment(spec, ctx)
        assert got > 0
        assert abs(got - ref) < mpf(10) ** -18 * abs(ref)


def test_moment_cache_paths(tmp_path, ctx20):
    clear_memory()
    fresh = moment(MomentSpec(3, 3), ctx20, use_cache=False)
    store = MomentStore(tmp_path)
    attach_store(store)
    try:
        first = moment(MomentSpec(3, 3), ctx20)
        clear_memory()
        again = moment(MomentSpec(3, 3), ctx20)
    finally:
        attach_store(None)
    assert first._mpf_ == fresh._mpf_ == again._mpf_
    assert len(MomentStore(tmp_path)) == 1


def test_store_skips_corrupt_lines(tmp_path):
    store = MomentStore(tmp_path)
    with mpmath.workdps(40):
        store.put("1;4,0,0,0", 10, 40, mpf(1) / 7)
    with open(store.path, "a") as fh:
        fh.write("garbage line\n1;2,0,0,0\tten\t40\t0.5\n")
    with pytest.warns(UserWarning, match="corrupt"):
        fresh = MomentStore(tmp_path)
        assert len(fresh) == 1
    with mpmath.workdps(40):
        assert fresh.get("1;4,0,0,0", 10, 40) == mpf(1) / 7
    assert fresh.get("1;4,0,0,0", 11, 40) is None


def test_store_ignores_unterminated_tail(tmp_path):
    store = MomentStore(tmp_path)
    store.directory.mkdir(exist_ok=True)
    store.path.write_text("1;4,0,0,0\t10\t40\t0.33")
    assert len(store) == 0
    with open(store.path, "a") as fh:
        fh.write("3\n")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert len(store) == 1


F1, F3, G1, G3 = (IntegrandFamily(k, n) for k, n in (("F", 1), ("F", 3), ("G", 1), ("G", 3)))


def test_nested_routes_agree():
    ctx = PrecisionContext(20)
    spec = NestedSpec(F3, G1)
    with ctx.workdps():
        a = nested_zeta(spec, ctx, method="sinc")
        b = nested_zeta(spec, ctx, method="adaptive")
        assert abs(a - b) < mpf(10) ** -22


def test_nested_against_mpmath_double_quad():
    ctx = PrecisionContext(12)
    with mpmath.workdps(15):
        f = lambda u: u * mpmath.besselk(0, u) ** 2 * mpmath.besselk(1, u) ** 2
        g = lambda x: x ** 3 * mpmath.besselk(1, x) * mpmath.besseli(1, x) * mpmath.besselk(0, x) ** 2
        ref = mpmath.quad(lambda u: f(u) * mpmath.quad(g, [0, u]), [0, 1, 4, 30])
    with ctx.workdps():
        assert abs(zeta_tilde(1, 3, ctx) - ref) < mpf(10) ** -13


def _family_integral(fam, ctx):
    return integrate_semi_infinite(integrand_function(fam, ctx), ctx, mpf(10) ** -(ctx.target_digits + 3)).value


# f_1 ~ log(x)^2 / x at 0, so zeta~(g, f_1) diverges; valid pairs need n >= 3
@pytest.mark.parametrize("n,m", [(3, 1), (3, 3), (5, 1), (3, 5)])
def test_bessel_shuffle(n, m):
    # zeta~(f, g) + zeta~(g, f) = (int f)(int g)
    ctx = PrecisionContext(20)
    f, g = IntegrandFamily("F", n), IntegrandFamily("G", m)
    with ctx.workdps():
        lhs = nested_zeta(NestedSpec(f, g), ctx) + nested_zeta(NestedSpec(g, f), ctx)
        rhs = _family_integral(f, ctx) * _family_integral(g, ctx)
        assert abs(lhs - rhs) < mpf(10) ** -21


def test_upper_tail_is_swapped(ctx20):
    upper = NestedSpec(G1, F3, Tail.UPPER)
    assert upper.lowered() == NestedSpec(F3, G1, Tail.LOWER)
    with ctx20.workdps():
        assert nested_zeta(upper, ctx20) == nested_zeta(NestedSpec(F3, G1), ctx20)


def test_i_rho2_alpha6_forms_agree():
    ctx = PrecisionContext(25)
    with ctx.workdps():
        a = i_rho2_alpha6(ctx, "original")
        b = i_rho2_alpha6(ctx, "rewritten")
        assert abs(a - b) < mpf(10) ** -28
    with pytest.raises(ValueError):
        i_rho2_alpha6(ctx, "folded")


def test_record_json_round_trip(ctx20):
    with ctx20.workdps():
        rec = VerificationRecord.compare("x", mpf(1) / 3, mpf(1) / 3 + mpf(10) ** -30, 20, 12.7)
    assert rec.passed and rec.runtime_ms == 12
    data = rec.to_json()
    assert all(isinstance(data[k], str) for k in ("lhs", "rhs", "abs_diff"))
    back = VerificationRecord.from_json(data)
    assert back.to_json() == data
    with ctx20.workdps():
        assert not VerificationRecord.compare("y", mpf(1), mpf(1) + mpf(10) ** -14, 20).passed
