"""Bessel moments as integrals of rational (times log) functions over simplices.

For ``n >= 3`` and ``p`` in ``{1, 3}`` the moment ``int u^p K0^n`` equals, up
to a power of two, an integral over the ``(n-1)``-simplex of a rational
function of the symmetric forms ``u, v, w`` of the coordinates, and after one
more integration an integral over the ``(n-2)``-simplex with a factor
``log((1+X)/(1-X))``, ``X = x_1 + ... + x_{n-2}``. A variant with ``w u``
in place of ``w`` gives ``int u I0 K0^n``.

All integrands take the slack ``1 - sum(x)`` as a separate argument, so that
quantities such as ``1 - X`` stay accurate on the face ``sum(x) = 1`` where the
logarithm is singular.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import mpmath
import numpy as np
from mpmath import mp, mpf

from .context import PrecisionContext
from .errors import DomainError, UnsupportedDimensionError
from .moments import VerificationRecord
from .quadrature import (
    FLOAT_MIN_TOL,
    MAX_SIMPLEX_DIM,
    QuadResult,
    integrate_simplex,
    integrate_simplex_float,
)

__all__ = [
    "PeriodForm",
    "SymmetricForms",
    "Variant",
    "appendix_identity_check",
    "period_value",
    "reduced_integrand_p1",
    "reduced_integrand_p3",
    "simplex_integrand_n1",
]


class SymmetricForms(NamedTuple):
    """``u = sum a_i``, ``v = sum_j prod_{i != j} a_i``, ``w = prod a_i``."""

    k: int
    u: mpf
    v: mpf
    w: mpf

    @classmethod
    def from_point(cls, a: Sequence) -> "SymmetricForms":
        """Build by the recurrences ``u_k = a_k + u_{k-1}``,
        ``v_k = a_k v_{k-1} + w_{k-1}``, ``w_k = a_k w_{k-1}``, starting from
        ``(u_1, v_1, w_1) = (a_1, 1, a_1)``."""
        if not a:
            raise ValueError("need at least one coordinate")
        u, v, w = mpf(a[0]), mpf(1), mpf(a[0])
        for x in a[1:]:
            u, v, w = x + u, x * v + w, x * w
        return cls(len(a), u, v, w)

    @classmethod
    def direct(cls, a: Sequence) -> "SymmetricForms":
        """Straight from the definitions (quadratic cost; used as a check)."""
        a = [mpf(x) for x in a]
        if not a:
            raise ValueError("need at least one coordinate")
        v = mpf(0)
        for j in range(len(a)):
            v += mpmath.fprod(a[:j] + a[j + 1:])
        return cls(len(a), mpmath.fsum(a), v, mpmath.fprod(a))


class Variant(enum.Enum):
    FULL_N = "full-n"
    SIMPLEX_N1 = "simplex-n1"
    REDUCED_N2 = "reduced-n2"
    I0_N1 = "i0-n1"


@dataclass(frozen=True)
class PeriodForm:
    n: int
    p: int
    variant: Variant

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 3:
            raise DomainError("n must be an integer >= 3")
        if self.p not in (1, 3):
            raise DomainError("p must be 1 or 3")
        if self.variant is Variant.I0_N1 and self.p != 1:
            raise DomainError("the I0 form exists for p = 1 only")

    @property
    def dimension(self) -> int:
        """Number of integration variables."""
        return {Variant.FULL_N: self.n, Variant.SIMPLEX_N1: self.n - 1,
                Variant.I0_N1: self.n - 1, Variant.REDUCED_N2: self.n - 2}[self.variant]

    @property
    def prefactor(self) -> Fraction:
        return Fraction(1, 2 ** (self.n - 1 if self.p == 1 else self.n - 3))

    @property
    def evaluable(self) -> bool:
        return self.variant is not Variant.FULL_N and self.dimension <= MAX_SIMPLEX_DIM


# ---------------------------------------------------------------------------
# pieces of the reduced integrands

def _log_ratio(X, s):
    """``log((1+X)/(1-X))`` with ``s = 1 - X`` given exactly."""
    if X < 0.5:
        return 2 * mpmath.atanh(X)
    return mpmath.log((1 + X) / s)


def _bracket(X, s):
    """``(1+X^2)/(2X) log((1+X)/(1-X)) - 1``, which vanishes like ``2X^2/3``."""
    prec = mp.prec
    if X < mpmath.ldexp(1, -(prec // 4)):
        # 1 + X^2 over 2X times the atanh series
        x2 = X * X
        total, term, k = mpf(0), x2, 1
        while True:
            add = term * (4 * k) / (4 * k * k - 1)
            total += add
            if abs(add) < mpmath.ldexp(abs(total), -prec - 4):
                return total
            term *= x2
            k += 1
    # cancellation costs about log2(1/X^2) bits
    extra = max(0, -2 * int(mpmath.floor(mpmath.log(X, 2)))) + 10
    with mpmath.workprec(prec + extra):
        value = (1 + X * X) / (2 * X) * _log_ratio(X, s) - 1
    return +value


def _check_point(x, slack, k):
    if len(x) != k:
        raise DomainError(f"expected a point with {k} coordinates, got {len(x)}")
    if any(not xi > 0 for xi in x):
        raise DomainError("coordinates must be positive")
    if not slack > mpf(10) ** (-mp.dps):
        raise DomainError("point is on or outside the face sum(x) = 1")


def _slack_of(x):
    return 1 - mpmath.fsum(x)


def _reduced_p1(x, slack):
    sf = SymmetricForms.from_point(x)
    X = sf.u
    one_minus_x2 = slack * (1 + X)
    return _log_ratio(X, slack) * 4 / (4 * X * sf.w + one_minus_x2 * sf.v)


def _reduced_p3(x, slack):
    sf = SymmetricForms.from_point(x)
    X = sf.u
    one_minus_x2 = slack * (1 + X)
    den = 4 * X * sf.w + one_minus_x2 * sf.v
    return _bracket(X, slack) * 4 * sf.w * one_minus_x2 / (den * den)


def _simplex_std(x, slack):
    sf = SymmetricForms.from_point(x)
    return 1 / (sf.w + slack * sf.v)


def _simplex_p3(x, slack):
    sf = SymmetricForms.from_point(x)
    den = sf.w + slack * sf.v
    return sf.w * slack / (den * den)


def _simplex_i0(x, slack):
    sf = SymmetricForms.from_point(x)
    return 1 / (sf.w * sf.u + slack * sf.v)


def reduced_integrand_p1(n: int, x: Sequence, ctx: PrecisionContext) -> mpf:
    """``log((1+X)/(1-X)) * 4 / (4 X w + (1 - X^2) v)`` on the open (n-2)-simplex.

    >>> ctx = PrecisionContext(20)
    >>> with ctx.workdps():
    ...     r = reduced_integrand_p1(3, [mpf(1)/2], ctx)
    ...     bool(abs(r - mpmath.log(3) * 16 / 7) < mpf(10)**-40)
    True
    """
    with ctx.workdps():
        x = [mpf(v) for v in x]
        slack = _slack_of(x)
        _check_point(x, slack, n - 2)
        return _reduced_p1(x, slack)


def reduced_integrand_p3(n: int, x: Sequence, ctx: PrecisionContext) -> mpf:
    """``B(X) * 4 w (1 - X^2) / (4 X w + (1 - X^2) v)^2`` with
    ``B = (1+X^2)/(2X) log((1+X)/(1-X)) - 1``."""
    with ctx.workdps():
        x = [mpf(v) for v in x]
        slack = _slack_of(x)
        _check_point(x, slack, n - 2)
        return _reduced_p3(x, slack)


def simplex_integrand_n1(n: int, p: int, variant: Variant, a: Sequence, ctx: PrecisionContext) -> mpf:
    """Rational integrand on the open (n-1)-simplex.

    ``SIMPLEX_N1``: ``1/(w + (1-u) v)`` for ``p = 1`` and
    ``w (1-u) / (w + (1-u) v)^2`` for ``p = 3``; ``I0_N1``: ``1/(w u + (1-u) v)``.
    """
    fn = _n1_integrand(PeriodForm(n, p, variant))
    with ctx.workdps():
        a = [mpf(v) for v in a]
        slack = _slack_of(a)
        _check_point(a, slack, n - 1)
        return fn(a, slack)


def _n1_integrand(form):
    if form.variant is Variant.I0_N1:
        return _simplex_i0
    if form.variant is Variant.SIMPLEX_N1:
        return _simplex_std if form.p == 1 else _simplex_p3
    raise DomainError(f"{form.variant.value} is not an (n-1)-dimensional form")


def _integrand(form):
    if form.variant is Variant.REDUCED_N2:
        return _reduced_p1 if form.p == 1 else _reduced_p3
    return _n1_integrand(form)


# hardware-float versions; x[-1] and slack are numpy arrays

def _forms_np(x):
    u, v, w = x[0], 1.0, x[0]
    for a in x[1:]:
        u, v, w = a + u, a * v + w, a * w
    return u, v, w


def _log_ratio_np(X, s):
    small = X < 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(small, 2 * np.arctanh(np.where(small, X, 0.0)), np.log((1 + X) / s))


def _bracket_np(X, s):
    x2 = X * X
    series = np.zeros_like(X)
    # the direct form loses about log10(1/X^2) digits
    term = x2
    for k in range(1, 9):
        series = series + term * (4 * k) / (4 * k * k - 1)
        term = term * x2
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (1 + x2) / (2 * X) * _log_ratio_np(X, s) - 1
    return np.where(X < 1e-2, series, direct)


def _reduced_p1_np(x, slack):
    X, v, w = _forms_np(x)
    return _log_ratio_np(X, slack) * 4 / (4 * X * w + slack * (1 + X) * v)


def _reduced_p3_np(x, slack):
    X, v, w = _forms_np(x)
    one_minus_x2 = slack * (1 + X)
    den = 4 * X * w + one_minus_x2 * v
    return _bracket_np(X, slack) * 4 * w * one_minus_x2 / (den * den)


def _simplex_std_np(x, slack):
    u, v, w = _forms_np(x)
    return 1 / (w + slack * v)


def _simplex_p3_np(x, slack):
    u, v, w = _forms_np(x)
    den = w + slack * v
    return w * slack / (den * den)


def _simplex_i0_np(x, slack):
    u, v, w = _forms_np(x)
    return 1 / (w * u + slack * v)


_FLOAT = {_reduced_p1: _reduced_p1_np, _reduced_p3: _reduced_p3_np, _simplex_std: _simplex_std_np,
          _simplex_p3: _simplex_p3_np, _simplex_i0: _simplex_i0_np}


def period_integral(form: PeriodForm, ctx: PrecisionContext, tol, backend: str = "auto") -> QuadResult:
    """The simplex integral of ``form`` before the power-of-two prefactor.

    ``backend="auto"`` switches to the double-precision rule for three or
    more dimensions when ``tol`` allows it; ``"mpmath"`` and ``"float"``
    force one or the other.
    """
    if form.variant is Variant.FULL_N:
        raise DomainError("the n-dimensional exponential form is not integrated numerically")
    if form.dimension > MAX_SIMPLEX_DIM:
        raise UnsupportedDimensionError(
            f"n={form.n} {form.variant.value} needs {form.dimension} dimensions (max {MAX_SIMPLEX_DIM})")
    if backend not in ("auto", "mpmath", "float"):
        raise ValueError(f"unknown backend {backend!r}")
    fn = _integrand(form)
    if backend == "auto":
        backend = "float" if form.dimension >= 3 and tol >= FLOAT_MIN_TOL else "mpmath"
    if backend == "float":
        r = integrate_simplex_float(_FLOAT[fn], form.dimension, float(tol), ctx.max_refinement)
        with ctx.workdps():
            return QuadResult(mpf(r.value), mpf(r.error_estimate), r.levels_used, r.nodes)
    return integrate_simplex(fn, form.dimension, ctx, tol)


def period_value(form: PeriodForm, ctx: PrecisionContext, tol=None, backend: str = "auto") -> mpf:
    """The moment represented by ``form``: ``int u^p K0^n`` or, for the I0
    variant, ``int u I0 K0^n``.

    ``tol`` defaults to ``10**-target_digits`` and applies to the returned
    value.
    """
    pf = form.prefactor
    with ctx.workdps():
        tol = ctx.tolerance if tol is None else mpf(tol)
        r = period_integral(form, ctx, tol * pf.denominator / pf.numerator, backend)
        return r.value * pf.numerator / pf.denominator


# ---------------------------------------------------------------------------
# the collapsed two-dimensional identity

def _appendix_integrand(x, c):
    # 1/x L^2 - 4 (1-x^2)/x B^2, both terms vanish linearly at 0
    L = _log_ratio(x, c)
    B = _bracket(x, c)
    return (L * L - 4 * c * (1 + x) * B * B) / x


def appendix_identity_value(ctx: PrecisionContext) -> mpf:
    with ctx.workdps():
        tol = mpf(10) ** (-(ctx.target_digits + 3))
        r = integrate_finite_with_complement(_appendix_integrand, ctx, tol)
        return r.value


def integrate_finite_with_complement(F, ctx, tol) -> QuadResult:
    """``int_0^1 F(x, 1 - x) dx`` with the complement passed exactly."""
    return integrate_simplex(lambda x, slack: F(x[0], slack), 1, ctx, tol)


def appendix_identity_check(ctx: PrecisionContext) -> VerificationRecord:
    """Compare ``int_0^1 [L^2/x - 4 (1-x^2)/x B^2] dx`` with 3."""
    start = time.perf_counter()
    value = appendix_identity_value(ctx)
    with ctx.workdps():
        return VerificationRecord.compare("appendix-eq3", value, mpf(3), ctx.target_digits,
                                          (time.perf_counter() - start) * 1000)
