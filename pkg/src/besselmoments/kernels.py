"""Modified Bessel functions K0, K1, I0, I1 and the integrands built from them.

Every evaluation produces all four functions at once, in exponentially
scaled form (``e^u K`` and ``e^-u I``), so products such as
``u^p K0^a (u K1)^b I0^c (u I1)^d`` can be assembled with a single
``exp(-(a+b-c-d) u)`` factor and no large intermediates.

Two evaluation branches are used:

* the ascending power series, summed in fixed-point integer arithmetic with
  enough guard bits to absorb the ``e^{2u}`` cancellation between the
  ``I``-like and ``K``-like parts;
* the large-argument asymptotic expansion, used whenever its smallest term
  (and the exponentially small ``e^{-2u}`` correction to the ``I`` expansion)
  falls below the working precision.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence, Union

import mpmath
from mpmath import mp, mpf
from mpmath.libmp import MPZ, from_man_exp, round_nearest, to_fixed

from .context import PrecisionContext
from .errors import AccuracyError, DomainError

__all__ = [
    "BesselSet",
    "Combination",
    "IntegrandFamily",
    "MomentSpec",
    "bessel_i0_scaled",
    "bessel_i1_scaled",
    "bessel_k0",
    "bessel_k1",
    "bessel_set",
    "eval_family",
    "eval_moment_integrand",
    "integrand_function",
]

_LOG2E = 1.4426950408889634
_MAX_SERIES_TERMS = 200_000


class BesselSet(NamedTuple):
    """Scaled Bessel values at one point ``u``."""

    u: mpf
    k0e: mpf  # e^u K0(u)
    k1e: mpf  # e^u K1(u)
    i0e: mpf  # e^-u I0(u)
    i1e: mpf  # e^-u I1(u)

    @property
    def k0(self):
        return self.k0e * mpmath.exp(-self.u)

    @property
    def k1(self):
        return self.k1e * mpmath.exp(-self.u)

    @property
    def i0(self):
        return self.i0e * mpmath.exp(self.u)

    @property
    def i1(self):
        return self.i1e * mpmath.exp(self.u)


# ---------------------------------------------------------------------------
# evaluation branches

def _to_mpf(man, shift, prec):
    return mp.make_mpf(from_man_exp(man, -shift, prec, round_nearest))


def _series(x, prec):
    """Unscaled (K0, K1, I0, I1) from the ascending series, ``prec`` bits."""
    xf = float(x)
    L_bits = max(1, mpmath.mag(x)).bit_length() + 2
    shift = prec + int(2 * _LOG2E * xf) + L_bits + 32
    with mpmath.workprec(shift + 16):
        t = x * x / 4
        L = mpmath.log(x / 2) + mpmath.euler
    T = to_fixed(t._mpf_, shift)
    Lf = to_fixed(L._mpf_, shift)
    one = MPZ(1) << shift

    a = one          # t^k / (k!)^2
    H = MPZ(0)       # harmonic number H_k
    s_i0 = a
    s_k0 = MPZ(0)    # sum H_k a_k
    s_j1 = a         # sum a_k / (k+1)
    s_k1 = one       # sum (H_k + H_{k+1}) a_k / (k+1)
    k = 0
    while True:
        k += 1
        if k > _MAX_SERIES_TERMS:
            raise AccuracyError(f"Bessel series did not converge at u={mpmath.nstr(x, 10)}")
        a = ((a * T) >> shift) // (k * k)
        if not a:
            break
        H += one // k
        b = a // (k + 1)
        s_i0 += a
        s_k0 += (H * a) >> shift
        s_j1 += b
        s_k1 += ((2 * H + one // (k + 1)) * b) >> shift

    k0 = ((-Lf * s_i0) >> shift) + s_k0
    xk1 = one + ((2 * T * ((Lf * s_j1) >> shift)) >> shift) - ((T * s_k1) >> shift)
    i0 = _to_mpf(s_i0, shift, prec)
    i1 = (x / 2) * _to_mpf(s_j1, shift, prec)
    return _to_mpf(k0, shift, prec), _to_mpf(xk1, shift, prec) / x, i0, i1


def _asymptotic(x, prec):
    """Scaled (K0e, K1e, I0e, I1e) from the asymptotic expansion, or None.

    None means the expansion cannot reach ``prec`` bits at this ``x``.
    """
    if 2 * _LOG2E * float(x) < prec + 12:
        return None
    with mpmath.workprec(prec + 12):
        eps = mpmath.ldexp(1, -(prec + 8))
        sums = []
        for mu in (0, 4):
            term = mpf(1)
            s_k = mpf(1)
            s_i = mpf(1)
            k = 0
            while True:
                k += 1
                if k > 2 * float(x) + 2:
                    return None
                term = term * (mu - (2 * k - 1) ** 2) / (8 * k * x)
                if abs(term) < eps:
                    break
                s_k += term
                s_i += term if k % 2 == 0 else -term
            sums.append((s_k, s_i))
        pk = mpmath.sqrt(mpmath.pi / (2 * x))
        pi_ = 1 / mpmath.sqrt(2 * mpmath.pi * x)
        vals = (pk * sums[0][0], pk * sums[1][0], pi_ * sums[0][1], pi_ * sums[1][1])
    return tuple(+v for v in vals)


@functools.lru_cache(maxsize=1 << 17)
def _cached_set(key, prec, method):
    x = mp.make_mpf(key)
    with mpmath.workprec(prec):
        scaled = None
        if method in ("auto", "asymptotic"):
            scaled = _asymptotic(x, prec)
            if scaled is None and method == "asymptotic":
                raise AccuracyError(
                    f"asymptotic expansion cannot reach {prec} bits at u={mpmath.nstr(x, 10)}")
        if scaled is None:
            k0, k1, i0, i1 = _series(x, prec)
            ex = mpmath.exp(x)
            scaled = (k0 * ex, k1 * ex, i0 / ex, i1 / ex)
    return BesselSet(x, *scaled)


def _bessel_set_prec(u, prec, method="auto"):
    """BesselSet at ``prec`` bits; ``u`` must already be a positive mpf."""
    return _cached_set(u._mpf_, prec, method)


def bessel_set(u, ctx: PrecisionContext, method: str = "auto") -> BesselSet:
    """All four scaled Bessel functions at ``u > 0``.

    ``method`` is ``"auto"``, ``"series"`` or ``"asymptotic"``; forcing a
    branch is meant for consistency checks.
    """
    if method not in ("auto", "series", "asymptotic"):
        raise ValueError(f"unknown method {method!r}")
    with ctx.workdps():
        u = mpf(u)
        if not u > 0:
            raise DomainError(f"Bessel kernels need u > 0, got {u}")
        return _bessel_set_prec(u, mp.prec, method)


def bessel_k0(u, ctx: PrecisionContext):
    """K0(u) for u > 0."""
    bs = bessel_set(u, ctx)
    with ctx.workdps():
        return bs.k0


def bessel_k1(u, ctx: PrecisionContext):
    """K1(u) for u > 0."""
    bs = bessel_set(u, ctx)
    with ctx.workdps():
        return bs.k1


def _scaled_i(u, ctx, which):
    with ctx.workdps():
        u = mpf(u)
        if u < 0:
            raise DomainError(f"I kernels need u >= 0, got {u}")
        if u == 0:
            return mpf(1) if which == 0 else mpf(0)
    bs = bessel_set(u, ctx)
    return bs.i0e if which == 0 else bs.i1e


def bessel_i0_scaled(u, ctx: PrecisionContext):
    """e^-u I0(u) for u >= 0."""
    return _scaled_i(u, ctx, 0)


def bessel_i1_scaled(u, ctx: PrecisionContext):
    """e^-u I1(u) for u >= 0."""
    return _scaled_i(u, ctx, 1)


# ---------------------------------------------------------------------------
# integrands

@dataclass(frozen=True)
class MomentSpec:
    """Exponents of ``u^p K0^a (u K1)^b I0^c (u I1)^d``."""

    p: int
    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0

    def __post_init__(self):
        for name in ("p", "a", "b", "c", "d"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v!r}")
        if self.p % 2 != 1:
            raise DomainError("p must be odd")
        if self.a + self.b <= self.c + self.d:
            raise DomainError("the integral diverges unless a + b > c + d")

    @property
    def weight(self) -> int:
        """Number of K-type factors; I factors carry no weight."""
        return self.a + self.b

    @property
    def decay_rate(self) -> int:
        return self.a + self.b - self.c - self.d

    @property
    def key(self) -> str:
        return f"{self.p};{self.a},{self.b},{self.c},{self.d}"

    @classmethod
    def from_key(cls, key: str) -> "MomentSpec":
        p, rest = key.split(";")
        return cls(int(p), *(int(v) for v in rest.split(",")))

    def value_at(self, bs: BesselSet):
        u = bs.u
        v = u ** self.p
        if self.a:
            v *= bs.k0e ** self.a
        if self.b:
            v *= (u * bs.k1e) ** self.b
        if self.c:
            v *= bs.i0e ** self.c
        if self.d:
            v *= (u * bs.i1e) ** self.d
        return v * mpmath.exp(-self.decay_rate * u)

    def __str__(self):
        return f"M(p={self.p};a={self.a},b={self.b},c={self.c},d={self.d})"


@dataclass(frozen=True)
class IntegrandFamily:
    """``F(n)``: x^n K0^2 K1^2, ``G(n)``: x^n K1 I1 K0^2; n odd."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in ("F", "G"):
            raise DomainError(f"kind must be 'F' or 'G', got {self.kind!r}")
        if not isinstance(self.n, int) or self.n < 1 or self.n % 2 != 1:
            raise DomainError("n must be an odd positive integer")

    @property
    def decay_rate(self) -> int:
        return 4 if self.kind == "F" else 2

    def value_at(self, bs: BesselSet):
        u = bs.u
        if self.kind == "F":
            return u ** self.n * (bs.k0e * bs.k1e) ** 2 * mpmath.exp(-4 * u)
        return u ** self.n * bs.k1e * bs.i1e * bs.k0e ** 2 * mpmath.exp(-2 * u)

    def __str__(self):
        return f"{'f' if self.kind == 'F' else 'g'}_{self.n}"


Term = Union[MomentSpec, IntegrandFamily]


@dataclass(frozen=True)
class Combination:
    """A rational linear combination of product integrands."""

    terms: tuple  # of (Fraction, MomentSpec | IntegrandFamily)

    def __post_init__(self):
        if not self.terms:
            raise ValueError("empty combination")
        object.__setattr__(self, "terms", tuple((Fraction(c), t) for c, t in self.terms))

    @property
    def decay_rate(self) -> int:
        return min(t.decay_rate for _, t in self.terms)

    def value_at(self, bs: BesselSet):
        total = mpf(0)
        for c, t in self.terms:
            total += mpf(c.numerator) / c.denominator * t.value_at(bs)
        return total

    def __str__(self):
        return " + ".join(f"({c})*{t}" for c, t in self.terms)


Integrand = Union[MomentSpec, IntegrandFamily, Combination]


def _cutoff(rate, working_digits):
    # beyond this the integrand is far below working significance
    return math.log(10) * (working_digits + 20) / rate


def integrand_function(obj: Integrand, ctx: PrecisionContext) -> Callable:
    """A one-argument callable ``u -> value`` usable by the quadrature rules.

    The callable assumes mpmath is already at ``ctx.working_digits`` (the
    quadrature routines arrange that) and returns an exact zero beyond the
    decay cutoff.
    """
    cut = mpf(_cutoff(obj.decay_rate, ctx.working_digits))
    zero = mpf(0)

    def f(u):
        if u > cut:
            return zero
        return obj.value_at(_bessel_set_prec(u, mp.prec))

    f.decay_rate = obj.decay_rate
    return f


def _positive(u):
    u = mpf(u)
    if not u > 0:
        raise DomainError(f"integrands need u > 0, got {u}")
    return u


def eval_moment_integrand(spec: MomentSpec, u, ctx: PrecisionContext):
    """Value of ``u^p K0^a (u K1)^b I0^c (u I1)^d`` at ``u > 0``."""
    with ctx.workdps():
        u = _positive(u)
        return spec.value_at(_bessel_set_prec(u, mp.prec))


def eval_family(fam: IntegrandFamily, x, ctx: PrecisionContext):
    """Value of ``f_n(x)`` or ``g_n(x)`` at ``x > 0``."""
    with ctx.workdps():
        x = _positive(x)
        return fam.value_at(_bessel_set_prec(x, mp.prec))


def wronskian_defect(u, ctx: PrecisionContext):
    """``u (K1 I0 + I1 K0) - 1``, identically zero in exact arithmetic."""
    bs = bessel_set(u, ctx)
    with ctx.workdps():
        return bs.u * (bs.k1e * bs.i0e + bs.i1e * bs.k0e) - 1


def wronskian_grid(ctx: PrecisionContext, points: Sequence | None = None):
    """Largest Wronskian defect over a grid covering [1e-3, 50]."""
    if points is None:
        with ctx.workdps():
            points = [mpf(10) ** (mpf(k) / 8 - 3) for k in range(0, 8 * 4 + 1)]
            points += [mpf(k) / 2 for k in range(21, 101)]
    worst_u, worst = None, mpf(0)
    for u in points:
        d = abs(wronskian_defect(u, ctx))
        if worst_u is None or d > worst:
            worst_u, worst = u, d
    return worst_u, worst
