"""Simple and nested Bessel moments, zeta values and the composite quantity
``I_{rho^2 alpha^6}``.

Moments are memoized per ``(spec, target, working)`` in process memory and,
when a persistent store has been attached with :func:`attach_store`, on disk.
"""
from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import mp, mpf

from .context import PrecisionContext
from .errors import DomainError
from .kernels import (
    Combination,
    IntegrandFamily,
    MomentSpec,
    integrand_function,
)
from .quadrature import integrate_finite, integrate_nested, integrate_semi_infinite

__all__ = [
    "NestedSpec",
    "Tail",
    "VerificationRecord",
    "attach_store",
    "i_rho2_alpha6",
    "moment",
    "nested_zeta",
    "symmetric_sum",
    "trigamma",
    "zeta",
    "zeta_log_integral",
]

# extra digits asked of the quadrature beyond the target
_MOMENT_MARGIN = 3
_NESTED_MARGIN = 2

_lock = threading.Lock()
_memory: dict = {}
_store = None


def attach_store(store) -> None:
    """Route moment lookups through ``store`` (``None`` detaches).

    ``store`` needs ``get(key, digits, working) -> mpf | None`` and
    ``put(key, digits, working, value)``.
    """
    global _store
    _store = store


def _tol(ctx, margin):
    return mpf(10) ** (-(ctx.target_digits + margin))


def moment(spec: MomentSpec, ctx: PrecisionContext, use_cache: bool = True) -> mpf:
    """``int_0^inf u^p K0^a (u K1)^b I0^c (u I1)^d du``.

    >>> ctx = PrecisionContext(20)
    >>> mpmath.nstr(moment(MomentSpec(1, 1), ctx), 15)
    '1.0'
    """
    key = (spec.key, ctx.target_digits, ctx.working_digits)
    if use_cache:
        with _lock:
            hit = _memory.get(key)
        if hit is None and _store is not None:
            hit = _store.get(*key)
        if hit is not None:
            with _lock:
                _memory[key] = hit
            return hit
    f = integrand_function(spec, ctx)
    value = integrate_semi_infinite(f, ctx, _tol(ctx, _MOMENT_MARGIN)).value
    if use_cache:
        with _lock:
            _memory[key] = value
        if _store is not None:
            _store.put(*key, value)
    return value


def M(n: int, p: int, ctx: PrecisionContext, use_cache: bool = True) -> mpf:
    """Shorthand for ``int_0^inf u^p K0(u)^n du``."""
    return moment(MomentSpec(p, n), ctx, use_cache)


def clear_memory() -> None:
    with _lock:
        _memory.clear()


# ---------------------------------------------------------------------------
# zeta values

def _borwein_d(n):
    # d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!), all integers
    out = []
    acc = Fraction(0)
    for i in range(n + 1):
        acc += Fraction(math.factorial(n + i - 1) * 4 ** i,
                        math.factorial(n - i) * math.factorial(2 * i))
        out.append(n * acc)
    assert all(d.denominator == 1 for d in out)
    return [int(d) for d in out]


_zeta_memo: dict = {}


def zeta(s: int, ctx: PrecisionContext) -> mpf:
    """Riemann zeta at an integer ``s >= 2``.

    Borwein's acceleration of the alternating series for ``eta(s)``; the
    truncation error is below ``3 (3 + sqrt 8)^-n`` relative to ``eta``.
    """
    if not isinstance(s, int) or isinstance(s, bool) or s < 2:
        raise DomainError("zeta needs an integer s >= 2")
    key = (s, ctx.working_digits)
    if key in _zeta_memo:
        return _zeta_memo[key]
    dps = ctx.working_digits + 10
    n = math.ceil((dps + 1) * math.log(10) / math.log(3 + math.sqrt(8))) + 2
    d = _borwein_d(n)
    with mpmath.workdps(dps):
        dn = d[n]
        total = mpf(0)
        for k in range(n):
            term = mpf(d[k] - dn) / mpf(k + 1) ** s
            total += -term if k % 2 else term
        eta = -total / dn
        value = eta / (1 - mpf(2) ** (1 - s))
    with ctx.workdps():
        value = +value
    _zeta_memo[key] = value
    return value


def trigamma(x, ctx: PrecisionContext) -> mpf:
    """``psi_1(x)`` for ``0 < x < 1`` (backed by mpmath's polygamma)."""
    with ctx.workdps():
        x = mpf(Fraction(x).numerator) / Fraction(x).denominator if isinstance(x, Fraction) else mpf(x)
        if not 0 < x < 1:
            raise DomainError("trigamma is provided on (0, 1)")
        return mpmath.psi(1, x)


def _log_ratio(x):
    # log((1+x)/(1-x)), accurate for small x
    return 2 * mpmath.atanh(x)


def zeta_log_integral(n: int, ctx: PrecisionContext) -> mpf:
    """``1/(n-1)! int_0^1 log((1+x)/(1-x))^(n-1) / x dx``, which equals
    ``(2^n - 1)/2^(n-1) zeta(n)``."""
    if not isinstance(n, int) or n < 2:
        raise DomainError("n must be an integer >= 2")

    def f(x):
        return _log_ratio(x) ** (n - 1) / x

    with ctx.workdps():
        r = integrate_finite(f, 0, 1, ctx, _tol(ctx, _MOMENT_MARGIN))
        return r.value / math.factorial(n - 1)


# ---------------------------------------------------------------------------
# nested integrals

class Tail(enum.Enum):
    LOWER = "lower"   # int_0^u
    UPPER = "upper"   # int_u^inf


Term = Union[MomentSpec, IntegrandFamily, Combination]


@dataclass(frozen=True)
class NestedSpec:
    """``int_0^inf outer(u) (inner integrated over the tail) du``."""

    outer: Term
    inner: Term
    tail: Tail = Tail.LOWER

    def lowered(self) -> "NestedSpec":
        """Equivalent LOWER form: int g(u) int_u^inf f = int f(u) int_0^u g."""
        if self.tail is Tail.LOWER:
            return self
        return NestedSpec(self.inner, self.outer, Tail.LOWER)

    def __str__(self):
        bar = "0..u" if self.tail is Tail.LOWER else "u..inf"
        return f"nested[{self.outer} | {self.inner} over {bar}]"


_nested_memo: dict = {}


def nested_zeta(spec: NestedSpec, ctx: PrecisionContext, method: str = "sinc") -> mpf:
    """``zeta~(f, g) = int_0^inf f(u) int_0^u g(x) dx du`` (UPPER tails are
    swapped to LOWER first)."""
    low = spec.lowered()
    key = (low.outer, low.inner, ctx.target_digits, ctx.working_digits, method)
    if key in _nested_memo:
        return _nested_memo[key]
    f = integrand_function(low.outer, ctx)
    g = integrand_function(low.inner, ctx)
    value = integrate_nested(f, g, ctx, _tol(ctx, _NESTED_MARGIN), method=method).value
    _nested_memo[key] = value
    return value


def zeta_tilde(f: int, g: int, ctx: PrecisionContext) -> mpf:
    """``zeta~(f_n, g_m)`` with ``f_n = x^n K0^2 K1^2``, ``g_m = x^m K1 I1 K0^2``."""
    return nested_zeta(NestedSpec(IntegrandFamily("F", f), IntegrandFamily("G", g)), ctx)


def symmetric_sum(n: int, m: int, ctx: PrecisionContext) -> mpf:
    """``zeta~(f_n, g_m) + zeta~(f_m, g_n)``."""
    with ctx.workdps():
        return zeta_tilde(n, m, ctx) + zeta_tilde(m, n, ctx)


# term 2 of I_{rho^2 alpha^6}: u K0 (u K1) (u K1 I0 - u I1 K0)
_MIXED = Combination(((1, MomentSpec(1, 1, 2, 1, 0)), (-1, MomentSpec(1, 2, 1, 0, 1))))
_F1 = IntegrandFamily("F", 1)


def i_rho2_alpha6(ctx: PrecisionContext, form: str = "original") -> mpf:
    """Second composite quantity.

    ``form="original"`` is the three-term sum whose middle term carries an
    upper-tail inner integral; ``form="rewritten"`` is the equivalent sum of
    two lower-tail nested terms and two simple moments.
    """
    with ctx.workdps():
        if form == "original":
            t1 = 8 * zeta_tilde(3, 1, ctx)
            t2 = -4 * nested_zeta(NestedSpec(_MIXED, _F1, Tail.UPPER), ctx)
            t3 = moment(MomentSpec(1, 4, 2), ctx)
            return t1 + t2 + t3
        if form == "rewritten":
            return (8 * zeta_tilde(3, 1, ctx) + 8 * zeta_tilde(1, 3, ctx)
                    + mpf(2) / 3 * M(4, 1, ctx) - moment(MomentSpec(1, 4, 2), ctx))
    raise ValueError(f"unknown form {form!r}")


# ---------------------------------------------------------------------------
# verification records

@dataclass(frozen=True)
class VerificationRecord:
    identity_id: str
    lhs: mpf
    rhs: mpf
    abs_diff: mpf
    digits_requested: int
    passed: bool
    runtime_ms: int

    @classmethod
    def compare(cls, identity_id, lhs, rhs, digits, runtime_ms=0) -> "VerificationRecord":
        diff = abs(lhs - rhs)
        threshold = mpf(10) ** (-(digits - 5))
        return cls(identity_id, lhs, rhs, diff, digits, bool(diff <= threshold), int(runtime_ms))

    def to_json(self) -> dict:
        """Decimal strings throughout; ``lhs``/``rhs`` carry 10 guard digits."""
        n = self.digits_requested + 10
        return {
            "identity_id": self.identity_id,
            "lhs": _decimal(self.lhs, n),
            "rhs": _decimal(self.rhs, n),
            "abs_diff": _decimal(self.abs_diff, 6),
            "digits_requested": self.digits_requested,
            "passed": self.passed,
            "runtime_ms": self.runtime_ms,
        }

    @classmethod
    def from_json(cls, data: dict) -> "VerificationRecord":
        with mpmath.workdps(int(data["digits_requested"]) + 20):
            return cls(data["identity_id"], mpf(data["lhs"]), mpf(data["rhs"]),
                       mpf(data["abs_diff"]), int(data["digits_requested"]),
                       bool(data["passed"]), int(data["runtime_ms"]))


def _decimal(x, digits):
    return mpmath.libmp.to_str(mpf(x)._mpf_, digits)
