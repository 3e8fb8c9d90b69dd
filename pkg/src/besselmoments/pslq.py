"""Integer relation detection (PSLQ)."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import mpmath
from mpmath import mpf

from .context import PrecisionContext
from .errors import InsufficientPrecisionError

__all__ = [
    "IntegerRelation",
    "check_budget",
    "detection_exponent",
    "find_relation",
    "normalize",
    "rediscover",
    "verify_relation",
]

GAMMA = math.sqrt(4 / 3)
# the precondition asks for this many digits beyond log10(bound) * length
SAFETY_DIGITS = 30


@dataclass(frozen=True)
class IntegerRelation:
    coeffs: tuple
    residual: mpf
    coeff_bound: int
    confidence_digits: int
    labels: tuple = ()
    expected: Optional[tuple] = None
    notes: tuple = field(default=())

    @property
    def matches_expected(self) -> Optional[bool]:
        if self.expected is None:
            return None
        return normalize(self.expected) == self.coeffs

    def describe(self) -> str:
        names = self.labels or tuple(f"x{i}" for i in range(len(self.coeffs)))
        terms = " ".join(f"{c:+d}*{n}" for c, n in zip(self.coeffs, names) if c)
        return f"{terms} = 0"


def normalize(coeffs: Sequence[int]) -> tuple:
    """Divide by the gcd and make the first nonzero entry positive."""
    coeffs = [int(c) for c in coeffs]
    if not any(coeffs):
        raise ValueError("zero coefficient vector")
    g = 0
    for c in coeffs:
        g = math.gcd(g, c)
    coeffs = [c // g for c in coeffs]
    lead = next(c for c in coeffs if c)
    if lead < 0:
        coeffs = [-c for c in coeffs]
    return tuple(coeffs)


def detection_exponent(digits: int, coeff_bound: int, length: int) -> float:
    """``e`` such that a relation is declared below ``10^-e`` (relative)."""
    return digits - 10 - math.log10(coeff_bound) * length


def check_budget(digits: int, coeff_bound: int, length: int) -> float:
    """Detection exponent for a search, raising when it is not positive and
    warning when it leaves fewer than ``SAFETY_DIGITS`` digits of margin."""
    exponent = detection_exponent(digits, coeff_bound, length)
    if exponent <= 0:
        raise InsufficientPrecisionError(
            f"{digits} digits cannot certify relations of length {length} with "
            f"coefficients up to {coeff_bound}: need more than "
            f"{10 + math.log10(coeff_bound) * length:.0f} digits")
    if exponent < SAFETY_DIGITS:
        warnings.warn(
            f"detection margin of {exponent:.0f} digits is below the recommended "
            f"{SAFETY_DIGITS}; treat any relation as provisional until re-verified",
            stacklevel=3)
    return exponent


def _confidence(residual, values):
    scale = max(abs(v) for v in values)
    if not residual:
        return mpmath.mp.dps
    return max(0, int(mpmath.floor(-mpmath.log10(residual / scale))))


def verify_relation(rel, values: Sequence, ctx: PrecisionContext) -> mpf:
    """``|sum c_i x_i|`` recomputed at the context's working precision."""
    coeffs = rel.coeffs if isinstance(rel, IntegerRelation) else tuple(rel)
    if len(coeffs) != len(values):
        raise ValueError("coefficient and value vectors differ in length")
    with ctx.workdps():
        return abs(mpmath.fsum(mpf(c) * mpf(v) for c, v in zip(coeffs, values)))


def find_relation(values: Sequence, coeff_bound: int, ctx: PrecisionContext,
                  max_iterations: int = 100_000) -> Optional[IntegerRelation]:
    """Search for integers ``c`` (max-norm at most ``coeff_bound``) with
    ``sum c_i x_i = 0``.

    A relation is declared when some entry of the reduced vector drops below
    ``10^-(working_digits - 10 - log10(bound) * length)`` relative to the
    input scale, so the values should be good to nearly the working
    precision. The target digits must exceed ``10 + log10(bound) * length``
    (otherwise :class:`InsufficientPrecisionError`), with a warning when
    fewer than ``SAFETY_DIGITS`` remain. ``None`` is returned once the PSLQ
    norm bound proves that no relation within ``coeff_bound`` exists, or
    when the iteration limit is hit.

    >>> ctx = PrecisionContext(50)
    >>> with ctx.workdps():
    ...     phi = (1 + mpmath.sqrt(5)) / 2
    ...     find_relation([1, phi, phi ** 2], 1000, ctx).coeffs
    (1, 1, -1)
    """
    n = len(values)
    if n < 2:
        raise ValueError("need at least two values")
    if not isinstance(coeff_bound, int) or coeff_bound < 1:
        raise ValueError("coeff_bound must be a positive integer")
    check_budget(ctx.target_digits, coeff_bound, n)
    exponent = detection_exponent(ctx.working_digits, coeff_bound, n)
    with ctx.workdps():
        x = [mpf(v) for v in values]
        scale = max(abs(v) for v in x)
        if not scale:
            raise ValueError("all values are zero")
        for i, v in enumerate(x):
            if not v:
                coeffs = tuple(1 if j == i else 0 for j in range(n))
                return IntegerRelation(coeffs, mpf(0), coeff_bound, mpmath.mp.dps)
        threshold = mpf(10) ** (-exponent)
        coeffs = _pslq([v / scale for v in x], coeff_bound, threshold, max_iterations)
        if coeffs is None:
            return None
        coeffs = normalize(coeffs)
        if max(abs(c) for c in coeffs) > coeff_bound:
            return None
        residual = verify_relation(coeffs, x, ctx)
        return IntegerRelation(coeffs, residual, coeff_bound, _confidence(residual, x))


def _pslq(x, bound, threshold, max_iterations):
    # Ferguson-Bailey PSLQ on a unit-scale vector; works at the current mpmath
    # precision and returns a column of B or None.
    n = len(x)
    norm = mpmath.sqrt(mpmath.fsum(v * v for v in x))
    x = [v / norm for v in x]
    # partial norms s_k = |x_k..x_n|
    s = [mpf(0)] * n
    acc = mpf(0)
    for k in range(n - 1, -1, -1):
        acc += x[k] * x[k]
        s[k] = mpmath.sqrt(acc)
    y = list(x)
    H = [[mpf(0)] * (n - 1) for _ in range(n)]
    for i in range(n):
        for j in range(min(i + 1, n - 1)):
            if i == j:
                H[i][j] = s[j + 1] / s[j]
            else:
                H[i][j] = -y[i] * y[j] / (s[j] * s[j + 1])
    B = [[int(i == j) for j in range(n)] for i in range(n)]

    def reduce_row(i, jmax):
        for j in range(jmax, -1, -1):
            if not H[j][j]:
                continue
            t = mpmath.nint(H[i][j] / H[j][j])
            if not t:
                continue
            ti = int(t)
            y[j] += t * y[i]
            Hi, Hj = H[i], H[j]
            for k in range(j + 1):
                Hi[k] -= t * Hj[k]
            for row in B:
                row[j] += ti * row[i]

    for i in range(1, n):
        reduce_row(i, i - 1)

    for _ in range(max_iterations):
        # exchange step
        m = max(range(n - 1), key=lambda i: GAMMA ** (i + 1) * abs(H[i][i]))
        y[m], y[m + 1] = y[m + 1], y[m]
        H[m], H[m + 1] = H[m + 1], H[m]
        for row in B:
            row[m], row[m + 1] = row[m + 1], row[m]
        if m < n - 2:
            t0 = mpmath.sqrt(H[m][m] ** 2 + H[m][m + 1] ** 2)
            t1, t2 = H[m][m] / t0, H[m][m + 1] / t0
            for i in range(m, n):
                t3, t4 = H[i][m], H[i][m + 1]
                H[i][m] = t1 * t3 + t2 * t4
                H[i][m + 1] = -t2 * t3 + t1 * t4
        for i in range(m + 1, n):
            reduce_row(i, min(i - 1, m + 1))

        # relation found?
        best = min(range(n), key=lambda j: abs(y[j]))
        if abs(y[best]) < threshold:
            return [B[i][best] for i in range(n)]
        diag = max(abs(H[j][j]) for j in range(n - 1))
        if not diag:
            # an exact zero on the diagonal: the last column of B is a relation
            return [B[i][n - 2] for i in range(n)]
        # every relation has euclidean norm >= 1 / max|H_jj|
        if 1 / diag > bound * math.sqrt(n):
            return None
        if max(abs(v) for row in B for v in row) > bound * 10 ** 6:
            return None
    return None


def with_expected(rel: IntegerRelation, labels, expected) -> IntegerRelation:
    return replace(rel, labels=tuple(labels), expected=None if expected is None else tuple(expected))


def rediscover(identity_id: str, digits: int, ctx: PrecisionContext | None = None) -> IntegerRelation:
    """Recover a catalog relation from numerics; see
    :func:`besselmoments.identities.rediscover`."""
    from .identities import rediscover as _rediscover
    return _rediscover(identity_id, digits, ctx)
