"""Double-exponential quadrature at arbitrary precision.

* tanh-sinh on finite intervals, ``y = (1 + tanh(pi/2 sinh t)) / 2``;
* exp-sinh on ``[lo, inf)``, ``x = lo + scale * exp(pi/2 sinh t)``;
* nested integrals ``int_0^inf f(u) int_0^u g(x) dx du``;
* integrals over the standard simplex through the cube map
  ``x1 = t1, x2 = (1 - t1) t2, ...``.

Each level halves the trapezoidal step and only evaluates the new (odd)
nodes. The error estimate is the difference between the last two levels,
floored at the rounding level of the working precision. Node tables are
computed once per (rule, level, precision) and summed in ascending ``t``
order, so results are bit-reproducible.
"""
from __future__ import annotations

import functools
import math
import operator
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np
from mpmath import mp, mpf

from .context import PrecisionContext
from .errors import AccuracyError, UnsupportedDimensionError

__all__ = [
    "QuadResult",
    "cumulative_inner",
    "integrate_finite",
    "integrate_nested",
    "integrate_semi_infinite",
    "integrate_simplex",
    "integrate_simplex_float",
]

MIN_LEVEL = 2
MAX_SIMPLEX_DIM = 4


@dataclass(frozen=True)
class QuadResult:
    value: mpf
    error_estimate: mpf
    levels_used: int
    nodes: int


# ---------------------------------------------------------------------------
# node tables

def _level_ts(level, t_lo, t_hi):
    """Abscissae ``t`` added at ``level`` (step 2^-level), ascending."""
    n = 1 << level
    lo = int(mpmath.floor(t_lo * n))
    hi = int(mpmath.ceil(t_hi * n))
    out = []
    for j in range(lo, hi + 1):
        if level and j % 2 == 0:
            continue
        out.append(mpf(j) / n)
    return out


def _tanh_sinh_tmax(prec):
    # 1/(1+e^{2s}) < 2^-prec  <=>  s > prec log(2) / 2
    s_max = prec * mpmath.ln2 / 2
    return mpmath.asinh(2 * s_max / mpmath.pi)


@functools.lru_cache(maxsize=None)
def _tanh_sinh_level(level, prec):
    """Nodes ``(y, 1 - y, dy/dt)`` on [0, 1] for one level.

    Nodes are dropped once the distance to the nearer endpoint falls below
    ``2^-prec``; beyond that both the point and its complement are too close
    to the endpoint to be told apart at working precision.
    """
    with mpmath.workprec(prec + 20):
        eps = mpmath.ldexp(1, -prec)
        t_max = _tanh_sinh_tmax(prec)
        half_pi = mpmath.pi / 2
        nodes = []
        for t in _level_ts(level, -t_max, t_max):
            s = half_pi * mpmath.sinh(t)
            if s >= 0:
                c = 1 / (1 + mpmath.exp(2 * s))   # 1 - y
                y = 1 - c
            else:
                y = 1 / (1 + mpmath.exp(-2 * s))
                c = 1 - y
            if min(y, c) < eps:
                continue
            w = half_pi * mpmath.cosh(t) / (2 * mpmath.cosh(s) ** 2)
            nodes.append((+y, +c, +w))
    with mpmath.workprec(prec):
        return tuple((+y, +c, +w) for y, c, w in nodes)


def _exp_sinh_window(prec):
    """Range of ``t`` covered by the exp-sinh rule at precision ``prec``."""
    digits = prec * 0.30103
    ln10 = mpmath.log(10)
    half_pi = mpmath.pi / 2
    # small end: e^s below 10^-(digits+10)
    t_lo = -mpmath.asinh((digits + 10) * ln10 / half_pi)
    # large end: e^-x negligible for decay rates >= 1
    x_max = 1.2 * (digits + 20) * ln10 + 50
    t_hi = mpmath.asinh(mpmath.log(x_max) / half_pi)
    return t_lo, t_hi


@functools.lru_cache(maxsize=None)
def _exp_sinh_level(level, prec):
    """Nodes ``(e^s, d(e^s)/dt)`` on (0, inf) for one level."""
    with mpmath.workprec(prec + 20):
        half_pi = mpmath.pi / 2
        nodes = []
        for t in _level_ts(level, *_exp_sinh_window(prec)):
            s = half_pi * mpmath.sinh(t)
            x = mpmath.exp(s)
            nodes.append((x, x * half_pi * mpmath.cosh(t)))
    with mpmath.workprec(prec):
        return tuple((+x, +w) for x, w in nodes)


# ---------------------------------------------------------------------------
# adaptive driver

def _drive(level_nodes, evaluate, ctx, tol, what, floor_ok=False):
    """Level-doubling trapezoidal sum.

    ``level_nodes(k)`` lists the nodes new at level k; ``evaluate(node)``
    returns ``(weighted value, weighted inner-error bound)``. With
    ``floor_ok`` a result is also accepted once successive levels agree to
    within the rounding floor, even if that floor exceeds ``tol``; callers
    that weight the returned estimate use this for huge inner integrals.
    """
    tol = mpf(tol)
    total = mpf(0)
    abs_total = mpf(0)
    inner = mpf(0)
    count = 0
    prev = None
    floor_rel = mpf(10) ** (-(ctx.working_digits - 10))
    best = None
    for k in range(ctx.max_refinement + 1):
        for node in level_nodes(k):
            v, e = evaluate(node)
            total += v
            abs_total += abs(v)
            inner += e
            count += 1
        h = mpmath.ldexp(1, -k)
        s = h * total
        if prev is not None:
            floor = floor_rel * h * abs_total
            err = abs(s - prev) + h * inner + floor
            best = QuadResult(s, err, k, count)
            if k >= MIN_LEVEL and (err <= tol or (floor_ok and err <= 3 * floor)):
                return best
        prev = s
    raise AccuracyError(
        f"{what}: no convergence to {mpmath.nstr(tol, 3)} within {ctx.max_refinement} levels "
        f"(estimate {mpmath.nstr(best.error_estimate, 3)})", best)


def _unit(F, ctx, tol, what="tanh-sinh", floor_ok=False):
    """int_0^1 F(y, 1-y, w) dy, where F returns ``(value, error_bound)`` and
    ``w`` is the node's weight (for callers that budget per-node accuracy)."""
    prec = mp.prec

    def evaluate(node):
        y, c, w = node
        v, e = F(y, c, w)
        return w * v, w * e

    return _drive(lambda k: _tanh_sinh_level(k, prec), evaluate, ctx, tol, what, floor_ok)


def integrate_finite(f: Callable, lo, hi, ctx: PrecisionContext, tol) -> QuadResult:
    """tanh-sinh integral of ``f`` over ``(lo, hi)``.

    Endpoint singularities of logarithmic type need no special handling.
    The node window ends where the distance to an endpoint reaches about
    ``2^-prec``, so an algebraic singularity ``|x - lo|^-alpha`` limits the
    attainable accuracy to roughly ``(1 - alpha) * working_digits`` digits.
    """
    with ctx.workdps():
        lo, hi = mpf(lo), mpf(hi)
        if lo == hi:
            return QuadResult(mpf(0), mpf(0), 0, 0)
        width = hi - lo

        def F(y, c, _w):
            x = lo + width * y if y <= c else hi - width * c
            return width * f(x), mpf(0)

        return _unit(F, ctx, tol, "integrate_finite")


def integrate_semi_infinite(f: Callable, ctx: PrecisionContext, tol, lo=0, scale=1) -> QuadResult:
    """exp-sinh integral of ``f`` over ``(lo, inf)``.

    ``f`` may be log-singular at ``lo`` and must decay at least like
    ``e^{-u/scale}``.
    """
    with ctx.workdps():
        lo, scale = mpf(lo), mpf(scale)
        prec = mp.prec

        def evaluate(node):
            x, w = node
            return scale * w * f(lo + scale * x), mpf(0)

        return _drive(lambda k: _exp_sinh_level(k, prec), evaluate, ctx, tol,
                      "integrate_semi_infinite")


# ---------------------------------------------------------------------------
# nested integrals

class _Cumulative:
    """``u -> int_0^u g`` to a per-call absolute tolerance.

    Short ranges are integrated directly; beyond ``split`` the value is the
    full integral minus the upper tail, whose magnitude (and cost) shrinks
    as ``u`` grows.
    """

    split = 1

    def __init__(self, g, ctx, total_tol):
        self.g, self.ctx, self.total_tol = g, ctx, mpf(total_tol)
        self._total = None

    @property
    def total(self):
        if self._total is None:
            self._total = integrate_semi_infinite(self.g, self.ctx, self.total_tol)
        return self._total

    def __call__(self, u, tol):
        u = mpf(u)
        if u <= self.split:
            r = integrate_finite(self.g, 0, u, self.ctx, tol)
            return r.value, r.error_estimate
        tail = integrate_semi_infinite(self.g, self.ctx, tol, lo=u)
        return self.total.value - tail.value, self.total.error_estimate + tail.error_estimate


def cumulative_inner(g: Callable, u, ctx: PrecisionContext, tol):
    """``int_0^u g(x) dx``."""
    with ctx.workdps():
        return _Cumulative(g, ctx, tol)(u, tol)[0]


_SINC_TABLES: dict = {}


def _sinc_table(prec, m_max):
    """``Si(pi m) / pi`` for ``m = 1..m_max`` at ``prec`` bits (grown on demand)."""
    table = _SINC_TABLES.setdefault(prec, [])
    if len(table) < m_max:
        with mpmath.workprec(prec + 20):
            pi = mpmath.pi
            extra = [mpmath.si(pi * m) / pi for m in range(len(table) + 1, m_max + 1)]
        with mpmath.workprec(prec):
            table.extend(+v for v in extra)
    return table


def _fixed(values, bits):
    """Common-exponent integer images of ``values`` with ``bits`` bits of headroom."""
    top = max((abs(v) for v in values), default=mpf(0))
    if not top:
        return [0] * len(values), 0
    shift = bits - int(mpmath.floor(mpmath.log(top, 2))) - 1
    return [int(mpmath.ldexp(v, shift)) for v in values], shift


def _nested_sinc(f, g, ctx, tol):
    # On the exp-sinh grid t_j = j h, the cumulative integral of the smooth,
    # doubly-exponentially decaying phi(t) = g(x(t)) x'(t) is
    #     int_{-inf}^{t_j} phi ~ h sum_k phi_k (1/2 + Si(pi (j - k)) / pi),
    # which converges at the same rate as the trapezoidal rule itself.
    prec = mp.prec
    t_lo, t_hi = _exp_sinh_window(prec)
    floor_rel = mpf(10) ** (-(ctx.working_digits - 10))
    grid = {}   # step index at level k -> (phi, psi)
    prev = None
    best = None
    half_pi = mpmath.pi / 2
    for k in range(ctx.max_refinement + 1):
        n = 1 << k
        lo = int(mpmath.floor(t_lo * n))
        hi = int(mpmath.ceil(t_hi * n))
        grid = {2 * j: v for j, v in grid.items()}
        for j in range(lo, hi + 1):
            if j in grid:
                continue
            t = mpf(j) / n
            x = mpmath.exp(half_pi * mpmath.sinh(t))
            w = x * half_pi * mpmath.cosh(t)
            fx = f(x)
            grid[j] = (g(x) * w, fx * w)
        keys = sorted(grid)
        count = len(keys)
        phi, e_phi = _fixed([grid[j][0] for j in keys], prec + 20)
        sig, e_sig = _fixed(_sinc_table(prec, count), prec + 20)
        half = 1 << (e_sig - 1) if e_sig > 0 else 0
        # kernel[count - 1 + m] = (1/2 + sigma_m) * 2^e_sig, m = -(count-1)..(count-1)
        kernel = ([half - s for s in reversed(sig[:count - 1])] + [half]
                  + [half + s for s in sig[:count - 1]])
        rev = kernel[::-1]
        total = mpf(0)
        abs_total = mpf(0)
        scale = -(e_phi + e_sig)
        for i, j in enumerate(keys):
            psi = grid[j][1]
            if not psi:
                continue
            # sum_k phi_k kernel[i - k]; rev[count - 1 - i + k] = kernel[count - 1 + i - k]
            start = count - 1 - i
            acc = sum(map(operator.mul, phi, rev[start:start + count]))
            term = psi * mpmath.ldexp(acc, scale)
            total += term
            abs_total += abs(term)
        h = mpmath.ldexp(1, -k)
        value = h * h * total
        if prev is not None:
            err = abs(value - prev) + floor_rel * h * h * abs_total
            best = QuadResult(value, err, k, count)
            if k >= MIN_LEVEL and err <= tol:
                return best
        prev = value
    raise AccuracyError(
        f"integrate_nested: no convergence to {mpmath.nstr(tol, 3)} within {ctx.max_refinement} "
        f"levels (estimate {mpmath.nstr(best.error_estimate, 3)})", best)


def _nested_adaptive(f, g, ctx, tol):
    # Each inner integral gets a tolerance inversely proportional to the outer
    # weight w |f(u)| of its node, scaled so that the weighted inner errors sum
    # to at most tol / 10; that sum is added to the outer estimate.
    prec = mp.prec
    t_lo, t_hi = _exp_sinh_window(prec)
    budget = tol / (10 * (t_hi - t_lo + 1))
    inner = _Cumulative(g, ctx, budget / 1000)
    zero = mpf(0)

    def evaluate(node):
        x, w = node
        fx = f(x)
        if not fx:
            return zero, zero
        weight = w * abs(fx)
        G, e = inner(x, budget / max(weight, budget))
        return w * fx * G, weight * e

    return _drive(lambda k: _exp_sinh_level(k, prec), evaluate, ctx, tol, "integrate_nested")


def integrate_nested(f: Callable, g: Callable, ctx: PrecisionContext, tol,
                     method: str = "sinc") -> QuadResult:
    """``int_0^inf f(u) (int_0^u g(x) dx) du``.

    ``method="sinc"`` evaluates ``f`` and ``g`` on one shared exp-sinh grid and
    forms the cumulative inner integral by sinc indefinite integration.
    ``method="adaptive"`` runs a separate adaptive inner quadrature at every
    outer node; it is much slower and serves as an independent check.
    """
    if method not in ("sinc", "adaptive"):
        raise ValueError(f"unknown method {method!r}")
    with ctx.workdps():
        tol = mpf(tol)
        if method == "sinc":
            return _nested_sinc(f, g, ctx, tol)
        return _nested_adaptive(f, g, ctx, tol)


# ---------------------------------------------------------------------------
# simplex

def integrate_simplex(h: Callable, m: int, ctx: PrecisionContext, tol) -> QuadResult:
    """Integral of ``h`` over ``{x_i >= 0, sum x_i <= 1}`` in ``m`` dimensions.

    ``h(x, slack)`` receives the point as a list together with
    ``slack = 1 - sum(x)``, computed as a product of complements so that it
    stays accurate on the face ``sum x = 1``. Each axis is a nested
    tanh-sinh rule on [0, 1]. Each inner integral gets a tolerance inversely
    proportional to the weight of its outer node, so that the weighted inner
    errors add up to a tenth of the enclosing axis' tolerance.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError("dimension must be a positive integer")
    if m > MAX_SIMPLEX_DIM:
        raise UnsupportedDimensionError(f"simplex dimension {m} > {MAX_SIMPLEX_DIM}")
    with ctx.workdps():
        tol = mpf(tol)
        span = 2 * _tanh_sinh_tmax(mp.prec) + 1

        def level(k, prefix, r, axis_tol):
            # r * int_0^1 I_{k+1}(prefix + [r t], r (1 - t)) dt, to axis_tol
            last = k == m - 1
            unit_tol = axis_tol / r
            # inner errors, weighted by the node weights, sum to unit_tol / 10
            budget = unit_tol / (10 * span)

            def F(t, c, w):
                x = prefix + [r * t]
                if last:
                    return h(x, r * c), mpf(0)
                res = level(k + 1, x, r * c, budget / w)
                return res.value, res.error_estimate

            res = _unit(F, ctx, unit_tol, "integrate_simplex", floor_ok=k > 0)
            return QuadResult(r * res.value, r * res.error_estimate, res.levels_used, res.nodes)

        return level(0, [], mpf(1), tol)


# ---------------------------------------------------------------------------
# simplex, double precision

# cutoff for the float rule: nodes with min(y, 1-y) < FLOAT_EDGE are dropped;
# squared products of up to four such coordinates stay above float64 underflow
FLOAT_EDGE = 1e-30
FLOAT_MIN_TOL = 1e-12


_LD = np.longdouble


@functools.lru_cache(maxsize=None)
def _tanh_sinh_level_float(level):
    s_max = math.log(1 / FLOAT_EDGE) / 2
    t_max = math.asinh(2 * s_max / math.pi)
    n = 1 << level
    j = np.arange(math.floor(-t_max * n), math.ceil(t_max * n) + 1)
    if level:
        j = j[j % 2 != 0]
    t = j.astype(_LD) / n
    s = _LD(math.pi) / 2 * np.sinh(t)
    e = np.exp(-2 * np.abs(s))
    near = e / (1 + e)            # distance to the nearer endpoint
    far = 1 / (1 + e)
    y = np.where(s >= 0, far, near)
    c = np.where(s >= 0, near, far)
    w = _LD(math.pi) / 2 * np.cosh(t) * 2 * e / (1 + e) ** 2
    keep = near >= FLOAT_EDGE
    return y[keep], c[keep], w[keep]


def _tanh_sinh_tmax_float():
    return math.asinh(2 * (math.log(1 / FLOAT_EDGE) / 2) / math.pi)


def integrate_simplex_float(h: Callable, m: int, tol: float, max_refinement: int = 12) -> QuadResult:
    """Hardware-float counterpart of :func:`integrate_simplex`.

    Arithmetic is in ``numpy.longdouble``: on x86-64 its exponent range
    absorbs the tiny products of coordinates met near the simplex corners
    (on platforms where it aliases float64 such products may underflow).
    ``h(x, slack)`` is called with ``x`` a list of ``m`` coordinates whose
    last entry is an array (the innermost axis is vectorized) and ``slack``
    an array; it must return an array. Tolerances below ``1e-12`` are
    rejected. Used for the 3- and 4-dimensional reduced forms, which are out
    of reach of the arbitrary-precision rule in reasonable time.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError("dimension must be a positive integer")
    if m > MAX_SIMPLEX_DIM:
        raise UnsupportedDimensionError(f"simplex dimension {m} > {MAX_SIMPLEX_DIM}")
    tol = float(tol)
    if tol < FLOAT_MIN_TOL:
        raise ValueError(f"hardware-float simplex rule needs tol >= {FLOAT_MIN_TOL}")
    span = 2 * _tanh_sinh_tmax_float() + 1
    floor_rel = _LD(1e-16)
    zero = _LD(0)

    def unit(values_at, unit_tol, floor_ok):
        # values_at(k) -> (sum w*v, sum |w*v|, sum w*e, count) over level-k nodes
        total = abs_total = inner = zero
        count = 0
        prev = None
        best = None
        for k in range(max_refinement + 1):
            a, b, c_, n = values_at(k)
            total += a
            abs_total += b
            inner += c_
            count += n
            step = _LD(2) ** -k
            s = step * total
            if prev is not None:
                floor = floor_rel * step * abs_total
                err = abs(s - prev) + step * inner + floor
                best = QuadResult(s, err, k, count)
                if not np.isfinite(err):
                    break
                if k >= MIN_LEVEL and (err <= unit_tol or (floor_ok and err <= 3 * floor)):
                    return best
            prev = s
        raise AccuracyError(
            f"integrate_simplex_float: no convergence to {float(unit_tol):.3g} within "
            f"{max_refinement} levels (estimate {float(best.error_estimate):.3g})", best)

    def level(k, prefix, r, axis_tol):
        unit_tol = axis_tol / r
        if k == m - 1:
            def values_at(lv):
                y, c, w = _tanh_sinh_level_float(lv)
                v = w * h(prefix + [r * y], r * c)
                return v.sum(), np.abs(v).sum(), zero, len(v)
        else:
            budget = unit_tol / (10 * span)

            def values_at(lv):
                y, c, w = _tanh_sinh_level_float(lv)
                a = b = e = zero
                for yi, ci, wi in zip(y, c, w):
                    res = level(k + 1, prefix + [r * yi], r * ci, budget / wi)
                    a += wi * res.value
                    b += wi * abs(res.value)
                    e += wi * res.error_estimate
                return a, b, e, len(y)
        res = unit(values_at, unit_tol, floor_ok=k > 0)
        return QuadResult(r * res.value, r * res.error_estimate, res.levels_used, res.nodes)

    res = level(0, [], _LD(1), _LD(tol))
    return QuadResult(float(res.value), float(res.error_estimate), res.levels_used, res.nodes)
