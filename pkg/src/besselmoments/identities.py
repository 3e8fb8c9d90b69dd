"""Catalog of exact identities between Bessel moments, nested integrals and
zeta values, with verification and integer-relation rediscovery.

Each catalog entry computes its two sides independently. Rediscovery
assembles a basis of constants, runs :func:`~besselmoments.pslq.find_relation`
and re-checks the relation at 20 extra digits.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import reduce
from typing import Callable, Optional, Sequence

import mpmath
from mpmath import mpf

from .context import PrecisionContext
from .errors import RelationNotFoundError, UnknownIdentityError
from .kernels import MomentSpec, wronskian_grid
from .moments import (
    M,
    VerificationRecord,
    i_rho2_alpha6,
    moment,
    symmetric_sum,
    trigamma,
    zeta,
    zeta_log_integral,
)
from .periods import PeriodForm, Variant, appendix_identity_value, period_value
from .pslq import IntegerRelation, check_budget, find_relation, normalize, verify_relation

__all__ = ["CATALOG", "REDISCOVERABLE", "catalog_ids", "expand_ids", "rediscover", "verify_identity"]

F = Fraction


@dataclass(frozen=True)
class Identity:
    id: str
    summary: str
    lhs: Callable
    rhs: Callable


# ---------------------------------------------------------------------------
# linear-combination identities as (basis, rational coefficients)

def _combo(coeffs, basis, ctx):
    return mpmath.fsum(mpf(c.numerator) / c.denominator * b for c, b in zip(coeffs, basis))


# S(n, m) = c1 M(6,1) + c2 M(6,3) + c0 + c3 zeta(3) + c5 zeta(5)
_SYMMETRIC = {
    "nice": ((3, 1), (F(1, 48), F(-3, 160), F(0), F(-7, 96), F(-31, 1280))),
    "sym51": ((5, 1), (F(211, 11520), F(3953, 23040), F(11, 9216), F(-1, 9), F(-93, 5120))),
    "sym71": ((7, 1), (F(108731, 1728000), F(4256617, 3456000), F(27877, 460800), F(-8, 15),
                       F(-279, 5120))),
    "sym35": ((3, 5), (F(-28921, 691200), F(1151533, 1382400), F(14653, 184320), F(25, 192),
                       F(279, 20480))),
}


def _symmetric_rhs(name):
    c1, c3, c0, cz3, cz5 = _SYMMETRIC[name][1]

    def rhs(ctx):
        with ctx.workdps():
            return _combo((c1, c3, c0, cz3, cz5), (M(6, 1, ctx), M(6, 3, ctx), 1, zeta(3, ctx), zeta(5, ctx)), ctx)
    return rhs


def _symmetric_lhs(name):
    n, m = _SYMMETRIC[name][0]
    return lambda ctx: symmetric_sum(n, m, ctx)


def _pslq6_rhs(ctx):
    with ctx.workdps():
        return M(6, 1, ctx) / 30 + M(6, 3, ctx) / 20 - 31 * zeta(5, ctx) / 160


def _final_rhs(ctx):
    with ctx.workdps():
        return M(8, 1, ctx) / 77 - 72 * M(8, 3, ctx) / 77


def _period_tol(ctx):
    return mpf(10) ** (-(ctx.target_digits + 2))


def _period(n, p, variant):
    def value(ctx):
        with ctx.workdps():
            return period_value(PeriodForm(n, p, variant), ctx, _period_tol(ctx))
    return value


def _const(f):
    def value(ctx):
        with ctx.workdps():
            return f(ctx)
    return value


def _wronskian_max(ctx):
    return wronskian_grid(ctx)[1]


def _zetaint(n):
    return (lambda ctx: zeta_log_integral(n, ctx),
            _const(lambda ctx: mpf(2 ** n - 1) / 2 ** (n - 1) * zeta(n, ctx)))


def _linear(identity_id):
    """Sides of a relation found by search: sum of the non-constant terms
    against minus the constant term."""
    def sides(ctx):
        rel = rediscover(identity_id, 40)
        basis = _BASES[identity_id].values(ctx)
        with ctx.workdps():
            lhs = mpmath.fsum(c * v for c, v in zip(rel.coeffs[:-1], basis[:-1]))
            return lhs, mpf(-rel.coeffs[-1])
    memo = {}

    def side(k):
        def f(ctx):
            if ctx not in memo:
                memo[ctx] = sides(ctx)
            return memo[ctx][k]
        return f
    return side(0), side(1)


def _build_catalog():
    entries = [
        Identity("first0", "int u K0^4 = 7 zeta(3)/8",
                 lambda ctx: M(4, 1, ctx), _const(lambda ctx: 7 * zeta(3, ctx) / 8)),
        Identity("ffirst", "int u I0 K0^3 = 3 zeta(2)/8",
                 lambda ctx: moment(MomentSpec(1, 3, 0, 1, 0), ctx), _const(lambda ctx: 3 * zeta(2, ctx) / 8)),
        Identity("rel", "int u K0^4 (u K1)^2 = 2/15 M(6,1) - 1/5 M(6,3)",
                 lambda ctx: moment(MomentSpec(1, 4, 2), ctx),
                 _const(lambda ctx: 2 * M(6, 1, ctx) / 15 - M(6, 3, ctx) / 5)),
        Identity("eq100", "4 M(4,1) - 16 M(4,3) = 3",
                 _const(lambda ctx: 4 * M(4, 1, ctx) - 16 * M(4, 3, ctx)), lambda ctx: mpf(3)),
        Identity("PSLQ6", "I_{rho^2 alpha^6} = M(6,1)/30 + M(6,3)/20 - 31 zeta(5)/160",
                 lambda ctx: i_rho2_alpha6(ctx), _pslq6_rhs),
        Identity("final-zeta5", "zeta(5) = M(8,1)/77 - 72 M(8,3)/77",
                 lambda ctx: zeta(5, ctx), _final_rhs),
        Identity("moncoco", "M(3,1) = (psi1(1/3) - psi1(2/3))/12",
                 lambda ctx: M(3, 1, ctx),
                 _const(lambda ctx: (trigamma(F(1, 3), ctx) - trigamma(F(2, 3), ctx)) / 12)),
        Identity("cb", "2-dim reduced form of M(4,1) = 7 zeta(3)/8",
                 _period(4, 1, Variant.REDUCED_N2), _const(lambda ctx: 7 * zeta(3, ctx) / 8)),
        Identity("i0k03", "2-dim I0 form of int u I0 K0^3 = 3 zeta(2)/8",
                 _period(3, 1, Variant.I0_N1), _const(lambda ctx: 3 * zeta(2, ctx) / 8)),
        Identity("appendix-eq3", "int_0^1 [L^2/x - 4 (1-x^2)/x B^2] = 3",
                 appendix_identity_value, lambda ctx: mpf(3)),
        Identity("wronskian", "max |x (I0 K1 + I1 K0) - 1| on the test grid",
                 _wronskian_max, lambda ctx: mpf(0)),
    ]
    for name in _SYMMETRIC:
        n, m = _SYMMETRIC[name][0]
        entries.append(Identity(name, f"zeta~(f{n},g{m}) + zeta~(f{m},g{n}) in the weight-6 basis",
                                _symmetric_lhs(name), _symmetric_rhs(name)))
    for n in range(2, 7):
        lhs, rhs = _zetaint(n)
        entries.append(Identity(f"zetaint-{n}", f"log-integral representation of zeta({n})", lhs, rhs))
    for name in ("first-linear", "firstbis-linear", "firstbis1-linear"):
        lhs, rhs = _linear(name)
        entries.append(Identity(name, f"integer relation over {', '.join(_BASES[name].labels)}", lhs, rhs))
    for n, p in ((3, 1), (3, 3), (4, 1), (4, 3)):
        entries.append(Identity(f"reduce-n{n}-p{p}", f"(n-2)-dim form of M({n},{p})",
                                _period(n, p, Variant.REDUCED_N2), lambda ctx, n=n, p=p: M(n, p, ctx)))
    for p in (1, 3):
        entries.append(Identity(f"simplex-n3-p{p}", f"(n-1)-dim form of M(3,{p})",
                                _period(3, p, Variant.SIMPLEX_N1), lambda ctx, p=p: M(3, p, ctx)))
    return {e.id: e for e in entries}


# ---------------------------------------------------------------------------
# rediscovery bases

@dataclass(frozen=True)
class Basis:
    labels: tuple
    values: Callable          # ctx -> list of values, in label order
    bound: int
    expected: Optional[tuple]  # cleared integer coefficients, when known


def _cleared(lead, coeffs):
    """Integers for ``x0 = sum q_i b_i`` as ``L x0 - sum L q_i b_i = 0``."""
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), [c.denominator for c in coeffs], 1)
    return normalize([lcm * lead] + [-(c * lcm).numerator for c in coeffs])


def _bound_for(vec):
    return 10 ** (len(str(max(abs(c) for c in vec))))


def _sym_basis(name):
    n, m = _SYMMETRIC[name][0]
    c1, c3, c0, cz3, cz5 = _SYMMETRIC[name][1]
    expected = _cleared(1, [c1, c3, cz3, cz5, c0])

    def values(ctx):
        return [symmetric_sum(n, m, ctx), M(6, 1, ctx), M(6, 3, ctx), zeta(3, ctx), zeta(5, ctx), mpf(1)]
    return Basis((f"S({n},{m})", "M(6,1)", "M(6,3)", "zeta(3)", "zeta(5)", "1"), values,
                 _bound_for(expected), expected)


def _build_bases():
    pslq6 = _cleared(1, [F(1, 30), F(1, 20), F(-31, 160)])
    final = (77, -1, 72)
    bases = {
        "PSLQ6": Basis(("I_rho2_alpha6", "M(6,1)", "M(6,3)", "zeta(5)"),
                       lambda ctx: [i_rho2_alpha6(ctx), M(6, 1, ctx), M(6, 3, ctx), zeta(5, ctx)],
                       1000, pslq6),
        "final-zeta5": Basis(("zeta(5)", "M(8,1)", "M(8,3)"),
                             lambda ctx: [zeta(5, ctx), M(8, 1, ctx), M(8, 3, ctx)], 1000, final),
        "first-linear": Basis(("M(1;2,2)", "M(4,1)", "1"),
                              lambda ctx: [moment(MomentSpec(1, 2, 2), ctx), M(4, 1, ctx), mpf(1)],
                              10 ** 6, None),
        "firstbis-linear": Basis(("M(1;1,2,1,0)", "M(1;3,0,1,0)", "1"),
                                 lambda ctx: [moment(MomentSpec(1, 1, 2, 1, 0), ctx),
                                              moment(MomentSpec(1, 3, 0, 1, 0), ctx), mpf(1)],
                                 10 ** 6, None),
        "firstbis1-linear": Basis(("M(1;2,1,0,1)", "M(1;3,0,1,0)", "1"),
                                  lambda ctx: [moment(MomentSpec(1, 2, 1, 0, 1), ctx),
                                               moment(MomentSpec(1, 3, 0, 1, 0), ctx), mpf(1)],
                                  10 ** 6, None),
    }
    for name in _SYMMETRIC:
        bases[name] = _sym_basis(name)
    return bases


_BASES = _build_bases()
REDISCOVERABLE = tuple(sorted(_BASES))
_rediscovered: dict = {}


def rediscover(identity_id: str, digits: int, ctx: PrecisionContext | None = None,
               coeff_bound: int | None = None) -> IntegerRelation:
    """Compute the identity's basis at ``digits``, search for an integer
    relation and re-verify it at ``digits + 20``.

    Where the integer coefficients are known, a different relation is
    reported with a warning (both vectors are kept on the result) rather
    than raised. ``ctx`` only contributes its refinement limit.
    """
    if identity_id not in _BASES:
        raise UnknownIdentityError(identity_id)
    basis = _BASES[identity_id]
    bound = basis.bound if coeff_bound is None else coeff_bound
    key = (identity_id, digits, bound)
    if key in _rediscovered:
        return _rediscovered[key]
    check_budget(digits, bound, len(basis.labels))
    refine = ctx.max_refinement if ctx is not None else 12
    search_ctx = PrecisionContext(digits, max_refinement=refine)
    values = basis.values(search_ctx)
    with warnings.catch_warnings():
        # the margin warning, if any, was already issued above
        warnings.simplefilter("ignore")
        rel = find_relation(values, bound, search_ctx)
    if rel is None:
        raise RelationNotFoundError(
            f"no relation with coefficients up to {bound} among {', '.join(basis.labels)} at {digits} digits")
    check_ctx = PrecisionContext(digits + 20, max_refinement=refine)
    values = basis.values(check_ctx)
    residual = verify_relation(rel, values, check_ctx)
    with check_ctx.workdps():
        scale = max(abs(v) for v in values)
        confidence = (check_ctx.working_digits if not residual
                      else max(0, int(mpmath.floor(-mpmath.log10(residual / scale)))))
    notes = ()
    if confidence < digits - 10:
        notes = (f"re-verification at {digits + 20} digits gave only {confidence} digits",)
    rel = replace(rel, residual=residual, confidence_digits=confidence, labels=basis.labels,
                  expected=basis.expected, notes=notes)
    if rel.matches_expected is False:
        warnings.warn(f"{identity_id}: found {rel.coeffs}, known coefficients are {basis.expected}",
                      stacklevel=2)
    _rediscovered[key] = rel
    return rel


CATALOG = _build_catalog()
GROUPS = {"zetaint-n": tuple(f"zetaint-{n}" for n in range(2, 7))}


def catalog_ids() -> list:
    return sorted(CATALOG)


def expand_ids(ids: Sequence[str]) -> list:
    """Resolve group aliases and ``all``; unknown ids raise."""
    out = []
    for i in ids:
        if i == "all":
            out.extend(catalog_ids())
        elif i in GROUPS:
            out.extend(GROUPS[i])
        elif i in CATALOG:
            out.append(i)
        else:
            raise UnknownIdentityError(i)
    seen = set()
    return [i for i in out if not (i in seen or seen.add(i))]


def verify_identity(identity_id: str, ctx: PrecisionContext) -> VerificationRecord:
    """Evaluate both sides of a catalog identity at ``ctx``.

    ``zetaint-n`` checks n = 2..6 and reports the worst case.
    """
    if identity_id in GROUPS:
        records = [verify_identity(i, ctx) for i in GROUPS[identity_id]]
        worst = max(records, key=lambda r: r.abs_diff)
        return replace(worst, identity_id=identity_id, passed=all(r.passed for r in records),
                       runtime_ms=sum(r.runtime_ms for r in records))
    if identity_id not in CATALOG:
        raise UnknownIdentityError(identity_id)
    entry = CATALOG[identity_id]
    start = time.perf_counter()
    lhs = entry.lhs(ctx)
    rhs = entry.rhs(ctx)
    with ctx.workdps():
        return VerificationRecord.compare(identity_id, +mpf(lhs), +mpf(rhs), ctx.target_digits,
                                          (time.perf_counter() - start) * 1000)
