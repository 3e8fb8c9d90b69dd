"""Walk through the weight-six story: the composite integral I, its nested
pieces, and the integer relation that ties it to M(6,1), M(6,3) and zeta(5).

    python demos/weight_six_identities.py [digits]
"""
import sys
import time
import warnings

import mpmath

from besselmoments import M, PrecisionContext, i_rho2_alpha6, rediscover, symmetric_sum, zeta, zeta_tilde

digits = int(sys.argv[1]) if len(sys.argv) > 1 else 30
ctx = PrecisionContext(digits)
show = lambda x: mpmath.nstr(x, digits)

t = time.perf_counter()
with ctx.workdps():
    print(f"working at {digits} digits ({ctx.working_digits} internally)\n")
    print("M(6,1)            =", show(M(6, 1, ctx)))
    print("M(6,3)            =", show(M(6, 3, ctx)))
    print("zeta~(f3, g1)     =", show(zeta_tilde(3, 1, ctx)))
    print("zeta~(f1, g3)     =", show(zeta_tilde(1, 3, ctx)))

    original = i_rho2_alpha6(ctx, "original")
    rewritten = i_rho2_alpha6(ctx, "rewritten")
    print("\nI, three-term form =", show(original))
    print("I, rewritten form  =", show(rewritten))
    print("difference         =", mpmath.nstr(original - rewritten, 3))

    closed = M(6, 1, ctx) / 30 + M(6, 3, ctx) / 20 - 31 * zeta(5, ctx) / 160
    print("\nM(6,1)/30 + M(6,3)/20 - 31 zeta(5)/160 =", show(closed))
    print("residual                                =", mpmath.nstr(original - closed, 3))

    s = symmetric_sum(3, 1, ctx)
    nice = M(6, 1, ctx) / 48 - 3 * M(6, 3, ctx) / 160 - 7 * zeta(3, ctx) / 96 - 31 * zeta(5, ctx) / 1280
    print("\nsymmetric sum S(3,1) =", show(s))
    print("its closed form      =", show(nice), " residual", mpmath.nstr(s - nice, 3))

print("\nsearching for the relation from numerics alone (50 digits, coefficients < 1000) ...")
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    rel = rediscover("PSLQ6", 50)
print("  ", rel.describe())
print("   confidence after re-verification:", rel.confidence_digits, "digits")
print(f"\ndone in {time.perf_counter() - t:.1f} s")
