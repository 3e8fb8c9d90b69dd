"""Moments of K0^n as integrals over simplices.

Each reduced form is integrated on the simplex and compared with the
direct Bessel quadrature. Two- and lower-dimensional forms run in
arbitrary precision; three and four dimensions switch to a long-double
rule at tolerances the hardware can honour.

    python demos/period_reductions.py [--full]   # --full adds n = 6 (a few minutes)
"""
import sys
import time

import mpmath
from mpmath import mpf

from besselmoments import M, PeriodForm, PrecisionContext, Variant, appendix_identity_check, moment, MomentSpec, period_value

cases = [(3, 1, Variant.REDUCED_N2, 40, None), (3, 3, Variant.REDUCED_N2, 40, None),
         (3, 1, Variant.SIMPLEX_N1, 20, None), (3, 1, Variant.I0_N1, 20, None),
         (4, 1, Variant.REDUCED_N2, 20, None), (4, 3, Variant.REDUCED_N2, 20, None),
         (5, 1, Variant.REDUCED_N2, 20, 1e-11), (5, 3, Variant.REDUCED_N2, 20, 1e-11)]
if "--full" in sys.argv:
    cases += [(6, 1, Variant.REDUCED_N2, 20, 1e-7), (6, 3, Variant.REDUCED_N2, 20, 1e-7)]

print(f"{'n':>2} {'p':>2} {'form':11s} {'dim':>3} {'value':>26s} {'|diff|':>10s} {'time':>7s}")
for n, p, variant, digits, tol in cases:
    ctx = PrecisionContext(digits)
    form = PeriodForm(n, p, variant)
    t = time.perf_counter()
    with ctx.workdps():
        value = period_value(form, ctx, tol)
        direct = moment(MomentSpec(1, n, 0, 1, 0), ctx) if variant is Variant.I0_N1 else M(n, p, ctx)
        diff = abs(value - direct)
    print(f"{n:2d} {p:2d} {variant.value:11s} {form.dimension:3d} {mpmath.nstr(value, 22):>26s} "
          f"{mpmath.nstr(diff, 2):>10s} {time.perf_counter() - t:6.1f}s")

rec = appendix_identity_check(PrecisionContext(50))
print(f"\none-dimensional identity with value 3: |diff| = {mpmath.nstr(rec.abs_diff, 3)} at 50 digits")
