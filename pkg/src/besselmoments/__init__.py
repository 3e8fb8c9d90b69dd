"""High-precision evaluation of Bessel moments and the identities between
them: Bessel kernels, double-exponential quadrature, nested and simplex
integrals, and PSLQ integer-relation search.

>>> from besselmoments import PrecisionContext, M, zeta
>>> ctx = PrecisionContext(20)
>>> with ctx.workdps():
...     abs(M(4, 1, ctx) - 7 * zeta(3, ctx) / 8) < 1e-20
True
"""
__version__ = "0.1.0"

from .context import PrecisionContext
from .errors import (
    AccuracyError,
    BesselMomentsError,
    DomainError,
    InsufficientPrecisionError,
    RelationNotFoundError,
    UnknownIdentityError,
    UnsupportedDimensionError,
)
from .identities import CATALOG, catalog_ids, rediscover, verify_identity
from .kernels import Combination, IntegrandFamily, MomentSpec, bessel_set
from .moments import (
    M,
    NestedSpec,
    Tail,
    VerificationRecord,
    i_rho2_alpha6,
    moment,
    nested_zeta,
    symmetric_sum,
    trigamma,
    zeta,
    zeta_log_integral,
    zeta_tilde,
)
from .periods import PeriodForm, SymmetricForms, Variant, appendix_identity_check, period_value
from .pslq import IntegerRelation, find_relation, verify_relation
from .quadrature import (
    QuadResult,
    integrate_finite,
    integrate_nested,
    integrate_semi_infinite,
    integrate_simplex,
)
