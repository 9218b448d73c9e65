"""Extended-precision arithmetic context and numerically stable primitives.

Everything downstream (confidence intervals, attack bounds, collision
probabilities) funnels through :class:`PrecisionContext`.  The context is a
plain value object holding the working precision in mantissa bits; it owns no
mutable state, so it can be shared or cloned across threads freely.  gmpy2's
thread-local MPFR context is entered per call and always restored.

Probabilities in the regimes this library targets reach 1e-48 and below, and
complements like (1-f)^M reach exp(-5e14).  Such quantities are carried in
log space between operations; conversion to linear scale happens only at
output boundaries, where underflow to exactly 0 or 1 is acceptable and
expected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import gmpy2
from gmpy2 import mpfr

__all__ = [
    "BigReal",
    "DomainError",
    "PrecisionContext",
    "DEFAULT_PRECISION_BITS",
    "DEFAULT_CONTEXT",
    "relative_error",
]

#: Any value accepted by :meth:`PrecisionContext.real`.
Real = Union[int, float, str, Fraction, mpfr]

#: Extended-precision real number (MPFR value at the context's precision).
BigReal = mpfr

DEFAULT_PRECISION_BITS = 256
MIN_PRECISION_BITS = 64


class DomainError(ValueError):
    """An argument violates a documented precondition."""


@dataclass(frozen=True)
class PrecisionContext:
    """Computation context fixing the binary working precision.

    The precision is recorded in every result object built from this
    context, so emitted numbers are reproducible.  Minimum 64 bits;
    default 256 bits, enough that lgamma differences at arguments around
    1e19 retain full accuracy.
    """

    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self) -> None:
        if not isinstance(self.precision_bits, int):
            raise DomainError("precision_bits must be an integer")
        if self.precision_bits < MIN_PRECISION_BITS:
            raise DomainError(
                f"precision_bits must be >= {MIN_PRECISION_BITS}, "
                f"got {self.precision_bits}"
            )

    # -- context plumbing ---------------------------------------------------

    def activate(self, extra_bits: int = 0):
        """Context manager installing this precision as the gmpy2 context.

        All MPFR arithmetic (including bare ``+``/``*`` between mpfr
        values) must run inside an activated context; the previous gmpy2
        context is restored on exit.
        """
        return gmpy2.context(precision=self.precision_bits + extra_bits)

    def widened(self, factor: int = 2) -> "PrecisionContext":
        """A context with ``factor`` times the working precision."""
        return PrecisionContext(precision_bits=self.precision_bits * factor)

    def real(self, x: Real) -> mpfr:
        """Convert ``x`` to an mpfr at this context's precision."""
        with self.activate():
            if isinstance(x, Fraction):
                return mpfr(gmpy2.mpq(x.numerator, x.denominator))
            return mpfr(x)

    # -- constants ----------------------------------------------------------

    @property
    def ln2(self) -> mpfr:
        with self.activate():
            return gmpy2.const_log2()

    # -- elementary functions -----------------------------------------------

    def log(self, x: Real) -> mpfr:
        with self.activate():
            v = self.real(x)
            if v <= 0:
                raise DomainError(f"log requires x > 0, got {v}")
            return gmpy2.log(v)

    def log2(self, x: Real) -> mpfr:
        with self.activate():
            v = self.real(x)
            if v <= 0:
                raise DomainError(f"log2 requires x > 0, got {v}")
            return gmpy2.log2(v)

    def log10(self, x: Real) -> mpfr:
        with self.activate():
            v = self.real(x)
            if v <= 0:
                raise DomainError(f"log10 requires x > 0, got {v}")
            return gmpy2.log10(v)

    def exp(self, x: Real) -> mpfr:
        with self.activate():
            return gmpy2.exp(self.real(x))

    def exp2(self, x: Real) -> mpfr:
        with self.activate():
            return gmpy2.exp2(self.real(x))

    def sqrt(self, x: Real) -> mpfr:
        with self.activate():
            v = self.real(x)
            if v < 0:
                raise DomainError(f"sqrt requires x >= 0, got {v}")
            return gmpy2.sqrt(v)

    def pow(self, base: Real, exponent: Real) -> mpfr:
        with self.activate():
            return self.real(base) ** self.real(exponent)

    def erfc(self, x: Real) -> mpfr:
        with self.activate():
            return gmpy2.erfc(self.real(x))

    # -- stable primitives ----------------------------------------------------

    def log1p(self, x: Real) -> mpfr:
        """ln(1+x), accurate for |x| far below one ulp of 1.

        Correctly rounded by MPFR, so the relative error is at most one
        ulp at the working precision.  Domain: x > -1.
        """
        with self.activate():
            v = self.real(x)
            if v <= -1:
                raise DomainError(f"log1p requires x > -1, got {v}")
            return gmpy2.log1p(v)

    def expm1(self, x: Real) -> mpfr:
        """e^x - 1, accurate near x = 0.  Correctly rounded for finite x."""
        with self.activate():
            v = self.real(x)
            if not gmpy2.is_finite(v):
                raise DomainError(f"expm1 requires finite x, got {v}")
            return gmpy2.expm1(v)

    def lgamma(self, x: Real) -> mpfr:
        """ln Gamma(x) for x > 0."""
        with self.activate():
            v = self.real(x)
            if v <= 0:
                raise DomainError(f"lgamma requires x > 0, got {v}")
            value, _sign = gmpy2.lgamma(v)
            return value

    def one_minus_pow(self, base_complement: Real, exponent: Real) -> mpfr:
        """1 - (1-f)^M for f = ``base_complement``, M = ``exponent``.

        Evaluated as -expm1(M * log1p(-f)), which survives f down to the
        smallest representable magnitudes and M beyond 1e18.  Result is in
        [0, 1] and nondecreasing in both arguments.
        """
        with self.activate():
            f = self.real(base_complement)
            m = self.real(exponent)
            if not (0 <= f <= 1):
                raise DomainError(
                    f"base_complement must be in [0, 1], got {f}"
                )
            if m < 0:
                raise DomainError(f"exponent must be >= 0, got {m}")
            if m == 0 or f == 0:
                return mpfr(0)
            if f == 1:
                return mpfr(1)
            return -gmpy2.expm1(m * gmpy2.log1p(-f))

    def ln_one_minus_pow_complement(
        self, base_complement: Real, exponent: Real
    ) -> mpfr:
        """ln((1-f)^M) = M * log1p(-f); the log-space complement of
        :meth:`one_minus_pow`.  Finite for f < 1."""
        with self.activate():
            f = self.real(base_complement)
            m = self.real(exponent)
            if not (0 <= f < 1):
                raise DomainError(
                    f"base_complement must be in [0, 1), got {f}"
                )
            if m < 0:
                raise DomainError(f"exponent must be >= 0, got {m}")
            return m * gmpy2.log1p(-f)


DEFAULT_CONTEXT = PrecisionContext()


def relative_error(value: Real, reference: Real, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpfr:
    """|value - reference| / |reference|, evaluated at twice the working
    precision so the comparison itself does not round away the error.
    Returns the absolute difference when the reference is zero."""
    wide = ctx.widened()
    with wide.activate():
        v = wide.real(value)
        r = wide.real(reference)
        if r == 0:
            return abs(v)
        return abs(v - r) / abs(r)
