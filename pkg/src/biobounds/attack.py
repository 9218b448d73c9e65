"""Untargeted-attack complexity bounds, critical population, and critical FMR.

An untargeted attacker submits one probe per round against a database of N
enrolled users and wins when it falsely matches any of them.  With per-user
false match rate f, the per-round success probability is p = 1-(1-f)^N and
the attack length follows the law of first success; its median is
ceil(-1/log2(1-p)).

Two dependence models bound that median:

* independent events within a round:
      ln2/(N(f+f^2))  <=  median  <=  ln2/(N f)
* no independence assumed (Bonferroni), valid for f <= 1/(2N):
      ln2/(N f + N^2 f^2)  <=  median  <=  ln2/f

When the FMR is known only through a confidence interval, the upper CI bound
is substituted into the lower attack bound and the lower CI bound into the
upper one: an attacker benefits from the worst plausible accuracy.

Security levels are carried as log2(attempts) throughout; products like
N * 2^128 never materialize in linear scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import gmpy2
from gmpy2 import mpfr

from .numerics import DEFAULT_CONTEXT, DomainError, PrecisionContext, Real
from .stats import ConfidenceInterval, normal_quantile

__all__ = [
    "SecurityLevel",
    "Population",
    "AttackBounds",
    "CriticalPopulation",
    "ParadoxEstimate",
    "INDEPENDENT",
    "DEPENDENT",
    "geometric_median",
    "untargeted_bounds",
    "critical_population",
    "critical_fmr_untargeted",
    "confidence_paradox_n",
]

INDEPENDENT = "independent"
DEPENDENT = "dependent"

FmrLike = Union[int, float, str, mpfr, ConfidenceInterval]


@dataclass(frozen=True)
class SecurityLevel:
    """Required attacker work S = 2^log2_attempts."""

    log2_attempts: float

    def __post_init__(self) -> None:
        if not self.log2_attempts >= 0:
            raise DomainError(
                f"log2_attempts must be >= 0, got {self.log2_attempts}"
            )

    @classmethod
    def from_bits(cls, bits: float) -> "SecurityLevel":
        return cls(log2_attempts=float(bits))

    @classmethod
    def from_attempts(cls, attempts: int) -> "SecurityLevel":
        if attempts < 1:
            raise DomainError(f"attempts must be >= 1, got {attempts}")
        import math

        return cls(log2_attempts=math.log2(attempts))


@dataclass(frozen=True)
class Population:
    """Number of enrolled users."""

    n_users: int

    def __post_init__(self) -> None:
        if self.n_users < 1:
            raise DomainError(f"n_users must be >= 1, got {self.n_users}")


@dataclass(frozen=True)
class AttackBounds:
    """Lower/upper bounds on the median untargeted-attack rounds, in log2.

    ``fmr_basis`` records whether a point FMR or a confidence interval fed
    the bounds.  With ``authentication_mode`` the attacker must replay each
    guess against every claimed identity, scaling the work by N (adds
    log2(N) to both bounds).
    """

    log2_lower: mpfr
    log2_upper: mpfr
    model: str
    fmr_basis: str
    authentication_mode: bool
    precision_bits: int

    def __post_init__(self) -> None:
        if not self.log2_lower <= self.log2_upper:
            raise DomainError(
                f"bounds out of order: lower {self.log2_lower} > upper {self.log2_upper}"
            )


@dataclass(frozen=True)
class CriticalPopulation:
    """Largest population preserving a security level; 0 when unattainable."""

    n_users: int
    log2_n_users: mpfr
    unattainable: bool
    precision_bits: int


@dataclass(frozen=True)
class ParadoxEstimate:
    """Comparisons needed before the CI upper bound can certify a critical FMR.

    The upper confidence bound must fall below the critical FMR for the
    certification to mean anything; the comparison budget for that grows
    roughly like N * S, which is what makes empirical certification of high
    security levels infeasible.
    """

    n_comparisons: int
    log2_n_comparisons: mpfr
    critical_fmr: mpfr
    gap_width: mpfr
    normal_quantile: mpfr
    alpha: float
    precision_bits: int


def geometric_median(success_prob: Real, ctx: PrecisionContext = DEFAULT_CONTEXT) -> int:
    """Median round of the first success: ceil(-1/log2(1-p)).

    Computed through log1p so p down to the smallest representable
    magnitudes keeps full accuracy.
    """
    with ctx.activate():
        p = ctx.real(success_prob)
        if not (0 < p < 1):
            raise DomainError(f"success probability must be in (0, 1), got {p}")
        # -1/log2(1-p) = ln2 / -ln(1-p)
        return int(gmpy2.ceil(ctx.ln2 / -gmpy2.log1p(-p)))


def _bound_side_fmrs(fmr_or_ci: FmrLike, ctx: PrecisionContext) -> tuple[mpfr, mpfr, str]:
    """(f for the lower bound, f for the upper bound, basis label)."""
    if isinstance(fmr_or_ci, ConfidenceInterval):
        return ctx.real(fmr_or_ci.upper), ctx.real(fmr_or_ci.lower), "ci"
    f = ctx.real(fmr_or_ci)
    return f, f, "point"


def untargeted_bounds(
    fmr_or_ci: FmrLike,
    pop: Population,
    model: str = INDEPENDENT,
    authentication_mode: bool = False,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> AttackBounds:
    """Bounds on the median rounds an untargeted attacker needs, in log2."""
    if model not in (INDEPENDENT, DEPENDENT):
        raise DomainError(f"model must be '{INDEPENDENT}' or '{DEPENDENT}', got {model!r}")
    with ctx.activate():
        f_low, f_up, basis = _bound_side_fmrs(fmr_or_ci, ctx)
        for label, f in (("lower-bound", f_low), ("upper-bound", f_up)):
            if not (0 < f < 1):
                raise DomainError(
                    f"{label} FMR must be in (0, 1), got {f}"
                    + (" (degenerate confidence bound)" if basis == "ci" else "")
                )
        n = ctx.real(pop.n_users)
        lg_ln2 = gmpy2.log2(ctx.ln2)
        lg_n = gmpy2.log2(n)
        if model == DEPENDENT:
            limit = 1 / (2 * n)
            if f_low > limit or f_up > limit:
                raise DomainError(
                    f"dependent model requires FMR <= 1/(2N) = {limit}; "
                    f"got FMR values up to {max(f_low, f_up)}"
                )
            log2_lower = lg_ln2 - gmpy2.log2(n * f_low + n * n * f_low * f_low)
            log2_upper = lg_ln2 - gmpy2.log2(f_up)
        else:
            log2_lower = lg_ln2 - lg_n - gmpy2.log2(f_low + f_low * f_low)
            log2_upper = lg_ln2 - lg_n - gmpy2.log2(f_up)
        if authentication_mode:
            log2_lower += lg_n
            log2_upper += lg_n
        return AttackBounds(
            log2_lower=log2_lower,
            log2_upper=log2_upper,
            model=model,
            fmr_basis=basis,
            authentication_mode=authentication_mode,
            precision_bits=ctx.precision_bits,
        )


def critical_population(
    fmr_or_ciu: Real,
    sec: SecurityLevel,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> CriticalPopulation:
    """floor(ln2 / (S (f + f^2))): the largest N keeping the attack above S.

    Pass the CI upper bound instead of the point estimate for a worst-case
    reading.  A result below one user means the security level is
    unattainable at this accuracy; n_users is then 0 and flagged.
    """
    with ctx.activate():
        f = ctx.real(fmr_or_ciu)
        if not (0 < f < 1):
            raise DomainError(f"FMR must be in (0, 1), got {f}")
        s_bits = ctx.real(sec.log2_attempts)
        log2_n = gmpy2.log2(ctx.ln2) - s_bits - gmpy2.log2(f + f * f)
        if log2_n < 0:
            return CriticalPopulation(
                n_users=0,
                log2_n_users=log2_n,
                unattainable=True,
                precision_bits=ctx.precision_bits,
            )
        n_users = int(gmpy2.floor(gmpy2.exp2(log2_n)))
        return CriticalPopulation(
            n_users=n_users,
            log2_n_users=log2_n,
            unattainable=n_users < 1,
            precision_bits=ctx.precision_bits,
        )


def critical_fmr_untargeted(
    pop: Population,
    sec: SecurityLevel,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> mpfr:
    """Largest FMR for which N users still give S bits against untargeted attacks.

    The positive root of f^2 + f - ln2/(N S) = 0, evaluated in the
    cancellation-free form x / (1/2 + sqrt(1/4 + x)) with x = ln2/(N S);
    the textbook sqrt(1/4 + x) - 1/2 loses every digit once x ~ 1e-48 in
    double precision.
    """
    with ctx.activate():
        n = ctx.real(pop.n_users)
        s_bits = ctx.real(sec.log2_attempts)
        # x = ln2 / (N * 2^s_bits), formed in log space
        ln_x = gmpy2.log(ctx.ln2) - gmpy2.log(n) - s_bits * ctx.ln2
        x = gmpy2.exp(ln_x)
        return x / (mpfr("0.5") + gmpy2.sqrt(mpfr("0.25") + x))


def confidence_paradox_n(
    pop: Population,
    sec: SecurityLevel,
    alpha: float = 0.05,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> ParadoxEstimate:
    """Comparison budget for the CI upper bound to fit under the critical FMR.

    Sizing rule: the CI half-width must shrink to w = f_crit/2, which a
    normal approximation prices at n ~ c^2 f_crit (1 - f_crit) / w^2 with c
    the two-sided normal quantile at ``alpha``.  The w choice is a modeling
    decision; any fixed fraction of f_crit gives the same N*S growth.
    """
    if not (0 < alpha < 1):
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    with ctx.activate():
        f_crit = critical_fmr_untargeted(pop, sec, ctx)
        c = normal_quantile(1 - alpha / 2, ctx)
        w = f_crit / 2
        n_real = c * c * f_crit * (1 - f_crit) / (w * w) + 1
        return ParadoxEstimate(
            n_comparisons=int(gmpy2.ceil(n_real)),
            log2_n_comparisons=gmpy2.log2(n_real),
            critical_fmr=f_crit,
            gap_width=w,
            normal_quantile=c,
            alpha=alpha,
            precision_bits=ctx.precision_bits,
        )
