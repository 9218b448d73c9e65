"""Database collision ("biometric birthday") probabilities, approximate and exact.

A weak collision is any pair of enrolled users whose templates falsely
match.  With N users there are n_pairs = N(N-1)/2 unordered pairs; under
pairwise independence the no-collision probability is (1-f)^n_pairs, which
is the classical birthday approximation.

The exact model drops the independence assumption by treating the reference
pool the FMR was measured on as an urn: of the k_pairs reference pairs,
(1-f) * k_pairs do not falsely match, and drawing n_pairs deployment pairs
without replacement gives

    Q = prod_{i=1..n_pairs} ((1-f) k_pairs - i + 1) / (k_pairs - i + 1)
      = C((1-f) k_pairs, n_pairs) / C(k_pairs, n_pairs)

evaluated through lgamma differences so (1-f) * k_pairs may stay real.
Once the non-matching pairs are exhausted ((1-f) k_pairs - n_pairs + 1 <= 0)
the product vanishes and the collision probability is exactly 1.  As the
reference pool grows, Q converges to the birthday approximation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import gmpy2
from gmpy2 import mpfr

from .attack import Population
from .numerics import DEFAULT_CONTEXT, DomainError, PrecisionContext, Real
from .stats import ConfidenceInterval, FmrEstimate, confidence_interval

__all__ = [
    "PairCount",
    "ReferencePool",
    "CollisionResult",
    "BirthdayCriticalPopulation",
    "birthday_approx",
    "birthday_critical_population",
    "birthday_critical_fmr",
    "birthday_exact",
    "collision_probability_from_pairs",
    "exact_vs_approx_gap",
    "reference_pool_interval",
]

FmrLike = Union[int, float, str, mpfr, ConfidenceInterval]

APPROXIMATE = "approximate"
EXACT = "exact"


def _pairs(n: int) -> int:
    return n * (n - 1) // 2


@dataclass(frozen=True)
class PairCount:
    """Deployment population N and its unordered pair count N(N-1)/2.

    Counts are exact Python integers; they exceed 64-bit range around
    six billion users and the arithmetic must not care.
    """

    n_users: int
    n_pairs: int

    def __post_init__(self) -> None:
        if self.n_users < 0:
            raise DomainError(f"n_users must be >= 0, got {self.n_users}")
        if self.n_pairs != _pairs(self.n_users):
            raise DomainError(
                f"n_pairs must equal n_users(n_users-1)/2 = {_pairs(self.n_users)}, "
                f"got {self.n_pairs}"
            )

    @classmethod
    def from_users(cls, n_users: int) -> "PairCount":
        return cls(n_users=n_users, n_pairs=_pairs(n_users))


@dataclass(frozen=True)
class ReferencePool:
    """Users (and pairs) behind the FMR measurement."""

    k_users: int
    k_pairs: int

    def __post_init__(self) -> None:
        if self.k_users < 2:
            raise DomainError(f"k_users must be >= 2, got {self.k_users}")
        if self.k_pairs != _pairs(self.k_users):
            raise DomainError(
                f"k_pairs must equal k_users(k_users-1)/2 = {_pairs(self.k_users)}, "
                f"got {self.k_pairs}"
            )

    @classmethod
    def from_users(cls, k_users: int) -> "ReferencePool":
        return cls(k_users=k_users, k_pairs=_pairs(k_users))


@dataclass(frozen=True)
class CollisionResult:
    """Collision probability with optional CI-propagated bounds.

    ``ln_complement`` (natural log of the no-collision probability) is the
    lossless field: in large deployments the linear ``complement`` underflows
    to 0 and ``probability`` rounds to 1, which is correct at any output
    precision but destroys the information ln_complement retains.

    ``zero_case`` marks exhaustion of non-matching reference pairs (the
    collision probability is exactly 1).  ``zero_case_conservative`` is the
    looser exhaustion test (1-f) k_pairs - 1 <= n_pairs sometimes quoted for
    this condition; when the two disagree the product form is still positive,
    so only ``zero_case`` forces the probability to 1.
    """

    probability: mpfr
    complement: mpfr
    ln_complement: mpfr
    pair_count: PairCount
    method: str
    precision_bits: int
    lower: Optional[mpfr] = None
    upper: Optional[mpfr] = None
    reference_pool: Optional[ReferencePool] = None
    zero_case: bool = False
    zero_case_conservative: bool = False

    def __post_init__(self) -> None:
        if not (0 <= self.probability <= 1):
            raise DomainError(f"probability must be in [0, 1], got {self.probability}")
        if (self.lower is None) != (self.upper is None):
            raise DomainError("lower/upper bounds must be supplied together")
        if self.lower is not None:
            if not (0 <= self.lower <= self.probability <= self.upper <= 1):
                raise DomainError(
                    f"bounds must satisfy 0 <= lower <= probability <= upper <= 1, "
                    f"got {self.lower}, {self.probability}, {self.upper}"
                )


@dataclass(frozen=True)
class BirthdayCriticalPopulation:
    """Largest N keeping the approximate collision probability below a target.

    ``n_users`` floors the exact quadratic root
    1/2 + sqrt(1 + 8 ln(1-p)/ln(1-f))/2; ``sqrt_approximation`` is the
    widely used shortcut sqrt(2 ln(1-p)/ln(1-f)), reported alongside.
    """

    n_users: int
    quadratic_root: mpfr
    sqrt_approximation: mpfr
    precision_bits: int


def _split_fmr(fmr_or_ci: FmrLike, ctx: PrecisionContext):
    """(point value, CIL, CIU) with CIL/CIU None for a point input."""
    if isinstance(fmr_or_ci, ConfidenceInterval):
        mid = (ctx.real(fmr_or_ci.lower) + ctx.real(fmr_or_ci.upper)) / 2
        return mid, ctx.real(fmr_or_ci.lower), ctx.real(fmr_or_ci.upper)
    return ctx.real(fmr_or_ci), None, None


def birthday_approx(
    fmr_or_ci: FmrLike,
    pop: Population,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> CollisionResult:
    """Independence approximation 1 - (1-f)^{N(N-1)/2}.

    With a confidence interval, the lower bound substitutes the CI lower
    bound and the upper bound the CI upper bound (the probability is
    increasing in f).
    """
    pair_count = PairCount.from_users(pop.n_users)
    with ctx.activate():
        f, cil, ciu = _split_fmr(fmr_or_ci, ctx)
        if not (0 <= f < 1):
            raise DomainError(f"FMR must be in [0, 1), got {f}")
        m = ctx.real(pair_count.n_pairs)
        ln_q = ctx.ln_one_minus_pow_complement(f, m)
        lower = upper = None
        if cil is not None:
            lower = ctx.one_minus_pow(cil, m)
            upper = ctx.one_minus_pow(ciu, m)
        return CollisionResult(
            probability=-gmpy2.expm1(ln_q),
            complement=gmpy2.exp(ln_q),
            ln_complement=ln_q,
            pair_count=pair_count,
            method=APPROXIMATE,
            precision_bits=ctx.precision_bits,
            lower=lower,
            upper=upper,
        )


def birthday_critical_population(
    fmr_or_cil: Real,
    p_max: Real,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> BirthdayCriticalPopulation:
    """Largest N with collision probability at most p_max.

    Pass the CI lower bound of the FMR for the optimistic reading used when
    dimensioning against collisions.  Logs go through log1p so FMRs near 0
    survive.
    """
    with ctx.activate():
        f = ctx.real(fmr_or_cil)
        p = ctx.real(p_max)
        if not (0 < f < 1):
            raise DomainError(f"FMR must be in (0, 1), got {f}")
        if not (0 < p < 1):
            raise DomainError(f"p_max must be in (0, 1), got {p}")
        ratio = gmpy2.log1p(-p) / gmpy2.log1p(-f)  # ln(1-p)/ln(1-f) >= 0
        root = mpfr("0.5") + gmpy2.sqrt(1 + 8 * ratio) / 2
        return BirthdayCriticalPopulation(
            n_users=int(gmpy2.floor(root)),
            quadratic_root=root,
            sqrt_approximation=gmpy2.sqrt(2 * ratio),
            precision_bits=ctx.precision_bits,
        )


def birthday_critical_fmr(
    pop: Population,
    p_max: Real,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> mpfr:
    """Largest FMR keeping the collision probability of N users below p_max.

    1 - e^{ln(1-p)/n_pairs}, evaluated as -expm1(log1p(-p)/n_pairs).
    """
    if pop.n_users < 2:
        raise DomainError(
            "population below 2 users has no pairs; collisions are impossible "
            "and no FMR constraint applies"
        )
    pair_count = PairCount.from_users(pop.n_users)
    with ctx.activate():
        p = ctx.real(p_max)
        if not (0 < p < 1):
            raise DomainError(f"p_max must be in (0, 1), got {p}")
        return -gmpy2.expm1(gmpy2.log1p(-p) / ctx.real(pair_count.n_pairs))


def _exact_ln_no_collision(
    f: mpfr,
    k_pairs: int,
    n_pairs: int,
    integer_rounding: bool,
) -> tuple[Optional[mpfr], bool, bool]:
    """(ln Q, zero_case, zero_case_conservative); ln Q is None when Q = 0.

    Must run inside an activated gmpy2 context.
    """
    kp = mpfr(k_pairs)
    nd = mpfr(n_pairs)
    m = (1 - f) * kp
    if integer_rounding:
        m = gmpy2.rint(m)
    zero_conservative = bool(m - 1 <= nd)
    if f == 0 or n_pairs == 0:
        # lgamma cancellation would leave one-ulp noise where Q is exactly 1
        return mpfr(0), False, zero_conservative
    if m - nd + 1 <= 0:
        return None, True, zero_conservative
    ln_q = (
        gmpy2.lgamma(m + 1)[0]
        - gmpy2.lgamma(m - nd + 1)[0]
        - gmpy2.lgamma(kp + 1)[0]
        + gmpy2.lgamma(kp - nd + 1)[0]
    )
    # rounding can push the log of a probability marginally above 0
    return min(ln_q, mpfr(0)), False, zero_conservative


def collision_probability_from_pairs(
    fmr: Real,
    k_pairs: int,
    n_pairs: int,
    integer_rounding: bool = False,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> mpfr:
    """Exact collision probability over raw pair counts.

    Same urn kernel as :func:`birthday_exact`, for callers (and the
    enumeration oracle) that work with pair counts directly rather than
    user counts; pair counts need not be triangular numbers here.
    """
    if n_pairs < 0 or k_pairs < 1:
        raise DomainError(f"need k_pairs >= 1 and n_pairs >= 0, got {k_pairs}, {n_pairs}")
    if n_pairs > k_pairs:
        raise DomainError(
            f"n_pairs {n_pairs} exceeds k_pairs {k_pairs}; the urn model cannot extrapolate"
        )
    with ctx.activate():
        f = ctx.real(fmr)
        if not (0 <= f <= 1):
            raise DomainError(f"FMR must be in [0, 1], got {f}")
        ln_q, zero, _ = _exact_ln_no_collision(f, k_pairs, n_pairs, integer_rounding)
        if zero:
            return mpfr(1)
        return -gmpy2.expm1(ln_q)


def birthday_exact(
    fmr_or_ci: FmrLike,
    ref: ReferencePool,
    pop: Population,
    integer_rounding: bool = False,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> CollisionResult:
    """Exact collision probability for N users against a finite reference pool.

    Requires n_pairs <= k_pairs: a deployment larger than the reference pool
    would have to extrapolate the urn model, which is undefined, so it is
    rejected.  ``integer_rounding`` snaps the non-matching pair count
    (1-f) * k_pairs to the nearest integer, which is what exact combinatorial
    cross-checks assume; the default keeps it real, preserving continuity
    in f.

    When built from an estimate, the confidence interval for this model uses
    the reference pool's pair count as the comparison count (see
    :func:`reference_pool_interval`).
    """
    pair_count = PairCount.from_users(pop.n_users)
    if pair_count.n_pairs > ref.k_pairs:
        raise DomainError(
            f"deployment pair count {pair_count.n_pairs} exceeds reference pool "
            f"pair count {ref.k_pairs}; the exact model cannot extrapolate"
        )
    with ctx.activate():
        f, cil, ciu = _split_fmr(fmr_or_ci, ctx)
        if not (0 <= f <= 1):
            raise DomainError(f"FMR must be in [0, 1], got {f}")

        def one_probability(fv: mpfr) -> tuple[mpfr, mpfr, mpfr, bool, bool]:
            ln_q, zero, zero_cons = _exact_ln_no_collision(
                fv, ref.k_pairs, pair_count.n_pairs, integer_rounding
            )
            if zero:
                return mpfr(1), mpfr(0), mpfr("-inf"), zero, zero_cons
            return -gmpy2.expm1(ln_q), gmpy2.exp(ln_q), ln_q, zero, zero_cons

        prob, comp, ln_q, zero, zero_cons = one_probability(f)
        lower = upper = None
        if cil is not None:
            # monotone in f, so the midpoint probability lands inside
            lower = one_probability(cil)[0]
            upper = one_probability(ciu)[0]
        return CollisionResult(
            probability=prob,
            complement=comp,
            ln_complement=ln_q,
            pair_count=pair_count,
            method=EXACT,
            precision_bits=ctx.precision_bits,
            lower=lower,
            upper=upper,
            reference_pool=ref,
            zero_case=zero,
            zero_case_conservative=zero_cons,
        )


def exact_vs_approx_gap(
    fmr: Real,
    pop: Population,
    k_users_sweep: Sequence[int],
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> list[tuple[int, mpfr]]:
    """|P_exact(K) - P_approx| over a sweep of reference pool sizes K.

    The gap shrinks as K grows; for fixed (f, N) the sequence over an
    increasing sweep is decreasing, which is the convergence of the urn
    model to the independence approximation.
    """
    approx = birthday_approx(fmr, pop, ctx)
    gaps: list[tuple[int, mpfr]] = []
    with ctx.activate():
        for k_users in k_users_sweep:
            exact = birthday_exact(fmr, ReferencePool.from_users(k_users), pop, ctx=ctx)
            gaps.append((k_users, abs(exact.probability - approx.probability)))
    return gaps


def reference_pool_interval(
    fmr_hat: float,
    ref: ReferencePool,
    alpha: float = 0.05,
    sided: str = "two_sided",
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> ConfidenceInterval:
    """Confidence interval for an FMR measured over a reference pool.

    The comparison count is the pool's pair count, and the variance divides
    by n-1 as everywhere else in this library; a variant with denominator n
    circulates for this model, an off-by-one that is negligible for pools
    beyond ~100 pairs.
    """
    est = FmrEstimate(fmr_hat=fmr_hat, n_comparisons=ref.k_pairs, alpha=alpha)
    return confidence_interval(est, sided=sided, ctx=ctx)
