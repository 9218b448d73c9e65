"""Empirical false-match-rate estimation and Student-t confidence intervals.

The FMR estimator follows the step-function convention used in 1:1
verification evaluations: a comparison with impostor score v counts as a
false match when H(T - v) = 1, with H(0) = 1.  Taken literally this means
scores at or below the threshold T count as false matches (a distance-like
score convention); callers with similarity scores where higher means closer
should negate scores and threshold, or pass counts directly.

The t quantile is computed from scratch at the working precision: the CDF
via the regularized incomplete beta function (modified Lentz continued
fraction) and the quantile by bracketed root-finding.  Degrees of freedom
above ``NORMAL_FALLBACK_DF`` use the normal quantile, which matches the t
quantile to well below the accuracy anyone needs at that point.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable

import gmpy2
from gmpy2 import mpfr

from .numerics import DEFAULT_CONTEXT, DomainError, PrecisionContext, Real

__all__ = [
    "ScoreVector",
    "FmrEstimate",
    "ConfidenceInterval",
    "estimate_fmr",
    "t_quantile",
    "normal_quantile",
    "confidence_interval",
    "NORMAL_FALLBACK_DF",
    "QUANTILE_REL_TOL",
]

#: Above this df the t quantile is indistinguishable from the normal one at
#: any tolerance this library promises (the printed tables already agree to
#: three decimals at df = 1e4).
NORMAL_FALLBACK_DF = 10**6

#: Relative tolerance of the quantile root-finder.
QUANTILE_REL_TOL = 1e-10

TWO_SIDED = "two_sided"
ONE_SIDED = "one_sided"


@dataclass(frozen=True)
class ScoreVector:
    """Impostor comparison scores plus the decision threshold."""

    scores: tuple[float, ...]
    threshold: float

    def __post_init__(self) -> None:
        if len(self.scores) == 0:
            raise DomainError("score vector must be non-empty")

    @classmethod
    def from_iterable(cls, scores: Iterable[float], threshold: float) -> "ScoreVector":
        return cls(scores=tuple(float(s) for s in scores), threshold=float(threshold))

    @classmethod
    def from_text(cls, text: str, threshold: float) -> "ScoreVector":
        """Parse single-column numeric text, one score per line.

        Blank lines and lines starting with '#' are skipped.
        """
        scores = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                scores.append(float(line))
            except ValueError as exc:
                raise DomainError(f"line {lineno}: not a number: {line!r}") from exc
        return cls.from_iterable(scores, threshold)


@dataclass(frozen=True)
class FmrEstimate:
    """Empirical FMR with the comparison count and significance level.

    ``n_comparisons >= 2`` is required before a confidence interval can be
    attached (the variance estimate divides by n-1); the estimate itself is
    well-defined from a single comparison.
    """

    fmr_hat: float
    n_comparisons: int
    alpha: float = 0.05

    def __post_init__(self) -> None:
        if not (0 <= self.fmr_hat <= 1):
            raise DomainError(f"fmr_hat must be in [0, 1], got {self.fmr_hat}")
        if self.n_comparisons < 1:
            raise DomainError(f"n_comparisons must be >= 1, got {self.n_comparisons}")
        if not (0 < self.alpha < 1):
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha}")

    @classmethod
    def from_counts(
        cls, false_matches: int, total_comparisons: int, alpha: float = 0.05
    ) -> "FmrEstimate":
        if total_comparisons < 1:
            raise DomainError("total_comparisons must be >= 1")
        if not (0 <= false_matches <= total_comparisons):
            raise DomainError(
                f"false_matches must be in [0, {total_comparisons}], got {false_matches}"
            )
        return cls(
            fmr_hat=false_matches / total_comparisons,
            n_comparisons=total_comparisons,
            alpha=alpha,
        )


@dataclass(frozen=True)
class ConfidenceInterval:
    """Clamped confidence interval [lower, upper] on the FMR.

    ``degenerate`` flags the zero-variance case fmr_hat in {0, 1}, where the
    interval collapses to a point; downstream formulas remain well-defined,
    so this is a flag rather than an error.
    """

    lower: mpfr
    upper: mpfr
    c_alpha: mpfr
    sided: str
    degenerate: bool
    precision_bits: int

    def __post_init__(self) -> None:
        if not (0 <= self.lower <= self.upper <= 1):
            raise DomainError(
                f"interval must satisfy 0 <= lower <= upper <= 1, "
                f"got [{self.lower}, {self.upper}]"
            )

    @property
    def width(self) -> mpfr:
        return self.upper - self.lower


def estimate_fmr(scores: ScoreVector, alpha: float = 0.05) -> FmrEstimate:
    """Empirical FMR: the fraction of impostor scores v with H(T - v) = 1.

    H is the unit step with H(0) = 1, so v <= T counts as a false match.
    """
    false_matches = sum(1 for v in scores.scores if scores.threshold - v >= 0)
    return FmrEstimate(
        fmr_hat=false_matches / len(scores.scores),
        n_comparisons=len(scores.scores),
        alpha=alpha,
    )


# ---------------------------------------------------------------------------
# Student-t CDF via the regularized incomplete beta function
# ---------------------------------------------------------------------------


def _ln_beta(a: mpfr, b: mpfr) -> mpfr:
    va, _ = gmpy2.lgamma(a)
    vb, _ = gmpy2.lgamma(b)
    vab, _ = gmpy2.lgamma(a + b)
    return va + vb - vab


def _beta_cf(a: mpfr, b: mpfr, x: mpfr, eps: mpfr, max_iter: int) -> mpfr:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = mpfr(2) ** (-8 * gmpy2.get_context().precision)
    qab = a + b
    qap = a + 1
    qam = a - 1
    c = mpfr(1)
    d = 1 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        # even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1 / d
        h *= d * c
        # odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) < eps:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge "
        f"(a={a}, b={b}, x={x}, {max_iter} iterations)"
    )


def _betainc_regularized(a: mpfr, b: mpfr, x: mpfr, xc: mpfr) -> mpfr:
    """Regularized incomplete beta I_x(a, b).

    ``xc`` is 1-x supplied by the caller from an exact formula, so the
    symmetric branch does not lose digits to cancellation.
    """
    if x == 0:
        return mpfr(0)
    if xc == 0:
        return mpfr(1)
    eps = mpfr(2) ** (-(gmpy2.get_context().precision + 8))
    max_iter = 100_000
    front_ln = a * gmpy2.log(x) + b * gmpy2.log(xc) - _ln_beta(a, b)
    if x < (a + 1) / (a + b + 2):
        return gmpy2.exp(front_ln) * _beta_cf(a, b, x, eps, max_iter) / a
    return 1 - gmpy2.exp(front_ln) * _beta_cf(b, a, xc, eps, max_iter) / b


def _student_t_cdf(t: mpfr, df: mpfr) -> mpfr:
    """P(T_df <= t).  Must run inside an activated gmpy2 context."""
    if t == 0:
        return mpfr("0.5")
    tt = t * t
    denom = df + tt
    x = df / denom
    xc = tt / denom
    upper_tail = _betainc_regularized(df / 2, mpfr("0.5"), x, xc) / 2
    if t > 0:
        return 1 - upper_tail
    return upper_tail


def _bracketed_root(fn, lo: mpfr, hi: mpfr, rel_tol: mpfr, max_iter: int = 500) -> mpfr:
    """Root of increasing ``fn`` on [lo, hi] by the Illinois method.

    Requires fn(lo) <= 0 <= fn(hi).
    """
    flo = fn(lo)
    fhi = fn(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if not (flo < 0 < fhi):
        raise ArithmeticError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    side = 0
    x = lo
    for _ in range(max_iter):
        x = (flo * hi - fhi * lo) / (flo - fhi)
        if not (lo < x < hi):
            x = (lo + hi) / 2
        fx = fn(x)
        if fx == 0:
            return x
        if fx < 0:
            lo = x
            flo = fx
            if side == -1:
                fhi /= 2
            side = -1
        else:
            hi = x
            fhi = fx
            if side == 1:
                flo /= 2
            side = 1
        if hi - lo <= rel_tol * max(abs(x), mpfr("1e-30")):
            return x
    return x


def normal_quantile(tail_prob: Real, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpfr:
    """z with P(Z <= z) = tail_prob for standard normal Z, tail_prob in [0.5, 1)."""
    with ctx.activate():
        p = ctx.real(tail_prob)
        if not (mpfr("0.5") <= p < 1):
            raise DomainError(f"tail_prob must be in [0.5, 1), got {p}")
        if p == mpfr("0.5"):
            return mpfr(0)
        sqrt2 = gmpy2.sqrt(mpfr(2))

        def phi_minus_p(z: mpfr) -> mpfr:
            return 1 - gmpy2.erfc(z / sqrt2) / 2 - p

        hi = mpfr(1)
        while phi_minus_p(hi) < 0:
            hi *= 2
            if hi > mpfr("1e6"):
                raise ArithmeticError("normal quantile bracket expansion failed")
        return _bracketed_root(phi_minus_p, mpfr(0), hi, mpfr(QUANTILE_REL_TOL))


@functools.lru_cache(maxsize=4096)
def _t_quantile_cached(df: int, tail_prob_str: str, precision_bits: int) -> mpfr:
    ctx = PrecisionContext(precision_bits)
    with ctx.activate():
        p = mpfr(tail_prob_str)
        if p == mpfr("0.5"):
            return mpfr(0)
        nu = mpfr(df)

        def cdf_minus_p(t: mpfr) -> mpfr:
            return _student_t_cdf(t, nu) - p

        hi = mpfr(1)
        while cdf_minus_p(hi) < 0:
            hi *= 4
            if hi > mpfr("1e400"):
                raise ArithmeticError("t quantile bracket expansion failed")
        return _bracketed_root(cdf_minus_p, mpfr(0), hi, mpfr(QUANTILE_REL_TOL))


def t_quantile(df: int, tail_prob: Real, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpfr:
    """c with P(T_df <= c) = tail_prob, for tail_prob in [0.5, 1).

    Above ``NORMAL_FALLBACK_DF`` degrees of freedom the normal quantile is
    returned instead.
    """
    if df < 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {df}")
    with ctx.activate():
        p = ctx.real(tail_prob)
        if not (mpfr("0.5") <= p < 1):
            raise DomainError(f"tail_prob must be in [0.5, 1), got {p}")
    if df > NORMAL_FALLBACK_DF:
        return normal_quantile(tail_prob, ctx)
    # str key keeps the cache exact and hashable across input types
    return _t_quantile_cached(int(df), repr(float(p)), ctx.precision_bits)


def confidence_interval(
    est: FmrEstimate,
    sided: str = TWO_SIDED,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> ConfidenceInterval:
    """Student-t interval fmr_hat +/- c * sqrt(fmr_hat(1-fmr_hat)/(n-1)).

    ``two_sided`` uses c = t_quantile(n-1, 1-alpha/2); ``one_sided`` uses
    c = t_quantile(n-1, 1-alpha).  Bounds are clamped to [0, 1].
    """
    if est.n_comparisons < 2:
        raise DomainError("confidence interval requires n_comparisons >= 2")
    if sided not in (TWO_SIDED, ONE_SIDED):
        raise DomainError(f"sided must be '{TWO_SIDED}' or '{ONE_SIDED}', got {sided!r}")
    with ctx.activate():
        f = ctx.real(est.fmr_hat)
        df = est.n_comparisons - 1
        if sided == TWO_SIDED:
            tail = 1 - ctx.real(est.alpha) / 2
        else:
            tail = 1 - ctx.real(est.alpha)
        c = t_quantile(df, tail, ctx)
        half = c * gmpy2.sqrt(f * (1 - f) / df)
        lower = max(mpfr(0), f - half)
        upper = min(mpfr(1), f + half)
        return ConfidenceInterval(
            lower=lower,
            upper=upper,
            c_alpha=c,
            sided=sided,
            degenerate=(f == 0 or f == 1),
            precision_bits=ctx.precision_bits,
        )
