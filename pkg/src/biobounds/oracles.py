"""Independent verification engines: Monte-Carlo attack simulation and exact
small-instance enumeration.

These exist so the analytic bounds never have to be trusted on their own:
the simulator realizes the independent-events attack model directly, and the
enumerator counts the urn model with exact integer arithmetic.  Both are
exposed for audit runs as well as tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import DEFAULT_CONTEXT, DomainError, PrecisionContext

__all__ = [
    "SimConfig",
    "SimReport",
    "GENERATOR_NAME",
    "simulate_untargeted",
    "enumerate_birthday",
    "scan_first_success_median",
    "SCAN_CAP",
    "ENUMERATION_MAX_PAIRS",
]

#: Counter-based generator with 128-bit counters; streams are derived from
#: (seed, chunk index), so results are identical however trials are
#: partitioned across workers.
GENERATOR_NAME = f"numpy.random.Philox4x64 (numpy=={np.__version__})"

_CHUNK = 1 << 16

#: Direct-scan ceiling for the first-success median oracle.
SCAN_CAP = 10_000_000

#: Largest pair count the enumeration oracle accepts.
ENUMERATION_MAX_PAIRS = 30


@dataclass(frozen=True)
class SimConfig:
    """Parameters of an untargeted-attack simulation."""

    fmr: float
    n_users: int
    trials: int
    seed: int

    def __post_init__(self) -> None:
        if not (0 < self.fmr < 1):
            raise DomainError(f"fmr must be in (0, 1), got {self.fmr}")
        if self.n_users < 1:
            raise DomainError(f"n_users must be >= 1, got {self.n_users}")
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if not (0 <= self.seed < 2**64):
            raise DomainError("seed must fit an unsigned 64-bit integer")


@dataclass(frozen=True)
class SimReport:
    """Simulation summary; quartiles use the nearest-rank method."""

    median_rounds: int
    q1: int
    q3: int
    empirical_success_prob: float
    trials: int
    seed: int
    generator: str

    def __post_init__(self) -> None:
        if not (1 <= self.q1 <= self.median_rounds <= self.q3):
            raise DomainError(
                f"quartiles out of order: q1={self.q1}, median={self.median_rounds}, "
                f"q3={self.q3}"
            )


def _nearest_rank(sorted_values: np.ndarray, quantile: float) -> int:
    idx = max(math.ceil(quantile * len(sorted_values)), 1) - 1
    return int(sorted_values[idx])


def simulate_untargeted(
    cfg: SimConfig, ctx: PrecisionContext = DEFAULT_CONTEXT
) -> SimReport:
    """Sample the first-success round of the untargeted attack.

    Per round the attacker succeeds with p = 1-(1-fmr)^n_users; rounds are
    independent, so the first success is geometric and sampled by inverse
    transform, ceil(ln U / ln(1-p)) with U uniform on (0, 1].  Deterministic
    for a given seed regardless of worker partitioning (see
    :data:`GENERATOR_NAME`).
    """
    p = float(ctx.one_minus_pow(cfg.fmr, cfg.n_users))
    if not (0 < p < 1):
        raise DomainError(
            f"per-round success probability degenerates to {p} at double "
            f"precision for fmr={cfg.fmr}, n_users={cfg.n_users}"
        )
    ln_q = math.log1p(-p)

    chunks: list[np.ndarray] = []
    total_rounds = 0
    for chunk_index, start in enumerate(range(0, cfg.trials, _CHUNK)):
        size = min(_CHUNK, cfg.trials - start)
        rng = np.random.Generator(
            np.random.Philox(key=np.array([cfg.seed, chunk_index], dtype=np.uint64))
        )
        u = 1.0 - rng.random(size)  # uniform on (0, 1]
        rounds = np.ceil(np.log(u) / ln_q).astype(np.int64)
        np.maximum(rounds, 1, out=rounds)
        chunks.append(rounds)
        total_rounds += int(rounds.sum(dtype=np.int64))

    all_rounds = np.sort(np.concatenate(chunks))
    return SimReport(
        median_rounds=_nearest_rank(all_rounds, 0.5),
        q1=_nearest_rank(all_rounds, 0.25),
        q3=_nearest_rank(all_rounds, 0.75),
        empirical_success_prob=cfg.trials / total_rounds,
        trials=cfg.trials,
        seed=cfg.seed,
        generator=GENERATOR_NAME,
    )


def enumerate_birthday(k_pairs: int, false_pairs: int, draw: int) -> Fraction:
    """Exact probability that drawing ``draw`` pairs without replacement from
    ``k_pairs`` hits at least one of ``false_pairs`` marked pairs.

    Pure integer combinatorics: 1 - C(k_pairs - false_pairs, draw) / C(k_pairs, draw).
    Capped at small instances; this is the audit oracle, not a production path.
    """
    if not (1 <= k_pairs <= ENUMERATION_MAX_PAIRS):
        raise DomainError(
            f"k_pairs must be in [1, {ENUMERATION_MAX_PAIRS}], got {k_pairs}"
        )
    if not (0 <= false_pairs <= k_pairs):
        raise DomainError(f"false_pairs must be in [0, {k_pairs}], got {false_pairs}")
    if not (0 <= draw <= k_pairs):
        raise DomainError(f"draw must be in [0, {k_pairs}], got {draw}")
    return 1 - Fraction(
        math.comb(k_pairs - false_pairs, draw), math.comb(k_pairs, draw)
    )


def scan_first_success_median(success_prob: float, cap: int = SCAN_CAP) -> int:
    """Smallest m with 1-(1-p)^m >= 1/2, found by direct scan.

    Multiplies out the survival probability round by round; independent of
    the closed-form median, which is exactly why it is useful.  Raises once
    the scan passes ``cap`` (p below ~1e-7).
    """
    if not (0 < success_prob < 1):
        raise DomainError(f"success probability must be in (0, 1), got {success_prob}")
    survival = 1.0
    q = 1.0 - success_prob
    for m in range(1, cap + 1):
        survival *= q
        if survival <= 0.5:
            return m
    raise DomainError(
        f"first-success median exceeds the scan cap {cap} for p={success_prob}"
    )
