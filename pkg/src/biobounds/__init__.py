"""Security limits of biometric systems, derived from the false match rate.

The library answers four sizing questions at arbitrary precision, each
cross-checkable against an independent simulation or enumeration oracle:

* how many attempts an untargeted attacker needs to impersonate someone in
  a database of N users (:mod:`biobounds.attack`);
* how large a database can grow before a required security level breaks,
  and how accurate a system must be to support a given population
  (:mod:`biobounds.attack`);
* how likely two enrolled users are to falsely match each other, exactly
  and in the classical birthday approximation (:mod:`biobounds.birthday`);
* how trustworthy an empirical FMR is, via Student-t confidence intervals
  (:mod:`biobounds.stats`).
"""

__version__ = "0.1.0"

from .numerics import (
    BigReal,
    DEFAULT_CONTEXT,
    DEFAULT_PRECISION_BITS,
    DomainError,
    PrecisionContext,
    relative_error,
)
from .stats import (
    ConfidenceInterval,
    FmrEstimate,
    ScoreVector,
    confidence_interval,
    estimate_fmr,
    normal_quantile,
    t_quantile,
)
from .attack import (
    AttackBounds,
    CriticalPopulation,
    ParadoxEstimate,
    Population,
    SecurityLevel,
    confidence_paradox_n,
    critical_fmr_untargeted,
    critical_population,
    geometric_median,
    untargeted_bounds,
)
from .birthday import (
    BirthdayCriticalPopulation,
    CollisionResult,
    PairCount,
    ReferencePool,
    birthday_approx,
    birthday_critical_fmr,
    birthday_critical_population,
    birthday_exact,
    collision_probability_from_pairs,
    exact_vs_approx_gap,
    reference_pool_interval,
)
from .oracles import (
    SimConfig,
    SimReport,
    enumerate_birthday,
    scan_first_success_median,
    simulate_untargeted,
)

__all__ = [
    "__version__",
    "BigReal",
    "DEFAULT_CONTEXT",
    "DEFAULT_PRECISION_BITS",
    "DomainError",
    "PrecisionContext",
    "relative_error",
    "ConfidenceInterval",
    "FmrEstimate",
    "ScoreVector",
    "confidence_interval",
    "estimate_fmr",
    "normal_quantile",
    "t_quantile",
    "AttackBounds",
    "CriticalPopulation",
    "ParadoxEstimate",
    "Population",
    "SecurityLevel",
    "confidence_paradox_n",
    "critical_fmr_untargeted",
    "critical_population",
    "geometric_median",
    "untargeted_bounds",
    "BirthdayCriticalPopulation",
    "CollisionResult",
    "PairCount",
    "ReferencePool",
    "birthday_approx",
    "birthday_critical_fmr",
    "birthday_critical_population",
    "birthday_exact",
    "collision_probability_from_pairs",
    "exact_vs_approx_gap",
    "reference_pool_interval",
    "SimConfig",
    "SimReport",
    "enumerate_birthday",
    "scan_first_success_median",
    "simulate_untargeted",
]
