#!/usr/bin/env python3
"""Do the analytic bounds survive contact with a simulated attacker?

Runs the Monte-Carlo first-success simulation against the closed-form
bounds for several configurations and prints a containment verdict per
row, the same audit the `biobounds simulate attack` subcommand performs.
"""

import math

import gmpy2

from biobounds import (
    Population,
    PrecisionContext,
    SimConfig,
    simulate_untargeted,
    untargeted_bounds,
)

ctx = PrecisionContext(256)

print("=== 100k simulated attacks per configuration, fixed seeds ===")
print(f"{'FMR':>8} {'N':>5} {'median':>8} {'q1':>6} {'q3':>7} "
      f"{'bounds (rounds)':>22} verdict")

for fmr, n_users in [(0.5, 1), (1e-2, 1), (1e-2, 10), (1e-3, 10), (1e-3, 100)]:
    cfg = SimConfig(fmr=fmr, n_users=n_users, trials=100_000, seed=42)
    report = simulate_untargeted(cfg, ctx)
    bounds = untargeted_bounds(fmr, Population(n_users), ctx=ctx)
    with ctx.activate():
        lo = float(gmpy2.exp2(bounds.log2_lower))
        hi = float(gmpy2.exp2(bounds.log2_upper))
    contained = math.floor(lo) <= report.median_rounds <= math.ceil(hi) + 1
    print(
        f"{fmr:>8} {n_users:>5} {report.median_rounds:>8} {report.q1:>6} "
        f"{report.q3:>7} {f'[{lo:.2f}, {hi:.2f}]':>22} "
        f"{'PASS' if contained else 'FAIL'}"
    )

print()
print("=== Reproducibility contract ===")
cfg = SimConfig(fmr=1e-3, n_users=10, trials=100_000, seed=42)
a = simulate_untargeted(cfg, ctx)
b = simulate_untargeted(cfg, ctx)
print(f"same seed, two runs, identical reports: {a == b}")
print(f"generator: {a.generator}")
print("streams derive from (seed, chunk index), so results do not depend")
print("on how trials are partitioned across workers")
