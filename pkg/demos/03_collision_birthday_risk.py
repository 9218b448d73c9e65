#!/usr/bin/env python3
"""When do two enrolled users start falsely matching each other?

The database collision risk grows with the square of the population, the
biometric version of the birthday paradox.  Shows the approximate model,
its exact finite-pool refinement, and the sizing thresholds both imply.
"""

from biobounds import (
    Population,
    PrecisionContext,
    ReferencePool,
    birthday_approx,
    birthday_critical_fmr,
    birthday_critical_population,
    birthday_exact,
    exact_vs_approx_gap,
)

ctx = PrecisionContext(256)

print("=== Collision probability at FMR 1e-6 ===")
for n_users in (10, 100, 1_000, 1_178, 10_000):
    res = birthday_approx(1e-6, Population(n_users), ctx)
    print(
        f"N = {n_users:>6,}: {res.pair_count.n_pairs:>12,} pairs, "
        f"P(collision) = {float(res.probability):.4f}"
    )

bc = birthday_critical_population(1e-6, 0.5, ctx)
print(f"\neven odds are reached at N = {bc.n_users} users")
print(f"(exact quadratic root {float(bc.quadratic_root):.2f}, "
      f"sqrt shortcut {float(bc.sqrt_approximation):.2f})")

print()
print("=== Accuracy needed to keep collisions below 50% ===")
for n_users in (10**6, 10**9, 10**10):
    f_crit = birthday_critical_fmr(Population(n_users), 0.5, ctx)
    print(f"N = {n_users:>13,}: FMR <= {float(f_crit):.3e}")
print("national-scale registries need FMR ~ 1e-18; the best measured")
print("systems sit around 1e-9, so large registries collide constantly")

print()
print("=== Exact finite-pool model vs the independence approximation ===")
res_exact = birthday_exact(0.2, ReferencePool.from_users(5), Population(3), ctx=ctx)
res_approx = birthday_approx(0.2, Population(3), ctx)
print(f"toy urn (5 reference users, FMR 0.2, 3 deployed):")
print(f"  exact   P = {float(res_exact.probability):.6f}  (8/15)")
print(f"  approx  P = {float(res_approx.probability):.6f}")

print("\nthe gap closes as the reference pool grows (FMR 1e-3, N = 10):")
for k_users, gap in exact_vs_approx_gap(1e-3, Population(10), [10**3, 10**4, 10**5, 10**6], ctx):
    print(f"  K = {k_users:>9,}: |exact - approx| = {float(gap):.3e}")

print()
print("=== Pigeonhole: exhausting the non-matching pairs forces P = 1 ===")
res = birthday_exact(0.5, ReferencePool.from_users(5), Population(4), ctx=ctx)
print(
    f"FMR 0.5 on a 10-pair reference pool, 6 deployment pairs: "
    f"P = {float(res.probability)}, zero_case = {res.zero_case}"
)
