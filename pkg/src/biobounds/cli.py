"""Command-line surface: every operation plus grid sweeps.

Single-shot commands print JSON (default) or flat CSV to stdout; grid
sweeps write CSV files.  All inputs are echoed in the output for
provenance, extreme magnitudes are serialized in scientific notation with
17 significant digits next to a log10 convenience field, and the working
precision is recorded everywhere.  Exit codes: 0 success, 2 validation
error, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from pathlib import Path

import gmpy2
from gmpy2 import mpfr

from . import __version__
from .attack import (
    DEPENDENT,
    INDEPENDENT,
    Population,
    SecurityLevel,
    confidence_paradox_n,
    critical_fmr_untargeted,
    critical_population,
    untargeted_bounds,
)
from .birthday import (
    ReferencePool,
    birthday_approx,
    birthday_critical_fmr,
    birthday_critical_population,
    birthday_exact,
    exact_vs_approx_gap,
)
from .grids import PRESET_NAMES, emit_grid, preset
from .numerics import DEFAULT_PRECISION_BITS, DomainError, PrecisionContext
from .oracles import SimConfig, simulate_untargeted
from .stats import (
    ConfidenceInterval,
    FmrEstimate,
    ONE_SIDED,
    ScoreVector,
    TWO_SIDED,
    confidence_interval,
    estimate_fmr,
)

PRECISION_ENV_VAR = "BIOBOUNDS_PRECISION_BITS"

_SIDED = {"two": TWO_SIDED, "one": ONE_SIDED}


def format_real(x) -> str:
    """Scientific notation with 17 significant digits; survives magnitudes
    far outside double range."""
    x = mpfr(x) if not isinstance(x, mpfr) else x
    if gmpy2.is_nan(x):
        return "nan"
    if gmpy2.is_infinite(x):
        return "-inf" if x < 0 else "inf"
    if x == 0:
        return "0.0"
    digits, exp10, _ = x.digits(10, 17)
    sign = "-" if digits.startswith("-") else ""
    mantissa = digits.lstrip("-")
    return f"{sign}{mantissa[0]}.{mantissa[1:]}e{exp10 - 1:+03d}"


def _put_number(results: dict, name: str, value, ctx: PrecisionContext, log10: bool = True):
    """Store a numeric field as a 17-digit string plus a log10 companion."""
    with ctx.activate():
        v = ctx.real(value) if not isinstance(value, mpfr) else value
        results[name] = format_real(v)
        if log10:
            results[name + "_log10"] = float(gmpy2.log10(v)) if v > 0 else None


def _resolve_context(args) -> PrecisionContext:
    bits = args.precision_bits
    if bits is None:
        env = os.environ.get(PRECISION_ENV_VAR)
        bits = int(env) if env else DEFAULT_PRECISION_BITS
    return PrecisionContext(precision_bits=bits)


def _resolve_fmr_input(args, ctx: PrecisionContext):
    """Point FMR or a CI built from (--fmr-hat, --n-comparisons)."""
    inputs: dict = {}
    if args.fmr is not None:
        if args.fmr_hat is not None:
            raise DomainError("give either --fmr or --fmr-hat, not both")
        inputs["fmr"] = args.fmr
        return args.fmr, inputs
    if args.fmr_hat is None or args.n_comparisons is None:
        raise DomainError("provide --fmr, or --fmr-hat together with --n-comparisons")
    est = FmrEstimate(
        fmr_hat=args.fmr_hat, n_comparisons=args.n_comparisons, alpha=args.alpha
    )
    ci = confidence_interval(est, sided=_SIDED[args.sided], ctx=ctx)
    inputs.update(
        fmr_hat=args.fmr_hat,
        n_comparisons=args.n_comparisons,
        alpha=args.alpha,
        sided=_SIDED[args.sided],
        ci_lower=format_real(ci.lower),
        ci_upper=format_real(ci.upper),
    )
    return ci, inputs


# ---------------------------------------------------------------------------
# Handlers: each returns (inputs, results)
# ---------------------------------------------------------------------------


def _handle_ci(args, ctx):
    est = FmrEstimate(fmr_hat=args.fmr_hat, n_comparisons=args.n, alpha=args.alpha)
    ci = confidence_interval(est, sided=_SIDED[args.sided], ctx=ctx)
    inputs = {
        "fmr_hat": args.fmr_hat,
        "n": args.n,
        "alpha": args.alpha,
        "sided": ci.sided,
    }
    results: dict = {}
    _put_number(results, "lower", ci.lower, ctx)
    _put_number(results, "upper", ci.upper, ctx)
    _put_number(results, "c_alpha", ci.c_alpha, ctx, log10=False)
    results["degenerate"] = ci.degenerate
    return inputs, results


def _handle_estimate_fmr(args, ctx):
    if args.scores is not None:
        if args.false_matches is not None or args.total is not None:
            raise DomainError("give either --scores/--threshold or --false-matches/--total")
        if args.threshold is None:
            raise DomainError("--scores requires --threshold")
        text = Path(args.scores).read_text()
        vector = ScoreVector.from_text(text, args.threshold)
        est = estimate_fmr(vector, alpha=args.alpha)
        inputs = {
            "scores": args.scores,
            "threshold": args.threshold,
            "alpha": args.alpha,
            "sided": _SIDED[args.sided],
        }
    else:
        if args.false_matches is None or args.total is None:
            raise DomainError(
                "provide --scores with --threshold, or --false-matches with --total"
            )
        est = FmrEstimate.from_counts(args.false_matches, args.total, alpha=args.alpha)
        inputs = {
            "false_matches": args.false_matches,
            "total": args.total,
            "alpha": args.alpha,
            "sided": _SIDED[args.sided],
        }
    results: dict = {}
    _put_number(results, "fmr_hat", est.fmr_hat, ctx)
    results["n_comparisons"] = est.n_comparisons
    if est.n_comparisons >= 2:
        ci = confidence_interval(est, sided=_SIDED[args.sided], ctx=ctx)
        _put_number(results, "ci_lower", ci.lower, ctx)
        _put_number(results, "ci_upper", ci.upper, ctx)
        _put_number(results, "c_alpha", ci.c_alpha, ctx, log10=False)
        results["degenerate"] = ci.degenerate
    else:
        results["ci_note"] = "confidence interval requires at least 2 comparisons"
    return inputs, results


def _handle_attack_bounds(args, ctx):
    fmr_or_ci, inputs = _resolve_fmr_input(args, ctx)
    inputs.update(n_users=args.n_users, model=args.model)
    if args.authentication_mode:
        inputs["authentication_mode"] = True
    bounds = untargeted_bounds(
        fmr_or_ci,
        Population(args.n_users),
        model=args.model,
        authentication_mode=args.authentication_mode,
        ctx=ctx,
    )
    results: dict = {"model": bounds.model, "fmr_basis": bounds.fmr_basis}
    _put_number(results, "log2_lower", bounds.log2_lower, ctx, log10=False)
    _put_number(results, "log2_upper", bounds.log2_upper, ctx, log10=False)
    with ctx.activate():
        _put_number(results, "median_rounds_lower", gmpy2.exp2(bounds.log2_lower), ctx)
        _put_number(results, "median_rounds_upper", gmpy2.exp2(bounds.log2_upper), ctx)
    return inputs, results


def _handle_attack_critical_population(args, ctx):
    fmr_or_ci, inputs = _resolve_fmr_input(args, ctx)
    if isinstance(fmr_or_ci, ConfidenceInterval):
        fmr, basis = fmr_or_ci.upper, "ci_upper"
    else:
        fmr, basis = fmr_or_ci, "point"
    inputs["security_bits"] = args.security_bits
    cp = critical_population(fmr, SecurityLevel.from_bits(args.security_bits), ctx)
    results: dict = {
        "fmr_basis": basis,
        "n_users": cp.n_users,
        "unattainable": cp.unattainable,
    }
    _put_number(results, "log2_n_users", cp.log2_n_users, ctx, log10=False)
    return inputs, results


def _handle_attack_critical_fmr(args, ctx):
    value = critical_fmr_untargeted(
        Population(args.n_users), SecurityLevel.from_bits(args.security_bits), ctx
    )
    inputs = {"n_users": args.n_users, "security_bits": args.security_bits}
    results: dict = {}
    _put_number(results, "critical_fmr", value, ctx)
    return inputs, results


def _handle_attack_paradox_n(args, ctx):
    est = confidence_paradox_n(
        Population(args.n_users),
        SecurityLevel.from_bits(args.security_bits),
        alpha=args.alpha,
        ctx=ctx,
    )
    inputs = {
        "n_users": args.n_users,
        "security_bits": args.security_bits,
        "alpha": args.alpha,
    }
    results: dict = {"n_comparisons": est.n_comparisons}
    _put_number(results, "log2_n_comparisons", est.log2_n_comparisons, ctx, log10=False)
    _put_number(results, "critical_fmr", est.critical_fmr, ctx)
    _put_number(results, "gap_width", est.gap_width, ctx)
    _put_number(results, "normal_quantile", est.normal_quantile, ctx, log10=False)
    return inputs, results


def _collision_results(res, ctx) -> dict:
    results: dict = {"method": res.method}
    _put_number(results, "probability", res.probability, ctx)
    _put_number(results, "complement", res.complement, ctx)
    _put_number(results, "ln_complement", res.ln_complement, ctx, log10=False)
    results["n_users"] = res.pair_count.n_users
    results["n_pairs"] = res.pair_count.n_pairs
    if res.lower is not None:
        _put_number(results, "lower", res.lower, ctx)
        _put_number(results, "upper", res.upper, ctx)
    if res.method == "exact":
        results["zero_case"] = res.zero_case
        results["zero_case_conservative"] = res.zero_case_conservative
    return results


def _handle_birthday_approx(args, ctx):
    fmr_or_ci, inputs = _resolve_fmr_input(args, ctx)
    inputs["n_users"] = args.n_users
    res = birthday_approx(fmr_or_ci, Population(args.n_users), ctx)
    return inputs, _collision_results(res, ctx)


def _handle_birthday_critical_population(args, ctx):
    fmr_or_ci, inputs = _resolve_fmr_input(args, ctx)
    if isinstance(fmr_or_ci, ConfidenceInterval):
        fmr, basis = fmr_or_ci.lower, "ci_lower"
    else:
        fmr, basis = fmr_or_ci, "point"
    inputs["p_max"] = args.p_max
    bc = birthday_critical_population(fmr, args.p_max, ctx)
    results: dict = {"fmr_basis": basis, "n_users": bc.n_users}
    _put_number(results, "quadratic_root", bc.quadratic_root, ctx, log10=False)
    _put_number(results, "sqrt_approximation", bc.sqrt_approximation, ctx, log10=False)
    return inputs, results


def _handle_birthday_critical_fmr(args, ctx):
    value = birthday_critical_fmr(Population(args.n_users), args.p_max, ctx)
    inputs = {"n_users": args.n_users, "p_max": args.p_max}
    results: dict = {}
    _put_number(results, "critical_fmr", value, ctx)
    return inputs, results


def _handle_birthday_exact(args, ctx):
    fmr_or_ci, inputs = _resolve_fmr_input(args, ctx)
    inputs.update(k_users=args.k_users, n_users=args.n_users)
    if args.integer_rounding:
        inputs["integer_rounding"] = True
    res = birthday_exact(
        fmr_or_ci,
        ReferencePool.from_users(args.k_users),
        Population(args.n_users),
        integer_rounding=args.integer_rounding,
        ctx=ctx,
    )
    results = _collision_results(res, ctx)
    results["k_users"] = res.reference_pool.k_users
    results["k_pairs"] = res.reference_pool.k_pairs
    return inputs, results


def _handle_birthday_gap(args, ctx):
    sweep = [int(k) for k in args.k_sweep.split(",") if k.strip()]
    if not sweep:
        raise DomainError("--k-sweep must list at least one reference pool size")
    gaps = exact_vs_approx_gap(args.fmr, Population(args.n_users), sweep, ctx)
    inputs = {"fmr": args.fmr, "n_users": args.n_users, "k_sweep": sweep}
    results: dict = {"gaps": []}
    for k_users, gap in gaps:
        entry: dict = {"k_users": k_users}
        _put_number(entry, "gap", gap, ctx)
        results["gaps"].append(entry)
    return inputs, results


def _handle_grid(args, ctx):
    spec = preset(
        args.preset,
        x_steps=args.x_steps,
        y_steps=args.y_steps,
        n_comparisons=args.n_comparisons,
        alpha=args.alpha,
    )
    path = emit_grid(spec, args.out, ctx)
    inputs = {"preset": args.preset, "out": str(path)}
    if args.x_steps is not None:
        inputs["x_steps"] = args.x_steps
    if args.y_steps is not None:
        inputs["y_steps"] = args.y_steps
    results = {
        "out": str(path),
        "rows": spec.x_axis.steps * spec.y_axis.steps,
        "spec": spec.to_dict(),
    }
    return inputs, results


def _handle_simulate_attack(args, ctx):
    cfg = SimConfig(fmr=args.fmr, n_users=args.n_users, trials=args.trials, seed=args.seed)
    report = simulate_untargeted(cfg, ctx)
    bounds = untargeted_bounds(args.fmr, Population(args.n_users), model=INDEPENDENT, ctx=ctx)
    with ctx.activate():
        lower_rounds = gmpy2.exp2(bounds.log2_lower)
        upper_rounds = gmpy2.exp2(bounds.log2_upper)
        contained = (
            int(gmpy2.floor(lower_rounds))
            <= report.median_rounds
            <= int(gmpy2.ceil(upper_rounds)) + 1
        )
    inputs = {
        "fmr": args.fmr,
        "n_users": args.n_users,
        "trials": args.trials,
        "seed": args.seed,
    }
    results: dict = {
        "median_rounds": report.median_rounds,
        "q1": report.q1,
        "q3": report.q3,
        "empirical_success_prob": report.empirical_success_prob,
        "generator": report.generator,
    }
    _put_number(results, "bound_rounds_lower", lower_rounds, ctx)
    _put_number(results, "bound_rounds_upper", upper_rounds, ctx)
    results["verdict"] = "PASS" if contained else "FAIL"
    return inputs, results


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_fmr_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fmr", type=float, help="point FMR in (0, 1)")
    p.add_argument("--fmr-hat", type=float, help="measured FMR; propagates its CI")
    p.add_argument("--n-comparisons", type=int, help="comparisons behind --fmr-hat")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--sided", choices=["two", "one"], default="two")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--precision-bits",
        type=int,
        default=None,
        help=f"working precision in mantissa bits (default {DEFAULT_PRECISION_BITS}; "
        f"env {PRECISION_ENV_VAR})",
    )
    common.add_argument("--output-format", choices=["json", "csv"], default="json")

    parser = argparse.ArgumentParser(
        prog="biobounds",
        description="Security limits of biometric systems from their false match rate.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ci", parents=[common], help="confidence interval on a measured FMR")
    p.add_argument("--fmr-hat", type=float, required=True)
    p.add_argument("--n", type=int, required=True, help="number of impostor comparisons")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--sided", choices=["two", "one"], default="two")
    p.set_defaults(handler=_handle_ci)

    p = sub.add_parser(
        "estimate-fmr", parents=[common], help="empirical FMR from scores or counts"
    )
    p.add_argument("--scores", help="text file, one impostor score per line")
    p.add_argument("--threshold", type=float)
    p.add_argument("--false-matches", type=int)
    p.add_argument("--total", type=int)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--sided", choices=["two", "one"], default="two")
    p.set_defaults(handler=_handle_estimate_fmr)

    attack = sub.add_parser("attack", help="untargeted-attack bounds and sizing")
    attack_sub = attack.add_subparsers(dest="subcommand", required=True)

    p = attack_sub.add_parser("bounds", parents=[common], help="median-rounds bounds")
    _add_fmr_flags(p)
    p.add_argument("--n-users", type=int, required=True)
    p.add_argument("--model", choices=[INDEPENDENT, DEPENDENT], default=INDEPENDENT)
    p.add_argument(
        "--authentication-mode",
        action="store_true",
        help="scale the attack by N (one claimed identity per guess)",
    )
    p.set_defaults(handler=_handle_attack_bounds)

    p = attack_sub.add_parser(
        "critical-population", parents=[common], help="largest N holding a security level"
    )
    _add_fmr_flags(p)  # with --fmr-hat the CI upper bound is substituted
    p.add_argument("--security-bits", type=float, required=True)
    p.set_defaults(handler=_handle_attack_critical_population)

    p = attack_sub.add_parser(
        "critical-fmr", parents=[common], help="largest FMR holding a security level"
    )
    p.add_argument("--n-users", type=int, required=True)
    p.add_argument("--security-bits", type=float, required=True)
    p.set_defaults(handler=_handle_attack_critical_fmr)

    p = attack_sub.add_parser(
        "paradox-n",
        parents=[common],
        help="comparisons needed before a CI can certify the critical FMR",
    )
    p.add_argument("--n-users", type=int, required=True)
    p.add_argument("--security-bits", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(handler=_handle_attack_paradox_n)

    birthday = sub.add_parser("birthday", help="database collision probabilities")
    birthday_sub = birthday.add_subparsers(dest="subcommand", required=True)

    p = birthday_sub.add_parser(
        "approx", parents=[common], help="independence approximation"
    )
    _add_fmr_flags(p)
    p.add_argument("--n-users", type=int, required=True)
    p.set_defaults(handler=_handle_birthday_approx)

    p = birthday_sub.add_parser(
        "critical-population", parents=[common], help="largest N below a collision budget"
    )
    _add_fmr_flags(p)  # with --fmr-hat the CI lower bound is substituted
    p.add_argument("--p-max", type=float, required=True)
    p.set_defaults(handler=_handle_birthday_critical_population)

    p = birthday_sub.add_parser(
        "critical-fmr", parents=[common], help="largest FMR below a collision budget"
    )
    p.add_argument("--n-users", type=int, required=True)
    p.add_argument("--p-max", type=float, required=True)
    p.set_defaults(handler=_handle_birthday_critical_fmr)

    p = birthday_sub.add_parser(
        "exact", parents=[common], help="finite reference pool (urn) model"
    )
    _add_fmr_flags(p)
    p.add_argument("--k-users", type=int, required=True, help="reference pool users")
    p.add_argument("--n-users", type=int, required=True)
    p.add_argument("--integer-rounding", action="store_true")
    p.set_defaults(handler=_handle_birthday_exact)

    p = birthday_sub.add_parser(
        "gap", parents=[common], help="exact-vs-approximate convergence sweep"
    )
    p.add_argument("--fmr", type=float, required=True)
    p.add_argument("--n-users", type=int, required=True)
    p.add_argument("--k-sweep", required=True, help="comma-separated reference pool sizes")
    p.set_defaults(handler=_handle_birthday_gap)

    p = sub.add_parser("grid", parents=[common], help="emit a preset sweep as CSV")
    p.add_argument("--preset", choices=list(PRESET_NAMES), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--x-steps", type=int, default=None)
    p.add_argument("--y-steps", type=int, default=None)
    p.add_argument("--n-comparisons", type=int, default=None, help="fig3 comparison budget")
    p.add_argument("--alpha", type=float, default=None, help="fig3 significance level")
    p.set_defaults(handler=_handle_grid)

    simulate = sub.add_parser("simulate", help="Monte-Carlo audit runs")
    simulate_sub = simulate.add_subparsers(dest="subcommand", required=True)

    p = simulate_sub.add_parser(
        "attack", parents=[common], help="simulate the untargeted attack"
    )
    p.add_argument("--fmr", type=float, required=True)
    p.add_argument("--n-users", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(handler=_handle_simulate_attack)

    return parser


def _flatten(prefix: str, obj, rows: list) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, obj))


def _print_output(command: str, inputs: dict, results: dict, ctx, output_format: str):
    payload = {
        "command": command,
        "version": __version__,
        "precision_bits": ctx.precision_bits,
        "inputs": inputs,
        "results": results,
    }
    if output_format == "json":
        print(json.dumps(payload, indent=2))
    else:
        rows: list = []
        _flatten("", payload, rows)
        print("field,value")
        for key, value in rows:
            print(f"{key},{value}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else int(exc.code)
    ctx = None
    try:
        ctx = _resolve_context(args)
        command = args.command
        if getattr(args, "subcommand", None):
            command = f"{args.command} {args.subcommand}"
        inputs, results = args.handler(args, ctx)
        _print_output(command, inputs, results, ctx, args.output_format)
        return 0
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
