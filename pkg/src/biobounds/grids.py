"""Grid sweeps over two parameters, emitted as plot-ready CSV.

A grid evaluates one named output quantity over an x/y lattice, writing
``x,y,value`` rows (row-major: x outer, y inner) followed by a ``#`` comment
block recording the precision, tool version, and the full grid spec, so a
file can be parsed and re-emitted byte-identically (the version line aside).

Named presets bundle the axis choices used by this library's own survey
plots; every cell equals the matching single-shot CLI command at the same
precision, because both go through :func:`evaluate_cell`.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Mapping

from . import __version__
from .attack import Population, SecurityLevel, critical_fmr_untargeted, critical_population
from .birthday import birthday_critical_fmr
from .numerics import DEFAULT_CONTEXT, DomainError, PrecisionContext
from .stats import FmrEstimate, confidence_interval

__all__ = [
    "AxisSpec",
    "GridSpec",
    "ParsedGrid",
    "axis_parameter",
    "evaluate_cell",
    "emit_grid",
    "parse_grid_csv",
    "preset",
    "PRESET_NAMES",
    "OUTPUT_VALUES",
]

LINEAR = "linear"
LOG10 = "log10"

#: Parameters that must land on integers after scale mapping.
_INTEGER_PARAMS = {"n_users", "n_comparisons"}

CSV_HEADER = "x,y,value"


@dataclass(frozen=True)
class AxisSpec:
    """One swept parameter: stored coordinates are the raw linspace values;
    with ``log10`` scale the parameter itself is 10**coordinate."""

    name: str
    start: float
    stop: float
    steps: int
    scale: str = LINEAR

    def __post_init__(self) -> None:
        if self.steps < 2:
            raise DomainError(f"axis {self.name!r}: steps must be >= 2, got {self.steps}")
        if self.start == self.stop:
            raise DomainError(f"axis {self.name!r}: degenerate range [{self.start}, {self.stop}]")
        if self.scale not in (LINEAR, LOG10):
            raise DomainError(f"axis {self.name!r}: scale must be linear or log10")

    def coordinates(self) -> list[float]:
        step = (self.stop - self.start) / (self.steps - 1)
        return [self.start + i * step for i in range(self.steps)]


@dataclass(frozen=True)
class GridSpec:
    x_axis: AxisSpec
    y_axis: AxisSpec
    output_value: str
    fixed: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.x_axis.name == self.y_axis.name:
            raise DomainError(f"axes must name distinct parameters, both are {self.x_axis.name!r}")
        if self.output_value not in OUTPUT_VALUES:
            raise DomainError(
                f"unknown output_value {self.output_value!r}; "
                f"known: {sorted(OUTPUT_VALUES)}"
            )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fixed"] = dict(self.fixed)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(
            x_axis=AxisSpec(**d["x_axis"]),
            y_axis=AxisSpec(**d["y_axis"]),
            output_value=d["output_value"],
            fixed=dict(d.get("fixed", {})),
        )


def axis_parameter(axis: AxisSpec, coordinate: float):
    """Map a stored coordinate to the parameter value handed to evaluators."""
    raw = 10.0**coordinate if axis.scale == LOG10 else coordinate
    if axis.name in _INTEGER_PARAMS:
        return max(1, round(raw))
    return raw


# ---------------------------------------------------------------------------
# Output-value evaluators
# ---------------------------------------------------------------------------


def _eval_log10_critical_fmr_untargeted(params: dict, ctx: PrecisionContext) -> float:
    f = critical_fmr_untargeted(
        Population(int(params["n_users"])),
        SecurityLevel.from_bits(params["security_bits"]),
        ctx,
    )
    return float(ctx.log10(f))


def _eval_log10_birthday_critical_fmr(params: dict, ctx: PrecisionContext) -> float:
    f = birthday_critical_fmr(Population(int(params["n_users"])), params["p_max"], ctx)
    return float(ctx.log10(f))


def _eval_log10_critical_population_upper_ci(params: dict, ctx: PrecisionContext) -> float:
    """Critical population with the CI upper bound substituted for the FMR;
    continuous log10 value (negative when no population is attainable)."""
    est = FmrEstimate(
        fmr_hat=params["fmr_hat"],
        n_comparisons=int(params["n_comparisons"]),
        alpha=params.get("alpha", 0.05),
    )
    ci = confidence_interval(est, ctx=ctx)
    cp = critical_population(ci.upper, SecurityLevel.from_bits(params["security_bits"]), ctx)
    with ctx.activate():
        return float(cp.log2_n_users * ctx.log10(2))


OUTPUT_VALUES: dict[str, Callable[[dict, PrecisionContext], float]] = {
    "log10_critical_fmr_untargeted": _eval_log10_critical_fmr_untargeted,
    "log10_birthday_critical_fmr": _eval_log10_birthday_critical_fmr,
    "log10_critical_population_upper_ci": _eval_log10_critical_population_upper_ci,
}


def evaluate_cell(
    spec: GridSpec, x: float, y: float, ctx: PrecisionContext = DEFAULT_CONTEXT
) -> float:
    """Value of one grid cell; the single source of truth shared by the grid
    emitter and the single-shot commands."""
    params = dict(spec.fixed)
    params[spec.x_axis.name] = axis_parameter(spec.x_axis, x)
    params[spec.y_axis.name] = axis_parameter(spec.y_axis, y)
    return OUTPUT_VALUES[spec.output_value](params, ctx)


def grid_rows(
    spec: GridSpec, ctx: PrecisionContext = DEFAULT_CONTEXT
) -> Iterator[tuple[float, float, float]]:
    """Row-major cell stream: x varies slowest.  Cells are independent, so a
    parallel evaluator may compute them in any order as long as emission
    keeps this ordering."""
    for x in spec.x_axis.coordinates():
        for y in spec.y_axis.coordinates():
            yield x, y, evaluate_cell(spec, x, y, ctx)


def emit_grid(
    spec: GridSpec,
    out_path: str | Path,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    tool_version: str = __version__,
) -> Path:
    """Write the grid as CSV; returns the output path."""
    out_path = Path(out_path)
    lines = [CSV_HEADER]
    for x, y, value in grid_rows(spec, ctx):
        lines.append(f"{x!r},{y!r},{value!r}")
    lines.append(f"# precision_bits: {ctx.precision_bits}")
    lines.append(f"# tool_version: {tool_version}")
    lines.append("# spec: " + json.dumps(spec.to_dict(), sort_keys=True, separators=(",", ":")))
    out_path.write_text("\n".join(lines) + "\n")
    return out_path


@dataclass(frozen=True)
class ParsedGrid:
    spec: GridSpec
    precision_bits: int
    tool_version: str
    rows: tuple[tuple[float, float, float], ...]


def parse_grid_csv(path: str | Path) -> ParsedGrid:
    """Read back an emitted grid, including the grid spec from its comment block."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise DomainError(f"{path}: missing '{CSV_HEADER}' header")
    rows: list[tuple[float, float, float]] = []
    meta: dict[str, str] = {}
    for line in lines[1:]:
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            meta[key.strip()] = value.strip()
        elif line.strip():
            x, y, v = line.split(",")
            rows.append((float(x), float(y), float(v)))
    for required in ("precision_bits", "tool_version", "spec"):
        if required not in meta:
            raise DomainError(f"{path}: comment block lacks {required!r}")
    return ParsedGrid(
        spec=GridSpec.from_dict(json.loads(meta["spec"])),
        precision_bits=int(meta["precision_bits"]),
        tool_version=meta["tool_version"],
        rows=tuple(rows),
    )


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


def _fig1(x_steps: int = 101, y_steps: int = 129, **_ignored) -> GridSpec:
    """Critical FMR surface over population (log10) and security bits."""
    return GridSpec(
        x_axis=AxisSpec("n_users", 0.0, 10.0, x_steps, LOG10),
        y_axis=AxisSpec("security_bits", 0.0, 256.0, y_steps, LINEAR),
        output_value="log10_critical_fmr_untargeted",
    )


def _fig2(x_steps: int = 100, y_steps: int = 99, **_ignored) -> GridSpec:
    """Collision-bounded critical FMR over population (log10) and target
    collision probability."""
    return GridSpec(
        x_axis=AxisSpec("n_users", 1.0, 10.0, x_steps, LOG10),
        y_axis=AxisSpec("p_max", 0.01, 0.99, y_steps, LINEAR),
        output_value="log10_birthday_critical_fmr",
    )


def _fig3(
    x_steps: int = 91,
    y_steps: int = 41,
    n_comparisons: int = 10**6,
    alpha: float = 0.05,
    **_ignored,
) -> GridSpec:
    """Critical population over measured FMR (log10) and security bits, with
    the CI upper bound at the given comparison budget substituted in.
    Sweep ``n_comparisons`` across emissions (1e3 .. 1e8) to see the budget's
    effect on the attainable population."""
    return GridSpec(
        x_axis=AxisSpec("fmr_hat", -10.0, -1.0, x_steps, LOG10),
        y_axis=AxisSpec("security_bits", 0.0, 40.0, y_steps, LINEAR),
        output_value="log10_critical_population_upper_ci",
        fixed={"n_comparisons": float(n_comparisons), "alpha": alpha},
    )


_PRESETS = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3}
PRESET_NAMES = tuple(sorted(_PRESETS))


def preset(name: str, **overrides) -> GridSpec:
    """Named grid preset; ``x_steps``/``y_steps`` (and for fig3
    ``n_comparisons``, ``alpha``) may be overridden."""
    if name not in _PRESETS:
        raise DomainError(f"unknown preset {name!r}; known: {PRESET_NAMES}")
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return _PRESETS[name](**overrides)
