"""Orbit classification for iterated complex maps.

Parse a map like "z*exp(z^2)" into an expression tree, follow orbits
under IEEE complex doubles, and sort seed points into escaping,
bounded, and bungee sets under explicit finite-iteration heuristics.
Grids of verdicts render to PPM images; sampling-based checkers probe
set relations (containment, invariance, commutation, translates)
between pairs of maps.
"""

from .engine import EvalResult, eval_array, evaluate
from .expr import (
    Add,
    Const,
    Cos,
    Div,
    Exp,
    ExponentRangeError,
    Expr,
    ExpressionTooLargeError,
    Mul,
    Neg,
    ParseError,
    Pow,
    Sin,
    Sub,
    UnknownIdentifierError,
    Var,
    Z,
    compose,
    constant_value,
    derivative,
    format_expr,
    iterate_expr,
    parse,
    scale,
    translate,
)
from .grid import ClassGrid, GridSpec, classify_grid, mask_stats, resolve_workers
from .orbit import (
    BatchClassification,
    Classification,
    FixedPointReport,
    OrbitParams,
    OrbitTrace,
    Rect,
    Termination,
    Verdict,
    classify,
    classify_batch,
    classify_point,
    count_oscillations,
    find_fixed_points,
    iterate_orbit,
)
from .presets import PRESETS, CheckResult, run_preset
from .render import Palette, render_ppm, write_ppm
from .verify import (
    RelationReport,
    SamplerSpec,
    verify_commute,
    verify_composition_containments,
    verify_containment,
    verify_invariance,
    verify_partition,
    verify_property_a,
    verify_translate,
    verify_value_identity,
)

__version__ = "0.1.0"

__all__ = [
    "Add",
    "BatchClassification",
    "CheckResult",
    "ClassGrid",
    "Classification",
    "Const",
    "Cos",
    "Div",
    "EvalResult",
    "Exp",
    "ExponentRangeError",
    "Expr",
    "ExpressionTooLargeError",
    "FixedPointReport",
    "GridSpec",
    "Mul",
    "Neg",
    "OrbitParams",
    "OrbitTrace",
    "PRESETS",
    "Palette",
    "ParseError",
    "Pow",
    "Rect",
    "RelationReport",
    "SamplerSpec",
    "Sin",
    "Sub",
    "Termination",
    "UnknownIdentifierError",
    "Var",
    "Verdict",
    "Z",
    "classify",
    "classify_batch",
    "classify_grid",
    "classify_point",
    "compose",
    "constant_value",
    "count_oscillations",
    "derivative",
    "eval_array",
    "evaluate",
    "find_fixed_points",
    "format_expr",
    "iterate_expr",
    "iterate_orbit",
    "mask_stats",
    "parse",
    "render_ppm",
    "resolve_workers",
    "run_preset",
    "scale",
    "translate",
    "verify_commute",
    "verify_composition_containments",
    "verify_containment",
    "verify_invariance",
    "verify_partition",
    "verify_property_a",
    "verify_translate",
    "verify_value_identity",
    "write_ppm",
]
