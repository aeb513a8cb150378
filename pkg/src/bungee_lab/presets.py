"""Canned verification suites for the package's worked example maps.

Each preset bundles a family of maps with the relation checks that are
expected to hold for it (or, for the negative examples, expected to
fail in a specific way).  A preset passes when every check's outcome
matches its stated expectation; reports are returned either way, so a
failing run shows exactly which relation broke and where.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .expr import compose, iterate_expr, parse
from .orbit import OrbitParams, Rect, find_fixed_points
from .verify import (
    RelationReport,
    SamplerSpec,
    verify_commute,
    verify_composition_containments,
    verify_containment,
    verify_invariance,
    verify_property_a,
    verify_translate,
    verify_value_identity,
)

DEFAULT_SAMPLES = 4096

# Every map text exercised by a preset, for parser and numerics sweeps.
PRESET_FUNCTIONS: tuple[str, ...] = (
    "z^2",
    "1/z^2",
    "z*exp(z^2)",
    "-z*exp(z^2)",
    "0.5*z*exp(z^2)",
    "z*exp(-z^2)",
    "1+z+exp(-z)",
    "1+z+exp(-z)+2*pi*i",
    "z+sin(z)",
    "z+sin(z)+2*pi",
    "sin(z)",
)


def _bidisc(samples: int, seed: int) -> SamplerSpec:
    """Commutation sampler: the unit bidisc |Re z| <= 1, |Im z| <= 1."""
    return SamplerSpec(Rect(0, 2.0, 2.0), samples, seed)


@dataclass
class CheckResult:
    name: str
    passed: bool
    expectation: str
    report: dict

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "expectation": self.expectation,
            "report": self.report,
        }


def _expect_clean(name: str, report: RelationReport, extra: str = "") -> CheckResult:
    passed = report.violations == 0 and not report.detail.get("inconclusive", False)
    expectation = "no violations" + (f"; {extra}" if extra else "")
    return CheckResult(name, passed, expectation, report.to_dict())


def _expect_violations(name: str, report: RelationReport, extra: str = "") -> CheckResult:
    passed = report.violations > 0 and not report.detail.get("inconclusive", False)
    expectation = "violations found" + (f"; {extra}" if extra else "")
    return CheckResult(name, passed, expectation, report.to_dict())


def _invariance_checks(f, g, sampler, params, prefix="") -> list[CheckResult]:
    out = []
    for kind in ("escaping", "bounded"):
        rep = verify_invariance(f, g, kind, sampler, params)
        out.append(_expect_clean(f"{prefix}invariance-{kind}", rep))
    return out


def run_power_pair(samples: int = DEFAULT_SAMPLES, seed: int = 42) -> list[CheckResult]:
    """z^2 against 1/z^2: a commuting pair where one map has poles."""
    f = parse("z^2")
    g = parse("1/z^2")
    params = OrbitParams()
    sampler = SamplerSpec(Rect(0, 4.0, 4.0), samples, seed)
    checks = [_expect_clean("commute", verify_commute(f, g, _bidisc(samples, seed), params))]
    k_rep, bu_rep = verify_composition_containments(
        f, g, sampler, params, bu_mode="any"
    )
    checks.append(_expect_clean("bounded-intersection", k_rep))
    checks.append(_expect_clean("bungee-union", bu_rep))
    empty = verify_containment(
        [(f, "bungee")],
        [],
        sampler,
        params,
        relation="bungee-empty",
        f_text=str(f),
    )
    checks.append(
        _expect_clean("bungee-of-square-empty", empty, "no sample oscillates under z^2")
    )
    return checks


def run_exp_family(samples: int = DEFAULT_SAMPLES, seed: int = 42) -> list[CheckResult]:
    """z*exp(z^2) and its negation: commuting entire pair."""
    f = parse("z*exp(z^2)")
    g = parse("-z*exp(z^2)")
    params = OrbitParams()
    sampler = SamplerSpec(Rect(0, 4.0, 4.0), samples, seed)
    checks = [_expect_clean("commute", verify_commute(f, g, _bidisc(samples, seed), params))]
    k_rep, bu_rep = verify_composition_containments(
        f, g, sampler, params, bu_mode="all"
    )
    checks.append(_expect_clean("bounded-intersection", k_rep))
    checks.append(_expect_clean("bungee-intersection", bu_rep))
    checks.extend(_invariance_checks(f, g, sampler, params))
    small = SamplerSpec(Rect(0, 1.0, 1.0), samples, seed)
    ident = verify_value_identity(
        iterate_expr(compose(f, g), 2),
        iterate_expr(f, 4),
        small,
        params,
        relation="composition-square-equals-fourth-iterate",
        f_text=str(f),
        g_text=str(g),
    )
    checks.append(_expect_clean("compose-square-is-f4", ident))
    return checks


def run_scaled_family(samples: int = DEFAULT_SAMPLES, seed: int = 42) -> list[CheckResult]:
    """z*exp(z^2) against its 0.5-multiple: these do not commute.

    Negating the map (the sec4-expfamily pair) commutes because -1
    squares to 1; a scale factor that is not a root of unity breaks
    the algebra, and the pointwise check must see that.
    """
    f = parse("z*exp(z^2)")
    g = parse("0.5*z*exp(z^2)")
    params = OrbitParams()
    rep = verify_commute(f, g, _bidisc(samples, seed), params)
    return [
        _expect_violations(
            "commute-fails",
            rep,
            "scaling by 0.5 breaks commutation (only roots of unity work)",
        )
    ]


def run_indifferent_fixed_point(
    samples: int = DEFAULT_SAMPLES, seed: int = 42
) -> list[CheckResult]:
    """z*exp(-z^2) has an indifferent fixed point at the origin."""
    f = parse("z*exp(-z^2)")
    reports = find_fixed_points(f, Rect(0, 2.0, 2.0), starts=32)
    origin = [r for r in reports if abs(r.location) <= 1e-8]
    passed = bool(origin) and all(
        abs(r.multiplier - 1) <= 1e-8
        and r.kind in ("rationally_indifferent", "indifferent")
        for r in origin
    )
    payload = {
        "function": str(f),
        "fixed_points": [
            {
                "location": [r.location.real, r.location.imag],
                "multiplier": [r.multiplier.real, r.multiplier.imag],
                "kind": r.kind,
                "root_of_unity_order": r.root_of_unity_order,
                "residual": r.residual,
            }
            for r in reports
        ],
    }
    return [
        CheckResult(
            "origin-indifferent",
            passed,
            "fixed point within 1e-8 of 0 with multiplier within 1e-8 of 1",
            payload,
        )
    ]


FATOU_PARAMS = OrbitParams(
    max_iter=2000,
    escape_radius=50.0,
    bound_radius=30.0,
    min_oscillations=3,
    tail_window=10,
)


def run_fatou_pair(samples: int = DEFAULT_SAMPLES, seed: int = 42) -> list[CheckResult]:
    """1+z+exp(-z) and its 2*pi*i translate.

    Orbits here escape by unit drift, |z_n| roughly n, so the default
    radii would never trigger; this preset uses small radii and a
    longer horizon instead.
    """
    f = parse("1+z+exp(-z)")
    c = 2j * math.pi
    params = FATOU_PARAMS
    sampler = SamplerSpec(Rect(0, 8.0, 8.0), samples, seed)
    g = parse("1+z+exp(-z)+2*pi*i")
    checks = [_expect_clean("commute", verify_commute(f, g, _bidisc(samples, seed), params))]
    checks.append(
        _expect_clean("forward-escaping-f-g", verify_property_a(f, g, sampler, params))
    )
    checks.append(
        _expect_clean("forward-escaping-g-f", verify_property_a(g, f, sampler, params))
    )
    checks.extend(_invariance_checks(f, g, sampler, params))
    trep = verify_translate(f, c, sampler, params)
    ff = trep.detail.get("first_failure")
    sig = (
        not trep.detail["identity_holds"]
        and trep.detail["drift_identity_holds"]
        and ff is not None
        and ff["n"] == 2
        and abs(ff["error"] - abs(c)) <= 1e-6
    )
    checks.append(
        CheckResult(
            "translate-drift-signature",
            sig,
            "g^n = f^n + C fails first at n=2 with error |C|; g^n = f^n + n*C holds",
            trep.to_dict(),
        )
    )
    return checks


def run_sine_drift_pair(samples: int = DEFAULT_SAMPLES, seed: int = 42) -> list[CheckResult]:
    """z+sin(z) and its 2*pi translate: same structure as the
    exponential drift pair but with default radii."""
    f = parse("z+sin(z)")
    c = 2 * math.pi
    params = OrbitParams()
    sampler = SamplerSpec(Rect(0, 8.0, 8.0), samples, seed)
    g = parse("z+sin(z)+2*pi")
    checks = [_expect_clean("commute", verify_commute(f, g, _bidisc(samples, seed), params))]
    checks.append(
        _expect_clean("forward-escaping-f-g", verify_property_a(f, g, sampler, params))
    )
    checks.append(
        _expect_clean("forward-escaping-g-f", verify_property_a(g, f, sampler, params))
    )
    checks.extend(_invariance_checks(f, g, sampler, params))
    trep = verify_translate(f, c, sampler, params)
    ff = trep.detail.get("first_failure")
    sig = (
        not trep.detail["identity_holds"]
        and trep.detail["drift_identity_holds"]
        and ff is not None
        and ff["n"] == 2
        and abs(ff["error"] - abs(c)) <= 1e-6
    )
    checks.append(
        CheckResult(
            "translate-drift-signature",
            sig,
            "g^n = f^n + C fails first at n=2 with error |C|; g^n = f^n + n*C holds",
            trep.to_dict(),
        )
    )
    return checks


def run_sine_periodic_translate(
    samples: int = DEFAULT_SAMPLES, seed: int = 42
) -> list[CheckResult]:
    """sin(z) translated by its period 2*pi: iterates shift exactly."""
    f = parse("sin(z)")
    c = 2 * math.pi
    params = OrbitParams()
    sampler = SamplerSpec(Rect(0, 2.0, 2.0), samples, seed)
    trep = verify_translate(f, c, sampler, params)
    passed = (
        trep.violations == 0
        and trep.detail["identity_holds"]
        and trep.samples_confident >= 10
    )
    return [
        CheckResult(
            "translate-identity-holds",
            passed,
            "g^n = f^n + C for all n up to n_max (C is a period of f)",
            trep.to_dict(),
        )
    ]


def run_composition_question(
    samples: int = DEFAULT_SAMPLES, seed: int = 42
) -> list[CheckResult]:
    """Report-only probe: do points bounded under exactly one of f, g
    stay bounded under f o g?  For the power pair the answer observed
    here is no (points inside the unit disk are bounded under z^2 but
    oscillate under 1/z^4), so this check records the counts without
    asserting an expectation.
    """
    f = parse("z^2")
    g = parse("1/z^2")
    fg = compose(f, g)
    params = OrbitParams()
    sampler = SamplerSpec(Rect(0, 4.0, 4.0), samples, seed)
    rep = verify_containment(
        [(f, "bounded"), (g, "bounded")],
        [(fg, "bounded")],
        sampler,
        params,
        lhs_mode="one",
        rhs_mode="any",
        relation="bounded-symmetric-difference-inside-composition",
        f_text=str(f),
        g_text=str(g),
    )
    return [
        CheckResult(
            "symmetric-difference-probe",
            True,
            "conjectural: report only, violations recorded but not asserted",
            rep.to_dict(),
        )
    ]


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    run: Callable[[int, int], list[CheckResult]]


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        Preset("sec4-power", "z^2 and 1/z^2: commutation and containments", run_power_pair),
        Preset(
            "sec4-expfamily",
            "z*exp(z^2) and -z*exp(z^2): entire commuting pair",
            run_exp_family,
        ),
        Preset(
            "scaled-family",
            "z*exp(z^2) and its 0.5-multiple: commutation fails",
            run_scaled_family,
        ),
        Preset(
            "indifferent-fixed-point",
            "z*exp(-z^2): indifferent fixed point at the origin",
            run_indifferent_fixed_point,
        ),
        Preset(
            "fatou-pair",
            "1+z+exp(-z) and its 2*pi*i translate (drift radii)",
            run_fatou_pair,
        ),
        Preset(
            "sine-drift-pair",
            "z+sin(z) and its 2*pi translate",
            run_sine_drift_pair,
        ),
        Preset(
            "sine-periodic-translate",
            "sin(z) shifted by its period: exact iterate identity",
            run_sine_periodic_translate,
        ),
        Preset(
            "composition-question",
            "report-only probe of the bounded symmetric difference",
            run_composition_question,
        ),
    )
}


def run_preset(name: str, samples: int = DEFAULT_SAMPLES, seed: int = 42) -> list[CheckResult]:
    if name == "all-paper":
        results = []
        for preset in PRESETS.values():
            for check in preset.run(samples, seed):
                results.append(
                    CheckResult(
                        f"{preset.name}:{check.name}",
                        check.passed,
                        check.expectation,
                        check.report,
                    )
                )
        return results
    if name not in PRESETS:
        known = ", ".join([*PRESETS, "all-paper"])
        raise KeyError(f"unknown preset {name!r}; known presets: {known}")
    return PRESETS[name].run(samples, seed)
