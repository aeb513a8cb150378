"""Sampled relation checks: containment, invariance, commutation, translates."""

from __future__ import annotations

import math

import numpy as np
import pytest

from bungee_lab.expr import parse
from bungee_lab.orbit import OrbitParams, Rect
from bungee_lab.verify import (
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

BIDISC = Rect(0, 2.0, 2.0)
SQUARE4 = Rect(0, 4.0, 4.0)


def sampler(count=600, seed=42, rect=SQUARE4):
    return SamplerSpec(rect, count, seed)


class TestSampler:
    def test_deterministic(self):
        a = sampler().points()
        b = sampler().points()
        assert np.array_equal(a, b)

    def test_seed_changes_points(self):
        assert not np.array_equal(sampler(seed=1).points(), sampler(seed=2).points())

    def test_points_inside_rect(self):
        pts = sampler(rect=Rect(1 + 2j, 2.0, 4.0)).points()
        assert np.all(np.abs(pts.real - 1) <= 1.0)
        assert np.all(np.abs(pts.imag - 2) <= 2.0)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            SamplerSpec(BIDISC, 0)


class TestReportShape:
    def test_key_order(self):
        r = verify_partition(parse("z^2"), sampler(100), OrbitParams(max_iter=100))
        assert list(r.to_dict().keys()) == [
            "relation",
            "f",
            "g",
            "params",
            "seed",
            "samples_total",
            "samples_confident",
            "violations",
            "violation_examples",
            "runtime_ms",
            "detail",
        ]
        assert r.runtime_ms >= 0
        assert r.params["max_iter"] == 100


class TestContainment:
    def test_true_relation_has_no_violations(self):
        p = OrbitParams(max_iter=400)
        reports = verify_composition_containments(parse("z^2"), parse("1/z^2"), sampler(), p)
        assert len(reports) == 2
        for r in reports:
            assert r.violations == 0
            assert r.samples_confident > 0
            assert r.violation_examples == []

    def test_false_relation_reports_witnesses(self):
        p = OrbitParams(max_iter=400)
        r = verify_containment(
            [(parse("z^2"), "bounded")],
            [(parse("z^2"), "escaping")],
            sampler(),
            p,
            relation="bounded-in-escaping",
            f_text="z^2",
        )
        assert r.violations > 0
        assert 0 < len(r.violation_examples) <= 20
        ex = r.violation_examples[0]
        assert set(ex) == {"z", "lhs", "rhs"}
        z = complex(*ex["z"])
        assert abs(z) < 1  # interior of the disc stays bounded under z^2

    def test_exponential_pair_containments(self):
        p = OrbitParams(max_iter=400)
        reports = verify_composition_containments(
            parse("z*exp(z^2)"), parse("-z*exp(z^2)"), sampler(800), p
        )
        for r in reports:
            assert r.violations == 0
            assert r.samples_confident <= r.samples_total


class TestInvariance:
    def test_forward_invariance_clean_pairs(self):
        p = OrbitParams(max_iter=600)
        f = parse("z*exp(z^2)")
        for kind in ("escaping", "bounded"):
            r = verify_invariance(f, f, kind, sampler(800), p)
            assert r.relation == f"{kind}-set-forward-invariant"
            assert r.violations == 0
            assert r.detail["kind"] == kind
            assert r.detail["members_at_z"] >= 0

    def test_violations_detected_for_wrong_map(self):
        # push escaping points of z^2 through a contraction: membership breaks
        p = OrbitParams(max_iter=300)
        r = verify_invariance(parse("z^2"), parse("z*0.001"), "escaping", sampler(600), p)
        assert r.violations > 0
        assert len(r.violation_examples) <= 20
        assert r.detail["reverse_only"] >= 0

    def test_examples_have_orbit_context(self):
        p = OrbitParams(max_iter=300)
        r = verify_invariance(parse("z^2"), parse("z*0.001"), "escaping", sampler(600), p)
        ex = r.violation_examples[0]
        assert set(ex) == {"z", "gz", "z_verdict", "gz_verdict"}
        assert ex["z_verdict"] == "escaping"
        assert ex["gz_verdict"] != "escaping"


class TestCommute:
    def test_commuting_pair(self):
        r = verify_commute(parse("z^2"), parse("1/z^2"), sampler(rect=BIDISC))
        assert r.violations == 0
        assert r.detail["commutes"] is True
        assert r.detail["max_relative_error"] <= 1e-9
        assert not r.detail["inconclusive"]

    def test_sign_flipped_exponential_pair(self):
        r = verify_commute(parse("z*exp(z^2)"), parse("-z*exp(z^2)"), sampler(rect=BIDISC))
        assert r.detail["commutes"] is True

    def test_non_commuting_pair(self):
        r = verify_commute(parse("z*exp(z^2)"), parse("0.5*z*exp(z^2)"), sampler(rect=BIDISC))
        assert r.violations > 0
        assert r.detail["commutes"] is False
        w = r.detail["witness"]
        assert w["relative_error"] > 1e-9
        # the witness records both composite values at the worst point
        assert len(w["f_of_g"]) == 2 and len(w["g_of_f"]) == 2

    def test_inconclusive_when_no_usable_points(self):
        # exp(z)^k overflows everywhere on a far-out rectangle
        r = verify_commute(
            parse("exp(z)"), parse("exp(z)+1"),
            SamplerSpec(Rect(1e6, 1.0, 1.0), 50, 42),
        )
        assert r.detail["inconclusive"] is True
        assert r.detail["commutes"] is False

    def test_tolerance_respected(self):
        near = verify_commute(parse("z^2"), parse("1/z^2"), sampler(rect=BIDISC), tol=1e-20)
        assert near.violations > 0  # rounding noise exceeds an absurd tolerance


class TestValueIdentity:
    def test_composition_square_equals_fourth_iterate(self):
        from bungee_lab.expr import compose, iterate_expr

        f, g = parse("z*exp(z^2)"), parse("-z*exp(z^2)")
        lhs = iterate_expr(compose(f, g), 2)
        rhs = iterate_expr(f, 4)
        r = verify_value_identity(lhs, rhs, sampler(100, rect=BIDISC))
        assert r.violations == 0
        assert r.detail["max_relative_error"] <= 1e-9

    def test_detects_mismatch(self):
        r = verify_value_identity(parse("z^2"), parse("z^3"), sampler(100, rect=BIDISC))
        assert r.violations > 0


class TestTranslate:
    def test_exact_period_of_sine(self):
        r = verify_translate(parse("sin(z)"), 2 * math.pi,
                             sampler(100, rect=BIDISC), OrbitParams())
        assert r.violations == 0
        assert r.detail["identity_holds"] is True
        assert r.detail["max_error"] < 1e-9
        assert r.detail["set_agreement"]["disagreeing"] == 0
        assert r.samples_confident > 0

    def test_zero_translate_is_trivially_exact(self):
        r = verify_translate(parse("z^2"), 0.0, sampler(100, rect=BIDISC), OrbitParams())
        assert r.violations == 0
        assert r.detail["identity_holds"] is True

    def test_pseudo_period_counterexample(self):
        r = verify_translate(parse("1+z+exp(-z)"), 2j * math.pi,
                             sampler(100, rect=BIDISC), OrbitParams())
        assert r.violations > 0
        assert r.detail["identity_holds"] is False
        ff = r.detail["first_failure"]
        assert ff["n"] == 2
        # at n=2 the translated orbit has drifted by exactly one extra period
        assert abs(ff["error"] - 2 * math.pi) < 1e-6

    def test_drift_law_for_displacement_map(self):
        r = verify_translate(parse("z+sin(z)"), 2 * math.pi,
                             sampler(100, rect=BIDISC), OrbitParams())
        assert r.detail["drift_identity_holds"] is True
        assert r.detail["max_drift_relative_error"] < 1e-9

    def test_exact_law_excludes_drift_map(self):
        r = verify_translate(parse("z+sin(z)"), 2 * math.pi,
                             sampler(100, rect=BIDISC), OrbitParams())
        assert r.detail["identity_holds"] is False


class TestPropertyAAndPartition:
    def test_escaping_orbits_forwarded(self):
        p = OrbitParams(max_iter=600)
        r = verify_property_a(parse("z*exp(z^2)"), parse("-z*exp(z^2)"), sampler(800), p)
        assert r.relation == "escaping-orbits-forwarded"
        assert r.violations == 0

    def test_partition_counts_cover_all_samples(self):
        p = OrbitParams(max_iter=300)
        r = verify_partition(parse("1/z^2"), sampler(500), p)
        assert sum(r.detail["counts"].values()) == r.samples_total
        assert r.detail["entire"] is False
        assert 0.0 <= r.detail["decisive_fraction"] <= 1.0

    def test_partition_of_entire_map_has_no_poles(self):
        p = OrbitParams(max_iter=300)
        r = verify_partition(parse("z^2"), sampler(500), p)
        assert r.detail["counts"]["pole"] == 0
        assert r.detail["entire"] is True
