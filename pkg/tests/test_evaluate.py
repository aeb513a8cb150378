"""Evaluation semantics: statuses, rescue rules, derivatives."""

from __future__ import annotations

import cmath
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bungee_lab import engine
from bungee_lab.engine import eval_array, evaluate
from bungee_lab.expr import Z, compose, derivative, parse

from conftest import random_expr, random_points


class TestScalarStatuses:
    def test_plain_finite(self):
        r = evaluate(parse("1/z^2"), 2.0)
        assert r.kind == "finite"
        assert r.value == 0.25

    def test_pole_at_zero(self):
        r = evaluate(parse("1/z^2"), 0.0)
        assert r.kind == "pole"

    def test_nonfinite_seed_is_overflow(self):
        assert evaluate(parse("z^2"), complex(float("nan"), 0)).kind == "overflow"
        assert evaluate(parse("z^2"), complex(float("inf"), 0)).kind == "overflow"

    def test_exp_overflow(self):
        r = evaluate(parse("exp(z)"), 1000.0)
        assert r.kind == "overflow"

    def test_division_rescues_overflowed_denominator(self):
        # numerator is fine, denominator blows up: the quotient is 0
        r = evaluate(parse("1/exp(z)"), 1000.0)
        assert r.kind == "finite"
        assert r.value == 0j

    def test_pole_propagates_through_division(self):
        assert evaluate(parse("1/(1/z)"), 0.0).kind == "pole"

    def test_finite_operands_infinite_quotient_is_pole(self):
        # 5e-324 is representable but its reciprocal is not
        assert evaluate(parse("1/z"), 5e-324).kind == "pole"

    def test_overflow_propagates_through_add(self):
        assert evaluate(parse("exp(z)+1"), 1000.0).kind == "overflow"

    def test_trig_overflow_on_large_imaginary(self):
        assert evaluate(parse("sin(z)"), 1000j).kind == "overflow"
        assert evaluate(parse("cos(z)"), 1000j).kind == "overflow"


class TestNegativePowers:
    def test_matches_explicit_division(self):
        pts = np.array([0.0, 2.0, 1e200, 5e-162], dtype=np.complex128)
        va, sa = eval_array(parse("z^-2"), pts)
        vb, sb = eval_array(parse("1/z^2"), pts)
        assert np.array_equal(sa, sb)
        ok = sa == engine.OK
        assert np.array_equal(va[ok], vb[ok])
        # spot-check the interesting rows: pole at 0, rescue at 1e200
        assert list(sa) == [engine.POLE, engine.OK, engine.OK, engine.POLE]
        assert va[2] == 0j

    def test_positive_power_by_squaring(self):
        r = evaluate(parse("z^13"), 1.1 + 0.3j)
        assert r.kind == "finite"
        assert abs(r.value - (1.1 + 0.3j) ** 13) <= 1e-12 * abs(r.value)


class TestArrayAgreement:
    def test_array_matches_scalar(self):
        rng = random.Random(7)
        exprs = [random_expr(rng, 6) for _ in range(40)]
        pts = random_points(np.random.default_rng(7), 25)
        for e in exprs:
            vals, stats = eval_array(e, pts)
            for k, z in enumerate(pts):
                r = evaluate(e, complex(z))
                assert engine.STATUS_NAMES[stats[k]] == r.kind
                if r.kind == "finite":
                    assert vals[k] == r.value

    def test_nonfinite_input_rows_flagged(self):
        pts = np.array([1.0, complex(float("inf"), 0)], dtype=np.complex128)
        _, stats = eval_array(Z, pts)
        assert stats[0] == engine.OK
        assert stats[1] == engine.OVERFLOW


class TestComposition:
    def test_eval_of_composition_is_composition_of_evals(self):
        f, g = parse("z^2"), parse("1/z^2")
        r = evaluate(compose(f, g), 2.0)
        assert r.kind == "finite"
        assert r.value == 0.0625

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 2**63 - 1))
    def test_composition_homomorphism(self, seed):
        rng = random.Random(seed)
        f = random_expr(rng, 5)
        g = random_expr(rng, 5)
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        inner = evaluate(g, z)
        if inner.kind != "finite":
            return
        direct = evaluate(compose(f, g), z)
        stepped = evaluate(f, inner.value)
        assert direct.kind == stepped.kind
        if direct.kind == "finite":
            scale = max(1.0, abs(stepped.value))
            assert abs(direct.value - stepped.value) <= 1e-12 * scale

    def test_entire_expressions_never_report_pole(self):
        rng = random.Random(99)
        pts = random_points(np.random.default_rng(99), 50)
        found = 0
        while found < 40:
            e = random_expr(rng, 6)
            if not e.entire:
                continue
            found += 1
            _, stats = eval_array(e, pts)
            assert not (stats == engine.POLE).any()


class TestDerivative:
    def test_gaussian_closed_form(self):
        f = parse("z*exp(-z^2)")
        fp = derivative(f)
        for z in (0.3, -1.2 + 0.4j, 0.05j):
            want = cmath.exp(-z * z) * (1 - 2 * z * z)
            got = evaluate(fp, z)
            assert got.kind == "finite"
            assert abs(got.value - want) <= 1e-12 * max(1.0, abs(want))

    def test_against_central_differences(self):
        rng = np.random.default_rng(11)
        texts = ["z^2", "1/z^2", "z*exp(z^2)", "1+z+exp(-z)", "z+sin(z)", "cos(z)"]
        for text in texts:
            f = parse(text)
            fp = derivative(f)
            checked = 0
            for z in random_points(rng, 400):
                z = complex(z)
                if abs(z) < 0.3:
                    continue
                h = 1e-6 * (1 + abs(z))
                lo, hi = evaluate(f, z - h), evaluate(f, z + h)
                sym = evaluate(fp, z)
                if "finite" != lo.kind or "finite" != hi.kind or "finite" != sym.kind:
                    continue
                fd = (hi.value - lo.value) / (2 * h)
                assert abs(sym.value - fd) <= 1e-6 * max(1.0, abs(sym.value)), text
                checked += 1
                if checked >= 100:
                    break
            assert checked >= 100, text

    def test_derivative_of_reciprocal(self):
        fp = derivative(parse("1/z"))
        r = evaluate(fp, 2.0)
        assert r.kind == "finite"
        assert abs(r.value - (-0.25)) <= 1e-15
