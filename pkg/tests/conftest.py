"""Shared test helpers.

random_expr builds expression trees through the smart constructors, so
the trees are already in the folded canonical form that the parser
itself produces; parse(str(tree)) == tree is then a meaningful
round-trip check.  The acceptance tests register one-line results that
are echoed in the terminal summary.
"""

from __future__ import annotations

import random

import numpy as np

from bungee_lab.expr import (
    Const,
    Expr,
    Var,
    add,
    cos_,
    div,
    exp_,
    mul,
    neg,
    pow_,
    sin_,
    sub,
)

_ACCEPTANCE_LINES: list[tuple[int, str, bool]] = []


def record_acceptance(number: int, description: str, passed: bool) -> None:
    _ACCEPTANCE_LINES.append((number, description, passed))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed in sorted(_ACCEPTANCE_LINES):
        word = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {word}  {description}")


def random_const(rng: random.Random) -> Expr:
    kind = rng.randrange(3)
    if kind == 0:
        return Const(float(rng.randint(0, 9)))
    if kind == 1:
        return Const(round(rng.uniform(-4, 4), 3))
    return Const(complex(round(rng.uniform(-2, 2), 3), round(rng.uniform(-2, 2), 3)))


def random_expr(rng: random.Random, depth: int) -> Expr:
    """Random tree of at most the given depth, in canonical folded form."""
    if depth <= 0 or rng.random() < 0.25:
        return Var() if rng.random() < 0.7 else random_const(rng)
    op = rng.randrange(9)
    a = random_expr(rng, depth - 1)
    if op == 0:
        return add(a, random_expr(rng, depth - 1))
    if op == 1:
        return sub(a, random_expr(rng, depth - 1))
    if op == 2:
        return mul(a, random_expr(rng, depth - 1))
    if op == 3:
        return div(a, random_expr(rng, depth - 1))
    if op == 4:
        return neg(a)
    if op == 5:
        n = rng.choice([-3, -2, -1, 2, 3, 4, 64, -64, 1])
        try:
            return pow_(a, n)
        except ValueError:
            return a
    if op == 6:
        return exp_(a)
    if op == 7:
        return sin_(a)
    return cos_(a)


def random_points(rng: random.Random, count: int, half_width: float = 2.0) -> np.ndarray:
    pts = [
        complex(rng.uniform(-half_width, half_width), rng.uniform(-half_width, half_width))
        for _ in range(count)
    ]
    return np.array(pts, dtype=np.complex128)
