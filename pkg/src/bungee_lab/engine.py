"""Vectorized expression evaluation over IEEE complex doubles.

Every evaluation in the package goes through eval_array so that single
points and pixel grids see bit-identical arithmetic.  Each node returns
a complex128 value array plus a uint8 status array:

    OK        value is finite
    OVERFLOW  value left the representable range
    POLE      a division consumed a vanishing divisor

Statuses propagate child-first, left operand before right.  A node
whose own result is non-finite despite OK children reports OVERFLOW,
except division, which reports POLE: with a finite numerator a
non-finite quotient means the divisor was zero or indistinguishable
from zero at double precision.  One asymmetry keeps reciprocals honest:
a finite numerator over an OVERFLOW divisor evaluates to 0 with OK
status (the limiting value), rather than propagating the divisor's
failure.  Negative Pow exponents share the division rules.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Add, Const, Cos, Div, Exp, Expr, Mul, Neg, Pow, Sin, Sub, Var

OK = np.uint8(0)
OVERFLOW = np.uint8(1)
POLE = np.uint8(2)

STATUS_NAMES = ("finite", "overflow", "pole")


def _settle(values: np.ndarray, status: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Demote OK entries whose value turned non-finite to OVERFLOW."""
    blown = (status == OK) & ~np.isfinite(values)
    if blown.any():
        status = np.where(blown, OVERFLOW, status)
    return values, status


def _merge2(sa: np.ndarray, sb: np.ndarray) -> np.ndarray:
    return np.where(sa != OK, sa, sb)


def _mul_combine(va, sa, vb, sb):
    return _settle(va * vb, _merge2(sa, sb))


def _div_combine(va, sa, vb, sb):
    q = va / vb
    status = _merge2(sa, sb)
    rescue = (sa == OK) & (sb == OVERFLOW)
    if rescue.any():
        status = np.where(rescue, OK, status)
        q = np.where(rescue, np.complex128(0), q)
    pole = (sa == OK) & (sb == OK) & ~np.isfinite(q)
    if pole.any():
        status = np.where(pole, POLE, status)
    return q, status


def _pow_combine(vals, status, n: int):
    """vals**n for n >= 1 by square-and-multiply on whole arrays."""
    acc_v, acc_s = vals, status
    res_v = None
    res_s = None
    m = n
    while True:
        if m & 1:
            if res_v is None:
                res_v, res_s = acc_v, acc_s
            else:
                res_v, res_s = _mul_combine(res_v, res_s, acc_v, acc_s)
        m >>= 1
        if not m:
            return res_v, res_s
        acc_v, acc_s = _mul_combine(acc_v, acc_s, acc_v, acc_s)


def eval_array(e: Expr, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate e at every point of z.

    Returns (values, status), both shaped like z.  values entries are
    meaningful only where status == OK; elsewhere they are whatever the
    hardware produced.
    """
    z = np.asarray(z, dtype=np.complex128)
    with np.errstate(all="ignore"):
        return _eval(e, z)


def _eval(e: Expr, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(e, Var):
        status = np.where(np.isfinite(z), OK, OVERFLOW)
        return z, status
    if isinstance(e, Const):
        return (
            np.full(z.shape, e.value, dtype=np.complex128),
            np.zeros(z.shape, dtype=np.uint8),
        )
    if isinstance(e, Add):
        va, sa = _eval(e.a, z)
        vb, sb = _eval(e.b, z)
        return _settle(va + vb, _merge2(sa, sb))
    if isinstance(e, Sub):
        va, sa = _eval(e.a, z)
        vb, sb = _eval(e.b, z)
        return _settle(va - vb, _merge2(sa, sb))
    if isinstance(e, Mul):
        va, sa = _eval(e.a, z)
        vb, sb = _eval(e.b, z)
        return _mul_combine(va, sa, vb, sb)
    if isinstance(e, Div):
        va, sa = _eval(e.a, z)
        vb, sb = _eval(e.b, z)
        return _div_combine(va, sa, vb, sb)
    if isinstance(e, Neg):
        va, sa = _eval(e.a, z)
        return -va, sa
    if isinstance(e, Pow):
        vb, sb = _eval(e.base, z)
        n = e.exponent
        if n > 0:
            return _pow_combine(vb, sb, n)
        pv, ps = _pow_combine(vb, sb, -n)
        ones = np.ones(z.shape, dtype=np.complex128)
        return _div_combine(ones, np.zeros(z.shape, dtype=np.uint8), pv, ps)
    if isinstance(e, Exp):
        va, sa = _eval(e.a, z)
        return _settle(np.exp(va), sa)
    if isinstance(e, Sin):
        va, sa = _eval(e.a, z)
        return _settle(np.sin(va), sa)
    if isinstance(e, Cos):
        va, sa = _eval(e.a, z)
        return _settle(np.cos(va), sa)
    raise TypeError(f"not an expression node: {e!r}")


@dataclass(frozen=True)
class EvalResult:
    kind: str  # "finite" | "overflow" | "pole"
    value: complex  # meaningful only when kind == "finite"


def evaluate(e: Expr, z: complex) -> EvalResult:
    """Evaluate at a single point with the same semantics as eval_array."""
    vals, status = eval_array(e, np.array([z], dtype=np.complex128))
    return EvalResult(STATUS_NAMES[int(status[0])], complex(vals[0]))
