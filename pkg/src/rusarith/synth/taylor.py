"""Monomials from gearbox/PAR circuits and Taylor-peeling synthesis."""

from __future__ import annotations

import math

import numpy as np

from . import expr as E
from .series import Series, series_of


def _split(a: float) -> tuple:
    """(copies, a / copies) with the per-copy coefficient at most 1."""
    if a <= 1:
        return 1, a
    copies = 2 ** math.ceil(math.log2(a))
    return copies, a / copies


def _gb_core(a: float, factors: list):
    """GB(arcsin sqrt(a), factors...), leading term a * prod(factors)^2."""
    if a == 1:
        return E.GB(*factors)
    return E.GB(E.Const(math.asin(math.sqrt(a))), *factors)


def monomial_term(a: float, powers) -> object:
    """Expression whose leading behaviour is ``a * prod(x_i ** powers[i])``.

    Even parts go into one gearbox with coefficient arcsin(sqrt(a)); odd
    powers contribute bare inputs to an enclosing PAR.  Coefficients above 1
    in magnitude are split into equal summed copies, negative ones use Neg.
    """
    powers = [int(p) for p in powers]
    if any(p < 0 for p in powers):
        raise ValueError("powers must be nonnegative")
    if not np.isfinite(a):
        raise ValueError("coefficient must be finite")
    if a == 0:
        return E.Const(0.0)
    if sum(powers) == 0:
        return E.Const(float(a))
    if a < 0:
        return E.Neg(monomial_term(-a, powers))
    odd = [E.x(i) for i, p in enumerate(powers) if p % 2]
    even = [E.x(i) for i, p in enumerate(powers) for _ in range(p // 2)]
    if not even:
        if len(odd) == 1:
            return E.Affine(powers.index(1), float(a), 0.0)
        if a == 1:
            return E.PAR(*odd)
        # tan(arctan a) = a supplies the coefficient
        return E.PAR(*odd, E.Const(math.atan(a)))
    copies, each = _split(a)
    core = _gb_core(each, even)
    term = E.PAR(*odd, core) if odd else core
    return term if copies == 1 else E.Sum(*([term] * copies))


def monomial_expr(a: float, b: int):
    """Single-input monomial ``a x^b + O(x^(b+2))``."""
    if b < 1:
        raise ValueError("power must be at least 1")
    return monomial_term(a, [b])


def sliced_monomial_value(a: float, b: int, x: float, r: int) -> float:
    """``r^b`` copies of the monomial evaluated at ``x / r``."""
    if r < 1:
        raise ValueError("slice root must be a positive integer")
    return r ** b * E.eval_angle(monomial_expr(a, b), [x / r])


def leading_error_constant(a: float, b: int, probe: float = 1e-2) -> float:
    """Empirical C in |error| ~ C x^(b+2), measured at a small probe angle."""
    err = abs(E.eval_angle(monomial_expr(a, b), [probe]) - a * probe ** b)
    return err / probe ** (b + 2)


def choose_slices(a: float, b: int, x: float, eps: float) -> int:
    """Smallest r with C x^(b+2) / r^2 <= eps."""
    c = leading_error_constant(a, b)
    return max(1, math.ceil(math.sqrt(c * abs(x) ** (b + 2) / eps)))


def _as_series(coeffs, arity: int, order: int) -> Series:
    c = np.asarray(coeffs, dtype=float)
    if arity == 1:
        if c.ndim != 1:
            raise ValueError("single-input coefficients must be a 1-d sequence")
        if c.size < order + 1:
            raise ValueError(f"order {order} exceeds the {c.size} coefficients given")
        return Series(c[: order + 1], order)
    if arity == 2:
        if c.ndim != 2:
            raise ValueError("two-input coefficients must be a 2-d array c[i][j]")
        if c.shape[0] + c.shape[1] - 2 < order:
            raise ValueError(f"order {order} exceeds the coefficient array")
        return Series(c, order)
    raise ValueError("arity must be 1 or 2")


def taylor_generate(coeffs, arity: int, order: int, tol: float = 0.0) -> list:
    """Peel Taylor terms lowest order first.

    ``coeffs`` is c[n] for one input or c[i][j] (coefficient of x1^i x2^j)
    for two.  Each lowest-order residual monomial is replaced by a gearbox /
    PAR term that matches it to leading order; the term's full expansion is
    subtracted before the next order.  The first entry is the constant.
    """
    residual = _as_series(coeffs, arity, order)
    terms = [E.Const(residual.const)]
    residual = residual - residual.const
    for d in range(1, order + 1):
        for (i, j), a in residual.degree_part(d).items():
            if abs(a) <= tol:
                continue
            term = monomial_term(a, [i, j] if arity == 2 else [i])
            terms.append(term)
            residual = residual - series_of(term, order)
    return terms


def terms_value(terms, inputs) -> float:
    return float(sum(E.eval_angle(t, inputs) for t in terms))
