"""Truncated power series in one or two variables.

Used to expand RUS expressions about the origin so the Taylor-peeling
synthesis can subtract each generated term exactly to a fixed total degree.
"""

from __future__ import annotations

import math

import numpy as np

from . import expr as E


class Series:
    """Coefficients c[i, j] of x1^i x2^j with i + j <= order."""

    def __init__(self, coeffs, order: int):
        c = np.zeros((order + 1, order + 1))
        src = np.asarray(coeffs, dtype=float)
        if src.ndim == 1:
            src = src[:, None]
        m = min(src.shape[0], order + 1), min(src.shape[1], order + 1)
        c[: m[0], : m[1]] = src[: m[0], : m[1]]
        i, j = np.indices(c.shape)
        c[i + j > order] = 0.0
        self.c = c
        self.order = order

    @classmethod
    def constant(cls, value: float, order: int) -> "Series":
        return cls([[value]], order)

    @classmethod
    def variable(cls, index: int, order: int, scale=1.0, offset=0.0) -> "Series":
        c = np.zeros((order + 1, order + 1))
        c[0, 0] = offset
        if order >= 1:
            c[(1, 0) if index == 0 else (0, 1)] = scale
        return cls(c, order)

    def copy(self) -> "Series":
        return Series(self.c.copy(), self.order)

    @property
    def const(self) -> float:
        return float(self.c[0, 0])

    def __add__(self, other):
        if not isinstance(other, Series):
            other = Series.constant(other, self.order)
        return Series(self.c + other.c, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Series(-self.c, self.order)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Series) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series(self.c * float(other), self.order)
        n = self.order
        out = np.zeros_like(self.c)
        for i in range(n + 1):
            for j in range(n + 1 - i):
                a = self.c[i, j]
                if a:
                    out[i:, j:] += a * other.c[: n + 1 - i, : n + 1 - j]
        return Series(out, n)

    __rmul__ = __mul__

    def degree_part(self, d: int) -> dict:
        """{(i, j): coefficient} of the homogeneous degree-d part."""
        return {(i, d - i): float(self.c[i, d - i]) for i in range(d + 1)
                if d - i <= self.order and self.c[i, d - i] != 0}

    def euler(self) -> "Series":
        """Apply x1 d/dx1 + x2 d/dx2 (scales degree-d terms by d)."""
        i, j = np.indices(self.c.shape)
        return Series(self.c * (i + j), self.order)

    def from_euler(self, value0: float) -> "Series":
        """Inverse of ``euler`` with the given constant term."""
        i, j = np.indices(self.c.shape)
        d = i + j
        out = np.where(d > 0, self.c / np.where(d > 0, d, 1), 0.0)
        out[0, 0] = value0
        return Series(out, self.order)

    def inverse(self) -> "Series":
        a0 = self.const
        if a0 == 0:
            raise ZeroDivisionError("series without constant term has no inverse")
        u = self - a0                                # no constant term
        out = Series.constant(1.0, self.order)
        term = Series.constant(1.0, self.order)
        for _ in range(self.order):
            term = term * (u * (-1.0 / a0))
            out = out + term
        return out * (1.0 / a0)

    def __truediv__(self, other):
        if not isinstance(other, Series):
            return self * (1.0 / float(other))
        return self * other.inverse()

    def __call__(self, x1, x2=0.0):
        total = 0.0
        for i in range(self.order + 1):
            for j in range(self.order + 1 - i):
                if self.c[i, j]:
                    total = total + self.c[i, j] * np.power(x1, i) * np.power(x2, j)
        return total


def _power_series(u: Series, coeffs) -> Series:
    """sum coeffs[n] u^n for u without constant term."""
    out = Series.constant(coeffs[0], u.order)
    p = Series.constant(1.0, u.order)
    for n in range(1, u.order + 1):
        p = p * u
        if coeffs[n]:
            out = out + p * coeffs[n]
    return out


def sin_cos(s: Series) -> tuple:
    a = s.const
    u = s - a
    n = s.order
    sin_c = [0.0 if k % 2 == 0 else (-1) ** (k // 2) / math.factorial(k) for k in range(n + 1)]
    cos_c = [0.0 if k % 2 else (-1) ** (k // 2) / math.factorial(k) for k in range(n + 1)]
    su, cu = _power_series(u, sin_c), _power_series(u, cos_c)
    return (su * math.cos(a) + cu * math.sin(a), cu * math.cos(a) - su * math.sin(a))


def tan(s: Series) -> Series:
    sn, cs = sin_cos(s)
    return sn / cs


def arctan(w: Series) -> Series:
    # E(arctan w) = E(w) / (1 + w^2)
    return (w.euler() / (w * w + 1.0)).from_euler(math.atan(w.const))


def series_of(expr, order: int) -> Series:
    """Expansion of an expression's ideal angle about zero inputs."""
    if isinstance(expr, E.Const):
        return Series.constant(expr.value, order)
    if isinstance(expr, E.Affine):
        if expr.index > 1:
            raise ValueError("series support is limited to two inputs")
        return Series.variable(expr.index, order, expr.scale, expr.offset)
    if isinstance(expr, E.Neg):
        return -series_of(expr.child, order)
    kids = [series_of(c, order) for c in expr.children]
    if isinstance(expr, E.Sum):
        out = kids[0]
        for k in kids[1:]:
            out = out + k
        return out
    if isinstance(expr, E.GB):
        s2 = Series.constant(1.0, order)
        for k in kids:
            sn, _ = sin_cos(k)
            s2 = s2 * sn * sn
        # arctan(S / (1 - S))
        return arctan(s2 / (1.0 - s2))
    if isinstance(expr, E.PAR):
        t = Series.constant(1.0, order)
        for k in kids:
            t = t * tan(k)
        return arctan(t)
    raise TypeError(f"not an expression node: {expr!r}")
