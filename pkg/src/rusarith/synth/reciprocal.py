"""Reciprocal approximations: Chebyshev polynomials, squaring identities,
the binomial product and input normalization."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as P

from . import expr as E

# Coefficients of 1/(1 - y) approximants on [0, 1/2], ascending powers of y.
CHEBYSHEV_COEFFS = {
    2: (1.012194, 0.608948, 2.664355),
    4: (1.000359, 0.966359, 1.490195, -1.362554, 5.019604),
    6: (1.000012, 0.9980208, 1.059785, 0.336629, 4.386547, -7.295458, 9.456853),
}
Y_INTERVAL = (0.0, 0.5)


@dataclass
class PolynomialApprox:
    coefficients: list
    interval: tuple = Y_INTERVAL

    def __call__(self, y):
        return P.polyval(y, np.asarray(self.coefficients, dtype=float))

    def to_json(self) -> str:
        d = asdict(self)
        d["interval"] = list(self.interval)
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PolynomialApprox":
        d = json.loads(text)
        return cls(list(d["coefficients"]), tuple(d["interval"]))


def reciprocal_target(y):
    return 1.0 / (1.0 - np.asarray(y, dtype=float))


def chebyshev_reciprocal(order: int) -> PolynomialApprox:
    """Tabulated approximant of the given even order (2, 4 or 6)."""
    if order not in CHEBYSHEV_COEFFS:
        raise ValueError(f"order must be one of {sorted(CHEBYSHEV_COEFFS)}")
    return PolynomialApprox(list(CHEBYSHEV_COEFFS[order]))


def chebyshev_truncation(order: int, interval=Y_INTERVAL) -> PolynomialApprox:
    """Truncated Chebyshev series of 1/(1 - y) mapped to ``interval``.

    Used to cross-check the tabulated coefficients: the series is computed
    by high-degree interpolation, cut at ``order`` and converted to powers
    of y.
    """
    lo, hi = interval
    f = lambda t: reciprocal_target(lo + (t + 1) * (hi - lo) / 2)
    cheb = C.chebinterpolate(f, 60)[: order + 1]
    in_t = P.Polynomial(C.cheb2poly(cheb))
    # compose with t = (2y - lo - hi) / (hi - lo)
    coeffs = in_t(P.Polynomial([-(lo + hi) / (hi - lo), 2 / (hi - lo)])).coef
    return PolynomialApprox(list(coeffs[: order + 1]), tuple(interval))


def max_error(approx, n_points: int = 20001, relative: bool = False,
              interval=Y_INTERVAL) -> float:
    y = np.linspace(*interval, n_points)
    err = np.abs(approx(y) - reciprocal_target(y))
    if relative:
        err = err / reciprocal_target(y)
    return float(err.max())


# squaring

def squaring_angles(alpha: float = 1.0) -> tuple:
    """Gearbox constants of the eighth-order identity for alpha x^2."""
    if alpha < 2 / math.sqrt(15):
        raise ValueError(f"alpha = {alpha} is below 2/sqrt(15)")
    args = (alpha, alpha ** 2 - alpha / 3, 2 * alpha ** 3 / 3 - 8 * alpha / 45)
    # the lower boundary makes the last argument vanish up to rounding
    args = tuple(0.0 if -1e-12 < a < 0 else a for a in args)
    if any(a < 0 or a > 1 for a in args):
        raise ValueError(f"arcsin arguments {args} leave [0, 1] for alpha = {alpha}")
    return tuple(math.asin(math.sqrt(a)) for a in args)


def squaring_expr(alpha: float = 1.0, x_leaf=None):
    """alpha x^2 = GB(x, g1) - GB(x, x, g2) - GB(x, x, x, g3) + O(x^8)."""
    x = x_leaf if x_leaf is not None else E.x(0)
    g1, g2, g3 = (E.Const(g) for g in squaring_angles(alpha))
    first = E.GB(x) if alpha == 1.0 else E.GB(x, g1)
    return E.Sum(first, E.Neg(E.GB(x, x, g2)), E.Neg(E.GB(x, x, x, g3)))


def squaring_identity(x: float, alpha: float = 1.0) -> float:
    return E.eval_angle(squaring_expr(alpha), [x])


R2_SPLIT_ALPHA = CHEBYSHEV_COEFFS[2][2] - 2.0


def assemble_r2():
    """R2(y) as an expression in y.

    With x = y - 1/4, y^2 = x^2 + y/2 - 1/16, so
    R2 = (c0 - c2/16) + (c1 + c2/2) y + c2 x^2 and the c2 x^2 part is two
    unit squarings plus one with alpha = c2 - 2.
    """
    c0, c1, c2 = CHEBYSHEV_COEFFS[2]
    x = E.Affine(0, 1.0, -0.25)
    return E.Sum(E.Const(c0 - c2 / 16), E.Affine(0, c1 + c2 / 2, 0.0),
                 squaring_expr(1.0, x), squaring_expr(1.0, x),
                 squaring_expr(R2_SPLIT_ALPHA, x))


# binomial method

def binomial_reciprocal_value(y: float, n_stages: int) -> float:
    """prod_{j<n} (1 + y^(2^j)) = (1 - y^(2^n)) / (1 - y)."""
    _check_y(y)
    return (1.0 - y ** (2 ** n_stages)) / (1.0 - y)


def binomial_product(y: float, n_stages: int) -> float:
    """The literal product, for comparison with the closed form."""
    _check_y(y)
    out = 1.0
    for j in range(n_stages):
        out *= 1.0 + y ** (2 ** j)
    return out


def binomial_error(y: float, n_stages: int) -> float:
    """Relative error against 1/(1 - y); equals y^(2^n)."""
    _check_y(y)
    return y ** (2 ** n_stages)


def binomial_bound(n_stages: int) -> float:
    return 2.0 ** -(2 ** n_stages)


def _check_y(y):
    if not 0 <= y <= 0.5:
        raise ValueError(f"y = {y} outside [0, 1/2]")


def normalize_input(a, m: int | None = None) -> tuple:
    """(shift, y) with shift = ceil(log2 a) and y = 1 - a / 2^shift.

    ``a`` is normally an integer register value; reals >= 1 are accepted
    for fixed-point inputs.
    """
    if isinstance(a, (int, np.integer)):
        a = int(a)
        if a <= 0:
            raise ValueError("input must be positive")
        shift = (a - 1).bit_length()
    else:
        a = float(a)
        if not a >= 1 or not math.isfinite(a):
            raise ValueError("real inputs must be finite and at least 1")
        mant, exp = math.frexp(a)
        shift = exp - 1 if mant == 0.5 else exp
    if m is not None and a >= 2 ** m:
        raise ValueError(f"{a} does not fit in {m} bits")
    return shift, 1.0 - a / 2 ** shift


def normalization_qubits(m: int) -> int:
    """Qubits needed to hold the shift of an m-bit input."""
    return math.ceil(math.log2(m + 1))
