"""Approximate products of two rotation angles."""

from __future__ import annotations

import math

from . import expr as E

GAMMA2 = math.asin(1 / math.sqrt(6))
GAMMA3 = math.asin(1 / math.sqrt(15))

_P1, _P2 = E.x(0), E.x(1)


def m4():
    """PAR(phi1, phi2): product with O(x^4) error."""
    return E.PAR(_P1, _P2)


def _shift_m6():
    # pi/4 - GB(g2, phi1) - GB(g2, phi2); tan(f + pi/4) = 1 + 2f + O(f^2)
    return [E.Const(math.pi / 4), E.Neg(E.GB(E.Const(GAMMA2), _P1)),
            E.Neg(E.GB(E.Const(GAMMA2), _P2))]


def m6():
    """Sixth-order product: the third PAR input cancels the x^4 terms."""
    return E.PAR(_P1, _P2, E.Sum(*_shift_m6()))


def m8():
    """Eighth-order product with a single shifted third PAR input.

    The shift collects the sixth-order corrections
    -GB(g3, GB(phi1)) - GB(g3, GB(phi2)) + GB(g2, phi1, phi2).
    """
    extra = [E.Neg(E.GB(E.Const(GAMMA3), E.GB(_P1))),
             E.Neg(E.GB(E.Const(GAMMA3), E.GB(_P2))),
             E.GB(E.Const(GAMMA2), _P1, _P2)]
    return E.PAR(_P1, _P2, E.Sum(*_shift_m6(), *extra))


def m8_printed():
    """Four-input variant with a separate pi/4-shifted fourth argument.

    Kept for comparison; it is only fourth-order accurate.
    """
    fourth = E.Sum(E.Const(math.pi / 4), E.Neg(E.GB(E.Const(GAMMA3), _P1)),
                   E.Neg(E.GB(E.Const(GAMMA3), _P2)), E.GB(E.Const(GAMMA2), _P1, _P2))
    return E.PAR(_P1, _P2, E.Sum(*_shift_m6()), fourth)


MULTIPLIERS = {"m4": m4, "m6": m6, "m8": m8, "m8_printed": m8_printed}


def multiplier(name: str):
    try:
        return MULTIPLIERS[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown multiplier {name!r}; choose from {sorted(MULTIPLIERS)}") from None


def big_angle_product(phi1: float, phi2: float, regime: str, inner=None) -> float:
    """Product of angles near 1 via a small-angle multiplier.

    ``both_near_one``: phi1 phi2 = -1 + phi1 + phi2 + M(1 - phi1, 1 - phi2).
    ``mixed`` (phi1 small, phi2 near 1): phi1 phi2 = phi1 - M(phi1, 1 - phi2).
    """
    inner = inner or m4()
    if regime == "both_near_one":
        return -1 + phi1 + phi2 + E.eval_angle(inner, [1 - phi1, 1 - phi2])
    if regime == "mixed":
        return phi1 - E.eval_angle(inner, [phi1, 1 - phi2])
    raise ValueError(f"unknown regime {regime!r}")


def big_angle_expr(regime: str, inner=None):
    """Expression form of ``big_angle_product`` for execution and costing."""
    inner = inner or m4()
    sub = {"both_near_one": (E.Affine(0, -1.0, 1.0), E.Affine(1, -1.0, 1.0)),
           "mixed": (E.x(0), E.Affine(1, -1.0, 1.0))}
    if regime not in sub:
        raise ValueError(f"unknown regime {regime!r}")
    m = _substitute(inner, sub[regime])
    if regime == "both_near_one":
        return E.Sum(E.Const(-1.0), E.x(0), E.x(1), m)
    return E.Sum(E.x(0), E.Neg(m))


def _substitute(expr, leaves):
    """Replace input i by the expression leaves[i] (affine leaves only)."""
    if isinstance(expr, E.Const):
        return expr
    if isinstance(expr, E.Affine):
        new = leaves[expr.index]
        return E.Affine(new.index, expr.scale * new.scale, expr.scale * new.offset + expr.offset)
    if isinstance(expr, E.Neg):
        return E.Neg(_substitute(expr.child, leaves))
    return type(expr)(*[_substitute(c, leaves) for c in expr.children])
