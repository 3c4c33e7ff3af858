"""Published reference values used by the reproduction reports.

Values are kept as strings so the number of printed digits is known.
"""

from __future__ import annotations

import math
from decimal import Decimal

MULT_ERROR_X = ("0.01", "0.05", "0.10", "0.5", "1.0")
MULT_ERRORS = {
    "m4": ("6.7e-9", "4.2e-7", "6.7e-5", "4.0e-2", "0.18"),
    "m6": ("6.6e-14", "1.0e-9", "6.6e-8", "9.4e-4", "0.054"),
    "m8": ("5.5e-17", "2.2e-11", "5.5e-9", "1.9e-3", "0.088"),
}

CHEB_MAX_ERRORS = {2: "1.6e-2", 4: "5.1e-4", 6: "1.2e-5"}

BITS = (2, 4, 8, 16)

# (tcount, qubits) per bit width
MULTIPLIER_COSTS = {
    "carry_ripple": (("2.34e2", 4), ("7.84e2", 8), ("2.80e3", 16), ("1.06e4", 32)),
    "table_lookup_mult": (("3.38e3", 3), ("3.26e6", 3), ("3.98e9", 3), ("1.13e13", 3)),
    "m4": (("6.11e1", 3), ("1.97e3", 4), ("4.64e4", 4), ("3.00e7", 4)),
    "m6": (("7.71e2", 4), ("1.67e3", 4), ("3.82e3", 4), ("5.21e5", 5)),
}

RECIPROCAL_COSTS = {
    "euclid": (("1.51e4", 12), ("6.05e4", 23), ("2.42e5", 44), ("9.68e5", 85)),
    "newton": (("1.92e3", 17), ("6.21e3", 73), ("2.17e4", 229), ("8.05e4", 625)),
    "table_lookup_recip": (("1.40e2", 3), ("8.38e3", 3), ("7.05e5", 3), ("8.98e8", 3)),
    "r2": (("3.17e3", 6), ("1.53e5", 6), None, None),
}

# mean rotation counts of the multipliers at small inputs
MULT_ROTATIONS = {"m4": 2.0, "m6": 40.0, "m8": 120.0}

SQWAVE_ERRORS = {"max": 0.021, "mean": 0.0036}


def last_digit_unit(printed: str) -> float:
    """Value of one unit in the last printed digit of ``printed``."""
    exp = Decimal(printed).as_tuple().exponent
    return 10.0 ** exp


def matches(computed: float, printed: str) -> bool:
    """Within one unit of the last printed digit."""
    return abs(computed - float(printed)) < last_digit_unit(printed) * (1 + 1e-9)


def rounds_to(computed: float, printed: str) -> bool:
    """Rounding ``computed`` to the printed digits gives ``printed``."""
    unit = last_digit_unit(printed)
    return math.isclose(round(computed / unit) * unit, float(printed), rel_tol=1e-9)


def within_rel(computed: float, printed: str, rel: float) -> bool:
    return abs(computed - float(printed)) <= rel * abs(float(printed))


def within_factor(computed: float, reference: float, factor: float) -> bool:
    return reference / factor <= computed <= reference * factor
