"""Function synthesis with gearbox and PAR circuits."""

from .expr import (GB, PAR, Affine, Const, ExprParseError, Neg, Sum, eval_angle, eval_vec,
                   leaf_count, parse_expr, to_prefix, x)
from .execute import rotation_angle, run_expr
from .multiply import big_angle_expr, big_angle_product, m4, m6, m8, m8_printed, multiplier
from .reciprocal import (PolynomialApprox, assemble_r2, binomial_bound, binomial_error,
                         binomial_product, binomial_reciprocal_value, chebyshev_reciprocal,
                         chebyshev_truncation, max_error, normalize_input, squaring_identity)
from .series import Series, series_of
from .sqwave import (SingularFitError, SquareWaveFit, SquareWaveRegressor, gb_iterate,
                     square_wave_eval, square_wave_expr_term, square_wave_fit)
from .taylor import monomial_expr, sliced_monomial_value, taylor_generate
