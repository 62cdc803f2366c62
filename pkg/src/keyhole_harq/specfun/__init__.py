"""Special functions and transform-inversion engines."""

from .bessel import (EULER_GAMMA, bessel_k_int, bessel_k_int_scaled, bessel_k_small_x,
                     log_bessel_k_int)
from .contour import (BromwichSettings, ContourError, ContourSettings, InversionResult,
                      inverse_laplace_cdf, inverse_mellin_cdf, mellin_barnes_G, mellin_barnes_g)
from .gamma import gamma_fn, ln_gamma
from .quadrature import QuadratureError, QuadratureSettings, exp_sinh
from .tricomi import tricomi_u

__all__ = [
    "EULER_GAMMA", "bessel_k_int", "bessel_k_int_scaled", "bessel_k_small_x", "log_bessel_k_int",
    "BromwichSettings", "ContourError", "ContourSettings", "InversionResult",
    "inverse_laplace_cdf", "inverse_mellin_cdf", "mellin_barnes_G", "mellin_barnes_g",
    "gamma_fn", "ln_gamma", "QuadratureError", "QuadratureSettings", "exp_sinh", "tricomi_u",
]
