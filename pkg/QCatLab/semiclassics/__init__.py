"""Semiclassical (large j) description of the coherence decay of cat states"""
from .action import (ReducedPoint, SaddleData, action_s0, action_gradient, action_hessian,
                     action_derivatives, saddle_point, maximize_action)
from .coefficients import (CoefficientExpansion, coeff_expansion, s_derivative_coeffs, a0_field,
                           a1_field, b0_field, b1_field, b2_field, w_field)
from .laplace import (LaplaceExpansion, LaplaceEngine, RatioCoefficients, laplace_expand,
                      quadrature_oracle, lattice_ratio, ratio_coefficients, n_ratio_semiclassical)
from .predictions import (predict_fast, predict_slow_exp, predict_slow_poly,
                          predict_single_coherent, fast_rate_coefficient, semiclassical_report)
