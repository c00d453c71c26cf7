"""Twisted group algebras of Z^d and their Lip seminorms."""
from __future__ import annotations

from .algebra import (GOLDEN, AlgebraElement, Cocycle, X_sigma, dual_action, fourier_sup, involution,
                      random_element, twisted_convolve)
from .analysis import delta_for, holder_check, modulus_bounds, order_norm_bound, radius_probe
from .opnorm import op_norm, power_iteration
from .seminorms import (L_ell, a_norm, df_norm, dual_ball_functionals, k_constants,
                        main_inequality_check, truncated_pi)
