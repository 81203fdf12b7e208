"""Numerical workbench for harmonic analysis on the Boolean cube.

Walsh expansions, dyadic martingales (maximal and square functions,
stopping-time blocks), Khintchine constants for Rademacher sums, Gaussian
moments, lacunary polynomials on the circle, and l_inf -> l_1 / Grothendieck
experiments for real matrices.
"""

from .cube import (
    CubeFunction,
    constant,
    inner_product,
    lp_norm,
    lp_quantity,
    make_function,
    rademacher,
)
from .walsh import WalshSpectrum, analyze, rademacher_span, synthesize, walsh_function

__version__ = "0.1.0"

__all__ = [
    "CubeFunction",
    "WalshSpectrum",
    "analyze",
    "constant",
    "inner_product",
    "lp_norm",
    "lp_quantity",
    "make_function",
    "rademacher",
    "rademacher_span",
    "synthesize",
    "walsh_function",
]
