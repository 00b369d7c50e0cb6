"""Numerical laboratory for Schrodinger maximal functions.

Periodic-grid Fourier transforms, the evolution ``S_t f`` with dispersion
``|xi|^a``, Sobolev norms, anisotropic covering numbers of space-time sets,
and maximal functions over sampled sets, plus a harness that checks the
associated L2 inequalities.
"""

from schromax.grid import (
    GridFunction,
    GridSpec,
    SpectralFunction,
    from_spectrum,
    l2_norm,
    to_spectrum,
)
from schromax.propagator import (
    DyadicDecomposition,
    PropagatorParams,
    band_limit,
    dyadic_split,
    propagate,
    sobolev_norm,
)

__version__ = "0.1.0"

__all__ = [
    "DyadicDecomposition",
    "GridFunction",
    "GridSpec",
    "PropagatorParams",
    "SpectralFunction",
    "band_limit",
    "dyadic_split",
    "from_spectrum",
    "l2_norm",
    "propagate",
    "sobolev_norm",
    "to_spectrum",
]
