"""One-dimensional charge transport in high-permittivity nanopores.

Exact Hopf--Cole series and zero-diffusivity solutions for a single species,
and an explicit finite-volume solver for several species.
"""

__version__ = "0.1.0"
