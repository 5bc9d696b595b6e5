"""Hyperbolic pentagon tilings of the half-plane and their dynamical invariants.

Subpackages cover exact half-plane geometry (dyadic coordinates), the
2-adic odometer, substitution subshifts with exact cylinder measures,
finitely presented (co)invariant groups, and a sampled model of the
continuous hull with Monte-Carlo measure checks.
"""

__version__ = "0.1.0"
