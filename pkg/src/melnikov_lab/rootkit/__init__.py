"""Root counting, zero isolation and Wronskian certification."""
from .polynomial import (RationalPolynomial, RootRegion, family_discriminant, lagrange_interpolate,
                         parametric_root_regions, resultant, to_fraction)
from .zeros import Zero, ZeroReport, isolate_zeros
from .wronskian import wronskians

__all__ = [
    "RationalPolynomial", "RootRegion", "family_discriminant", "lagrange_interpolate",
    "parametric_root_regions", "resultant", "to_fraction", "Zero", "ZeroReport",
    "isolate_zeros", "wronskians",
]
