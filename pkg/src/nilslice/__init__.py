"""Exact and numeric verification of transverse slices to sub-regular-type
nilpotent orbits in sp(2m), so(2m) and so(2m+1)."""

from .kernel import GaussianRational, NilsliceError, Poly, roots
from .liealg import AlgebraKind, GMatrix, RootLabel
from .slices import OrbitIndex, SliceCoords, slice_point, valid_indices
from .spectra import SpectralClass, closed_form_polys, spectral_class_of

__version__ = "0.1.0"

__all__ = [
    "AlgebraKind",
    "GMatrix",
    "GaussianRational",
    "NilsliceError",
    "OrbitIndex",
    "Poly",
    "RootLabel",
    "SliceCoords",
    "SpectralClass",
    "closed_form_polys",
    "roots",
    "slice_point",
    "spectral_class_of",
    "valid_indices",
]
