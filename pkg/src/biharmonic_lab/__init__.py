"""Tension and bitension of maps between surfaces, with a catalog of known families."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (BiharmonicError, DomainError, EmptyDomain, EmptyGrid, OrderUnavailable,
                     ParameterError, PrecisionLoss, SingularMetric, UnknownFamily, UnsupportedForm)
from .fields import Rect, ScalarField2, as_field
from .geometry import christoffel, conformal, curvature, gauss_curvature, general, warped
from .map_calculus import (SmoothMap2, biharmonic_residual, bitension_conformal, bitension_general,
                           tension_conformal, tension_general, wirtinger_jet)
from .policy import DEFAULT_TOLERANCES, Tolerances, Verdict
from .catalog import CATALOG, get_entry, list_entries
from .harness import GridSpec, classify, classify_entry, cross_check, parameter_scan

__all__ = [
    "__version__",
    "BiharmonicError", "DomainError", "EmptyDomain", "EmptyGrid", "OrderUnavailable",
    "ParameterError", "PrecisionLoss", "SingularMetric", "UnknownFamily", "UnsupportedForm",
    "Rect", "ScalarField2", "as_field",
    "christoffel", "conformal", "curvature", "gauss_curvature", "general", "warped",
    "SmoothMap2", "biharmonic_residual", "bitension_conformal", "bitension_general",
    "tension_conformal", "tension_general", "wirtinger_jet",
    "DEFAULT_TOLERANCES", "Tolerances", "Verdict",
    "CATALOG", "get_entry", "list_entries",
    "GridSpec", "classify", "classify_entry", "cross_check", "parameter_scan",
]
