"""Reduced discriminant contours, chambers and zero-set topology for real exponential sums."""
__version__ = "0.1.0"

from .chambers import chamber_bound, count_chambers, isotopy_bound, korben_bound, steiner_regions
from .completion import completed_signed_contour, facet_lines
from .contour import Sampling, find_cusps, trace_contour, trace_signed_contour
from .estimator import ChamberClassifier, DiscriminantContour
from .parametrization import circuit_membership_test, lift_reduced, psi, reduce_coefficients, xi
from .spectrum import Spectrum, analyze, basis_for, nullspace_basis
from .zeroset import ExpSum, chamber_constancy_check, topology_signature, univariate_root_count

__all__ = [
    "ChamberClassifier",
    "DiscriminantContour",
    "ExpSum",
    "Sampling",
    "Spectrum",
    "analyze",
    "basis_for",
    "chamber_bound",
    "chamber_constancy_check",
    "circuit_membership_test",
    "completed_signed_contour",
    "count_chambers",
    "facet_lines",
    "find_cusps",
    "isotopy_bound",
    "korben_bound",
    "lift_reduced",
    "nullspace_basis",
    "psi",
    "reduce_coefficients",
    "steiner_regions",
    "topology_signature",
    "trace_contour",
    "trace_signed_contour",
    "univariate_root_count",
    "xi",
]
