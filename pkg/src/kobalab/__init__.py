"""kobalab: a numerical laboratory for the invariant-metric geometry of
convex domains in C^d -- boundary gaps and two-sided metric bounds, distance
and geodesic estimation, hyperbolicity statistics, holomorphic iteration
experiments, and end-versus-ray boundary correspondence checks.
"""

from .config import SolverConfig, DEFAULT_CONFIG
from .domains import (Ball, Polydisc, LeftHalfSpaces, ProductWithPlane,
                      HalfSpaceIntersection, Strip, NormCone, Siegel,
                      RecessionReport, EndClassification,
                      contains, recession_directions, classify_ends,
                      is_c_proper, domain_from_json, load_domain)
from .metric import (MetricBound, PolylinePath, DistanceEstimate,
                     delta, infinitesimal_bounds, exact_infinitesimal,
                     path_length, distance, geodesic, ray)

__all__ = [
    "SolverConfig", "DEFAULT_CONFIG",
    "Ball", "Polydisc", "LeftHalfSpaces", "ProductWithPlane",
    "HalfSpaceIntersection", "Strip", "NormCone", "Siegel",
    "RecessionReport", "EndClassification",
    "contains", "recession_directions", "classify_ends", "is_c_proper",
    "domain_from_json", "load_domain",
    "MetricBound", "PolylinePath", "DistanceEstimate",
    "delta", "infinitesimal_bounds", "exact_infinitesimal",
    "path_length", "distance", "geodesic", "ray",
]

__version__ = "0.1.0"
