"""Wasserstein distances, optimal matchings and geodesics for persistence
diagrams whose points live in a metric pair ``(X, d, A)``."""

from .analysis import (CIRCLES_LIMIT, DiagnosticsReport, NoncompactnessWitness, ScaleReport,
                       SymmetricTuple, circles_partial, circles_point, circles_truncation,
                       diagnose_set, embed_symmetric, local_noncompactness_witnesses,
                       noncompactness_family, non_length_space, symmetric_dist)
from .diagram import (Diagram, EssentialWitness, TruncatedDiagram, add,
                      check_essentially_p_finite, diagram_from_json, diagram_to_json,
                      lower_part, persistence_norm, upper_part)
from .errors import CapabilityError, PDSpaceError, SpaceMismatchError, ValidationError
from .geodesic import (ConcatenatedPath, GeodesicPath, MatchedPath, Track, alexandrov_residual,
                       distinct_geodesics, geodesic, path_from_matching, path_length,
                       retract_diagram, sequential_path, straight_line_contraction)
from .kernels import BACKEND
from .matching import (Matching, WassersteinResult, card_mismatch_lower_bound, cost_p,
                       enumerate_matchings, identity_matching, infimum_gap_demo,
                       matching_from_json, matching_to_json, result_to_json, wasserstein,
                       wasserstein_bruteforce, wasserstein_truncated)
from .spaces import (INF, A, CustomMetricPair, HalfPlane, MetricPair, PointedEuclidean,
                     QuotientGround, Ray, WedgeCircles, WedgeIntervals, dist_to_A, in_offset,
                     make_space, parse_p, pnorm, project_to_A, quotient_dist, register_space)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
