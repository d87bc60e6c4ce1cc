"""Tent map with memory G(x, y) = (y, tent(alpha*y + (1-alpha)*x)) on the unit square."""

from .cones import ConeConstants, Past, cone_constants, stable_direction, stretch_rates, unstable_direction
from .core import MapParams, Point2, itinerary, orbit, step
from .errors import (
    AdmissibilityError, DegenerateInputError, DomainError, InconclusiveError, MemtentError, ParameterError,
    RegimeError, SingularityError,
)
from .geometry import ConvexPolygon, DirectedSegment
from .measure import (
    BirkhoffResult, EmpiricalMeasure2D, Observable, attractor_histogram, birkhoff_average,
    conditional_uniformity_probe, pushforward_unstable_segment, srb_consistency,
)
from .partition import (
    RefinedCell, StableFiber, forward_image_polygons, gamma_n, in_stable_core, partition_polygons,
    refine_unstable_segment, xi_fiber,
)
from .verify import VerificationReport, verification_suite

__version__ = "0.1.0"
