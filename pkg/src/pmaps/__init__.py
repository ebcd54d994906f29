"""Periodic orbits and periodic-measure approximation for piecewise monotonic interval maps."""

from pmaps.errors import *  # noqa: F401,F403
from pmaps.kernels import BACKEND as KERNEL_BACKEND
from pmaps.maps import (
    EPS_CRIT,
    BranchSpec,
    Interval,
    OrbitTrace,
    PiecewiseMonotonicMap,
    RationalPoints,
    affine,
    general,
)
from pmaps.mapspec import load_map_spec, parse_map_spec
from pmaps.measure import (
    CylinderPartition,
    DiscreteMeasure,
    EntropyEstimate,
    block_entropy,
    conditional_information,
    cylinder_discrepancy,
    empirical_measure,
    lyapunov_entropy,
    w1_distance,
)
from pmaps.periodic import PeriodicOrbit, find_periodic_point, minimal_period, periodic_measure
from pmaps.symbolic import (
    Cylinder,
    cylinder_of_point,
    cylinder_of_word,
    enumerate_cylinders,
    shrinking_report,
)
from pmaps.tower import (
    CoveringScan,
    CoveringTime,
    TowerTracker,
    advance,
    boundary_critical_times,
    covering_times,
    cut_times,
    init_tracker,
    track,
)
from pmaps.zoo import ZOO, zoo_map

__version__ = "0.1.0"
