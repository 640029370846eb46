"""Position sharing for location privacy over non-trusted servers.

Splits a precise position into a public master circle and n refinement
shares of limited precision, distributes them across location servers by
individual trust level, and keeps them updated with as few messages as the
movement allows.
"""

from .csps import InfeasibleMapError, ObfuscationArea, fuse_csps, generate_csps, increase_radius
from .geometry import Circle, Point, Vector, circle_area, contains, distance, intersection_area
from .mapgrid import MapGrid, all_true_grid, load_grid, save_grid
from .metrics import (
    AttackCurve,
    PrivacyRequirement,
    TrustRecord,
    attack_curve,
    attack_probability,
    prob_at_least_k_compromised,
    satisfies,
)
from .osps import fuse_osps, generate_osps
from .placement import (
    Placement,
    PlacementOutcome,
    objective,
    place_exhaustive,
    place_optimized,
    select_and_place,
    uniform_placement,
)
from .shares import CSPS, OSPS, MasterShare, RefinementShare, ShareSet, osps_share_radii
from .sim import (
    LocationServer,
    Trajectory,
    distribute_shares,
    engineered_trajectory,
    lba_query,
    load_trajectory,
    run_placement_experiment,
    run_update_experiment,
)
from .update import (
    MessageLedger,
    UpdateDecision,
    apply_decision,
    decide_update,
    reduction_rate,
    update_shares,
)

__version__ = "0.1.0"
