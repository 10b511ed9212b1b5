"""Exact suspension flows of the rotation by [0; a, a, a, ...].

The rotation number alpha solves alpha^2 + a*alpha = 1, all quantities live
in Q(alpha) and every comparison is exact.  Submodules:

field       exact arithmetic in Q(alpha), circle reduction
tower       convergents, closest returns, Rokhlin towers
returntime  the bump functions, layers T_n and the truncated return time
birkhoff    Birkhoff sums, naive and in O(depth) via tower coordinates
verify      certified separation checks
flow        the suspension flow and the expansiveness probe
"""

from .field import (
    InvalidParameter,
    ParameterMismatch,
    QuadElem,
    RotationParams,
    circle_dist,
    circle_norm,
    circle_reduce,
    make_params,
    quad_arith,
    quad_floor,
    quad_sign,
)
from .tower import (
    GuardExceeded,
    closest_return_verify,
    convergents,
    interval_In,
    interval_Jn,
    ostrowski,
    rotate,
    tower_coords,
    tower_partition,
)
from .returntime import (
    PLFunction,
    TowerFunction,
    build_T,
    build_Tn,
    chi,
    eval_fn,
    layer,
    positivize,
    tail_bound,
    truncated_T,
)
from .birkhoff import birkhoff, birkhoff_fast, birkhoff_naive, birkhoff_report, make_context
from .verify import (
    check_c5,
    check_p2,
    check_p3,
    check_p4,
    check_p6,
    check_p7,
    lemma1_scan,
    main_separation,
    separation_certificate,
)
from .flow import MappingTorusPoint, expansiveness_probe, flow, normalize, quotient_dist

__version__ = "0.1.0"
