"""Formation control of pointing directions on the unit sphere.

Simulates the intrinsic closed-loop attitude dynamics whose equilibria
include the vertex configurations of the five Platonic solids, and
certifies their exponential stability via restricted-stability linear
algebra on the pairwise inner-product coordinates.
"""

from .geometry import (
    from_rpy,
    geodesic_angle,
    hat,
    normalize,
    rodrigues,
    rotation_axis,
    spherical_cosine_residual,
    to_rpy,
)
from .polyhedra import (
    SOLIDS,
    SchlafliSolid,
    SymmetrySet,
    cycle_notation,
    derive_symmetries,
    formation_membership,
    make_solid,
    parse_cycles,
    permutation_matrix,
    rotation_group,
)
from .graphs import (
    InterAgentGraph,
    assumption3_graph,
    complete_graph,
    empty_graph,
    enumerate_symmetric_graphs,
    graph_from_edges,
    is_automorphism,
    platonic_graph,
    satisfies_symmetry_assumption,
)
from .dynamics import (
    ASSUMPTION2_GAIN,
    GainFunction,
    SimulationConfig,
    Trajectory,
    body_frame_control,
    closed_loop_rhs,
    control_omega,
    integrate,
    perturbed_state,
    random_state,
)
from .xicoords import (
    XiState,
    equilibrium_xi,
    gram_constraint,
    gram_gradient,
    pair_order,
    redundancy_count,
    xi_dimension,
    xi_s_jacobian,
    xi_s_of_state,
    xi_s_rhs,
    xi_transform,
)
from .stability import (
    StabilityReport,
    algorithm1,
    exponential_stability_lift,
    max_invariant_subspace,
    observability_check,
    restricted_stability_linear,
    theorem2_certificate,
)

__version__ = "0.1.0"
