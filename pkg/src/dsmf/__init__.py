"""Distributed set-membership filtering over sensor networks.

The package covers the full pipeline: bounded-set arithmetic on
constrained zonotopes, communication-topology analysis, ground-truth
simulation with bounded noise, the synchronized predict/update/fuse
filter, boundedness certificates for the network, and sampling verifiers
for the reachability outer bounds the filter is guaranteed to respect.
"""

from .analysis import (
    BoundCheckReport,
    boundedness_diagnostic,
    coit_membership,
    obs_info_membership,
    state_evo_membership,
    state_evolution_set,
    unobs_residual_set,
    verify_decomposition_bound,
    verify_intersection_bound,
)
from .certify import (
    CertificateReport,
    certify_network,
    check_collective_detectability,
    check_theorem1,
)
from .decomp import (
    ObservabilityDecomposition,
    SpectralReport,
    matrix_rank,
    observability_decomposition,
    observability_index,
    spectrum,
)
from .errors import (
    CertificationError,
    DimensionMismatchError,
    EmptyBeliefError,
    EmptySetError,
    LPConditioningError,
    OracleCapError,
    ScenarioError,
)
from .filtering import (
    BeliefHistory,
    fuse,
    local_update,
    predict,
    run_dsmf,
)
from .graph import (
    SensorGraph,
    SourceComponent,
    coit_window,
    eccentricity,
    fusion_neighborhood,
    m_set,
    predecessor_hops,
    source_components,
)
from .scenario import (
    load_bundled,
    load_scenario,
    loads_scenario,
    save_scenario,
    scenario_to_dict,
)
from .setops import (
    Box,
    ConstrainedZonotope,
    Strip,
    cz_contains_point,
    cz_diameter_bounds,
    cz_intersect,
    cz_intersect_strip,
    cz_interval_hull,
    cz_is_empty,
    cz_linear_map,
    cz_minkowski_sum,
    cz_reduce,
    cz_sample_point,
    cz_sample_points,
    lp_feasible,
    lp_optimize,
)
from .sysmodel import (
    PlantModel,
    Scenario,
    SensorModel,
    Tolerances,
    Trajectory,
    joint_measurement_matrix,
    simulate_truth,
)

__version__ = "0.1.0"
