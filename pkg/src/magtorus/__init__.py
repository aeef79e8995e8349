"""magtorus: critical submanifolds of ordered eigenvalues on the torus of
magnetic perturbations of a graph-supported real symmetric matrix.

Workflow at a glance: build a `Graph` and a `BaseMatrix` strictly supported
on it; `enumerate_critical_data` lists every (admissible support, signing of
the support block, eigenvalue label) datum; `build_manifold` turns a datum
into the critical submanifold (nonemptiness via boundary linkages, dimension,
component count, sampled points with Morse data); `oracles` provides the
finite-difference and grid-search ground truth.
"""

from .errors import (
    DegenerateLinkageError,
    EmptyLinkageError,
    GenericityError,
    GraphError,
    HypothesisError,
    MagtorusError,
    MultipleEigenvalueError,
    NonCriticalPointError,
    NotHermitianError,
    ResidualResonanceError,
    SamplingExhaustedError,
    SpectralClashError,
    StrictSupportError,
    SupportError,
    VerificationError,
)
from .graphs import (
    Graph,
    InducedSubgraph,
    SupportPartition,
    betti,
    enumerate_admissible_supports,
    fundamental_cycles,
    graph_from_json,
    induced_subgraph,
    is_admissible_support,
    partition_for_support,
    spanning_tree_count,
    supports_3regular,
    whole_graph_partition,
)
from .linalg import (
    EigenSystem,
    Inertia,
    eig_herm,
    haynsworth_inertia,
    herm_from_json,
    herm_to_json,
    inertia,
    pseudoinverse,
    real_part_form_inertia,
    spectral_shift_compression,
)
from .linkage import (
    LinkagePoint,
    LinkageSpec,
    classify,
    is_generic,
    mc_nonempty,
    sample_points,
    solve_triangle,
)
from .magnetic import (
    BaseMatrix,
    MagneticPoint,
    OneForm,
    Signing,
    assemble,
    coboundary,
    convert_point,
    cycle_basis_hessian,
    enumerate_signings,
    gauge_reduce,
    gradient,
    hessian,
    is_critical,
    nodal_count,
    nodal_surplus,
    normalized_cycle_hessian,
    torus_distance,
    zero_point,
)
from .atlas import (
    CriticalData,
    ManifoldReport,
    build_atlas,
    build_manifold,
    check_genericity,
    classify_extremum,
    construct_existence_instance,
    count_3regular_points,
    enumerate_critical_data,
    match_point,
    stability_probe,
)
from .oracles import (
    exhaustive_small_verify,
    fd_gradient,
    fd_hessian,
    fd_index,
    grid_search_critical,
)
from .experiments import (
    BandReport,
    SurplusDistribution,
    band_edges,
    cp_census,
    ks_normal_distance,
    ks_report,
    random_3regular,
    surplus_sweep,
)

__version__ = "0.1.0"
