"""nearcrit: build, dissect and statistically verify near-critical random-graph giants."""

from ._core import backend_name
from .analytic import (
    ModelParams,
    RootedTree,
    borel_pmf,
    conjugate_mu,
    sample_geometric,
    sample_normal,
    sample_pgw_tree,
    sample_poisson,
    theta_lambda,
)
from .cola import LambdaCell, generate_cell, lambda_c_invariance_check, run_cola
from .decompose import (
    CoreDecomposition,
    contract_to_kernel,
    decompose,
    extract_bushes,
    strip_disjoint_cycles,
    two_core,
)
from .harness import (
    ExperimentConfig,
    ModelSpec,
    chi_square_gof,
    ks_two_sample,
    run_experiment,
)
from .models import (
    ModelKind,
    sample,
    sample_c1_general,
    sample_c1_simple,
    sample_gnp,
    sample_poisson_cloning,
    sample_poisson_configuration,
    sample_poisson_geometric,
)
from .multigraph import (
    Multigraph,
    bfs_distances,
    configuration_match,
    connected_components,
    deserialize,
    largest_component,
    serialize,
)
from .observables import (
    ObservableRecord,
    cycle_census,
    diameter,
    isoperimetric_number,
    kernel_max_distance,
    max_two_path,
    mixing_time_exact,
    typical_kernel_distance,
)

__version__ = "0.1.0"
