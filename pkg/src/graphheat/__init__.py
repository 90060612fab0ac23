"""Heat content of metric graphs with Dirichlet vertices."""

from .graph import (
    Edge,
    GraphPoint,
    InvalidGraph,
    MetricGraph,
    RegionSpec,
    ValidationReport,
    VertexKind,
    add_dirichlet,
    attach_pendant,
    degree,
    dirichlet_cut,
    figure_eight,
    interval,
    is_isomorphic,
    lasso,
    lengthen_edge,
    load_graph,
    loads_graph,
    midpoint_loop_cut,
    mirror,
    pumpkin_chain,
    save_graph,
    dumps_graph,
    scale,
    shortest_distance,
    star,
    subdivide,
    suppress_degree_two,
    validate,
)
from .heat import (
    EvalConfig,
    HeatValue,
    boundary_flux,
    edge_pair_mass,
    hadamard_derivative,
    heat_content,
    heat_content_intermediate,
    heat_content_nt,
    heat_content_remainder,
    heat_kernel,
    small_time_bound,
)
from .paths import Bond, BudgetExceeded, DirectedPath, PathClass, beta, enumerate_paths, extensions, reverse, scattering_coefficient
from .special import H, erfc, path_tail_bound

__version__ = "0.1.0"
