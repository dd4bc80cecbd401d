"""Ball Mapper: epsilon-net covers of finite metric spaces and their nerve graphs."""

from ballmapper.analyze import (
    DegreeSweep,
    TrustBand,
    average_degree,
    degree_profile,
    dimension_sweep,
    hausdorff_trust_band,
    merge_radius,
    plateau_degree,
    suggest_density_threshold,
    trust_band,
)
from ballmapper.cover import (
    CoverVector,
    NetParams,
    build_net,
    cover_from_centers,
    greedy_epsilon_net,
    kmeans_centers,
    maxmin_epsilon_net,
    recover,
)
from ballmapper.exceptions import (
    BallMapperError,
    ConfigError,
    CoverGuardError,
    DataError,
    DimensionMismatchError,
    FormatError,
    InvariantViolation,
    MetricError,
    UncoveredPointError,
)
from ballmapper.metric import MetricSpec, PointCloud, distance, pairwise_distances
from ballmapper.multiscale import (
    MultiScaleBM,
    check_inclusions,
    interleaving_h0_check,
    multiscale_bm,
    rips_components,
    single_linkage_components,
)
from ballmapper.nerve import (
    BMGraph,
    Edge,
    NerveComplex,
    Vertex,
    VertexColoring,
    build_bm_graph,
    build_nerve,
    connected_components,
    cycle_rank,
    filter_low_density,
    vertex_coloring,
)

__version__ = "0.1.0"

__all__ = [
    "BMGraph",
    "BallMapperError",
    "ConfigError",
    "CoverGuardError",
    "CoverVector",
    "DataError",
    "DegreeSweep",
    "DimensionMismatchError",
    "Edge",
    "FormatError",
    "InvariantViolation",
    "MetricError",
    "MetricSpec",
    "MultiScaleBM",
    "NerveComplex",
    "NetParams",
    "PointCloud",
    "TrustBand",
    "UncoveredPointError",
    "Vertex",
    "VertexColoring",
    "average_degree",
    "build_bm_graph",
    "build_nerve",
    "build_net",
    "check_inclusions",
    "connected_components",
    "cover_from_centers",
    "cycle_rank",
    "degree_profile",
    "dimension_sweep",
    "distance",
    "filter_low_density",
    "greedy_epsilon_net",
    "hausdorff_trust_band",
    "interleaving_h0_check",
    "kmeans_centers",
    "maxmin_epsilon_net",
    "merge_radius",
    "multiscale_bm",
    "pairwise_distances",
    "plateau_degree",
    "recover",
    "rips_components",
    "suggest_density_threshold",
    "trust_band",
    "vertex_coloring",
]
