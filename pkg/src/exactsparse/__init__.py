"""Exact cut and flow sparsifiers with exact-arithmetic verification oracles.

The main entry points:

* :func:`sparsify_cut_contraction` / :func:`sparsify_flow_contraction` for
  quasi-bipartite networks, and :class:`ContractionSparsifier` as an
  estimator;
* :func:`sparsify_vertex_cover` and :func:`sparsify_vertex_integrity` for
  networks with a small cover or small components around a separator;
* :func:`reduce` for networks with a tree decomposition;
* :func:`verify_cut_sparsifier` and :func:`verify_flow_sparsifier`, the
  exact oracles every construction is checked against.
"""

from .bipartite import (
    BasicStarSparsifier,
    ContractionSparsifier,
    bucket_stars,
    class_count_report,
    decompose_quasi_bipartite,
    sparsify_cut_contraction,
    sparsify_flow_contraction,
)
from .cones import (
    ConicDecomposition,
    GuardrailError,
    Ray,
    build_basic_star_sparsifier,
    caratheodory_decompose,
    enumerate_basic_stars,
)
from .extensions import (
    ComponentSignature,
    SeparatorInstance,
    VertexCoverSparsifier,
    VertexIntegritySparsifier,
    component_conic_decompose,
    component_signature,
    greedy_vertex_cover,
    sparsify_vertex_cover,
    sparsify_vertex_integrity,
)
from .mcf import Demand, flow_factor, star_flow_factor, verify_flow_sparsifier
from .mincut import (
    INFINITE,
    CutOracle,
    MinCutResult,
    check_equiv_merge_precondition,
    check_merge_precondition,
    min_cut,
    verify_cut_sparsifier,
)
from .network import Network, contract, contract_many, cut_capacity, induced_subgraph, steiner_disjoint_union
from .signatures import CutSignature, StrongSignature, cut_signature, strong_signature
from .splitting import split_demand
from .treewidth import (
    RegionPartition,
    TreeDecomposition,
    TreewidthReducer,
    build_y_set,
    partition_regions,
    reduce,
)

__version__ = "0.1.0"

__all__ = [
    "BasicStarSparsifier",
    "ComponentSignature",
    "ConicDecomposition",
    "ContractionSparsifier",
    "CutOracle",
    "CutSignature",
    "Demand",
    "GuardrailError",
    "INFINITE",
    "MinCutResult",
    "Network",
    "Ray",
    "RegionPartition",
    "SeparatorInstance",
    "StrongSignature",
    "TreeDecomposition",
    "TreewidthReducer",
    "VertexCoverSparsifier",
    "VertexIntegritySparsifier",
    "bucket_stars",
    "build_basic_star_sparsifier",
    "build_y_set",
    "caratheodory_decompose",
    "check_equiv_merge_precondition",
    "check_merge_precondition",
    "class_count_report",
    "component_conic_decompose",
    "component_signature",
    "contract",
    "contract_many",
    "cut_capacity",
    "cut_signature",
    "decompose_quasi_bipartite",
    "enumerate_basic_stars",
    "flow_factor",
    "greedy_vertex_cover",
    "induced_subgraph",
    "min_cut",
    "partition_regions",
    "reduce",
    "sparsify_cut_contraction",
    "sparsify_flow_contraction",
    "sparsify_vertex_cover",
    "sparsify_vertex_integrity",
    "split_demand",
    "star_flow_factor",
    "steiner_disjoint_union",
    "strong_signature",
    "verify_cut_sparsifier",
    "verify_flow_sparsifier",
]
