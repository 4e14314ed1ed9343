"""Display graphs of phylogenetic trees and networks: treewidth bounds and
certificates, tree containment, and recognition."""

from .bramble import Bramble, is_hitting_set, min_hitting_set, tw_lower_bound, verify_bramble
from .constructions import (
    GridParams,
    grid_bramble,
    grid_display_graph,
    grid_embedding,
    grid_hitting_set_names,
    grid_network,
    grid_path_decomposition,
    grid_suppressed_display_graph,
    grid_tree,
)
from .core import (
    DisplayGraph,
    LabeledGraph,
    PhyloNetwork,
    PhyloTree,
    biconnected_components,
    build_display_graph,
    level,
    reticulation_number,
    suppress,
)
from .display import (
    EmbeddingCertificate,
    Quartet,
    displays_via_quartets,
    find_display,
    labeled_tree_isomorphic,
    quartet_set,
    restrict_and_suppress,
    verify_embedding,
)
from .errors import *  # noqa: F403
from .formats import (
    FileFormat,
    parse_network_edgelist,
    parse_newick,
    read_gr,
    read_td,
    write_gr,
    write_network_edgelist,
    write_newick,
    write_td,
)
from .recognition import is_display_graph, reconstruct_trees, tree_arboricity_two
from .report import ValidityReport, Violation
from .transforms import BoundBundle, bound_bundle, lemma2_transform, lemma3_transform
from .treewidth import (
    TreeDecomposition,
    exact_treewidth,
    heuristic_ub,
    lower_bound_mmd,
    validate_decomposition,
)

__version__ = "0.1.0"
