"""Greatest fixed points of Bellman operators on weighted graphs, computed by
Kleene iteration and by Dijkstra-style freezing, with checks for when the two
agree."""

from .domain import DOMAINS, INF, CarrierViolation, WeightDomain, compare, meet
from .graph import (
    Diagnostic,
    WeightedGraph,
    load_graph,
    predecessors,
    read_graph,
    save_graph,
    successors,
    validate,
    write_graph,
)
from .instances import (
    INSTANCE_IDS,
    InstanceSpec,
    all_instances,
    example_graph,
    instance,
    random_graph,
    random_spp_graph,
)
from .modality import Transition, apply, support
from .solve import (
    Frozen,
    IterationCapped,
    SolveResult,
    Stabilized,
    bellman_apply,
    bellman_power,
    coalg_dijkstra,
    coalg_dijkstra_heap,
    kleene_gfp,
    selective_bellman,
)
from .verify import (
    Witness,
    check_expansive,
    contraction_coalgebra,
    cross_check,
    omega_sigma,
    run_tree_infimum,
)

__version__ = "0.1.0"

__all__ = [
    "DOMAINS", "INF", "CarrierViolation", "WeightDomain", "compare", "meet",
    "Diagnostic", "WeightedGraph", "load_graph", "predecessors", "read_graph", "save_graph",
    "successors", "validate", "write_graph",
    "INSTANCE_IDS", "InstanceSpec", "all_instances", "example_graph", "instance",
    "random_graph", "random_spp_graph",
    "Transition", "apply", "support",
    "Frozen", "IterationCapped", "SolveResult", "Stabilized", "bellman_apply", "bellman_power",
    "coalg_dijkstra", "coalg_dijkstra_heap", "kleene_gfp", "selective_bellman",
    "Witness", "check_expansive", "contraction_coalgebra", "cross_check", "omega_sigma",
    "run_tree_infimum",
]
