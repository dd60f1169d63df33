"""IOD graphs: input/output directed graphs, their informativeness, and crossover between them."""

from .analysis import (
    ActionabilityLevel,
    InformativenessLevel,
    actionability,
    classify,
    informativeness,
    no_dangling_nodes,
)
from .crossover import (
    CrossoverMembrane,
    CrossoverRecord,
    MatchingSpec,
    PartitionStrategy,
    build_crossover_membrane,
    crossover_child,
    crossover_compatible,
    enumerate_crossover_membranes,
    replay,
)
from .errors import (
    BudgetExceededError,
    GraphFormatError,
    IncompatibleError,
    InfeasibleMatchingError,
    InvalidGraphError,
    IODGraphError,
    PartitionError,
    UnknownNodeError,
)
from .graph import IODGraph, Node, NodeRole, edge_universe_size, is_feed_forward, make_graph, validate
from .partition import IOPartition, Membrane, enumerate_partitions, make_partition, membrane
from .serialize import from_dot, from_json, graph_from_dict, graph_to_dict, to_dot, to_json

__all__ = [name for name in dir() if not name.startswith("_")]
