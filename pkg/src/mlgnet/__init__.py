"""Two-level MPLS-over-transport network design with multilayer graphs."""

from mlgnet.config import ExactLimits, Mode, SolverConfig
from mlgnet.estimator import MultilayerDesigner, as_instance
from mlgnet.exceptions import (
    InfeasibleError,
    InstanceError,
    LimitsExceededError,
    MLGError,
    StructuralError,
    UnknownLayerError,
)
from mlgnet.graph import (
    Edge,
    EdgeKind,
    MLGBuilder,
    MultiLayerGraph,
    Selection,
    Vertex,
    VertexKind,
    descend,
    layer_subgraph,
    total_weight,
    validate,
)
from mlgnet.instance import CandidatePolicy, Demand, Instance, TransportLink, TransportNode
from mlgnet.io import emit_report, load_instance, parse_instance, serialize_instance
from mlgnet.optimizer import (
    Design,
    Infeasible,
    exact_bruteforce,
    greedy_construct,
    local_search,
    objective,
    solve,
)
from mlgnet.routing import LoadMap, MulticastRoute, check_capacity, map_down, steiner_tree
from mlgnet.synthesis import candidate_paths, synthesize

__version__ = "0.1.0"
