"""Problem instance: transport topology, LSR candidates, demands, policy.

All money values are non-negative integers (minor currency units) and all
bandwidths are non-negative integers.  ``None`` stands for "unbounded"
wherever a limit is optional.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import networkx as nx

from mlgnet.config import SolverConfig
from mlgnet.exceptions import InstanceError

FULL_MESH = "full_mesh"
DISTANCE_LIMITED = "distance_limited"


@dataclass(frozen=True)
class TransportNode:
    id: str
    lsr_candidate: bool = False
    lsr_install_cost: int = 0
    throughput_limit: Optional[int] = None


@dataclass(frozen=True)
class TransportLink:
    """Undirected transport link with modular capacity.

    Usable capacity is ``module_size * modules`` with at most
    ``max_modules`` modules installed.
    """

    id: str
    a: str
    b: str
    fixed_cost: int = 0
    module_size: int = 1
    module_cost: int = 0
    max_modules: int = 1

    @property
    def endpoints(self) -> tuple:
        return tuple(sorted((self.a, self.b)))

    @property
    def max_capacity(self) -> int:
        return self.module_size * self.max_modules


@dataclass(frozen=True)
class Demand:
    """Multicast flow from ``source`` to every node in ``sinks``."""

    id: str
    source: str
    sinks: tuple
    bandwidth: int

    def __post_init__(self):
        object.__setattr__(self, "sinks", tuple(sorted(self.sinks)))

    @property
    def terminals(self) -> tuple:
        return (self.source,) + tuple(s for s in self.sinks)


@dataclass(frozen=True)
class CandidatePolicy:
    """Bounds the redundancy of the synthesized logical layer.

    ``logical_edge_rule`` is ``"full_mesh"`` or ``"distance_limited"``; the
    latter keeps only LSR pairs within ``hop_limit`` transport hops.
    """

    k_paths: int = 1
    max_logical_degree: Optional[int] = None
    logical_edge_rule: str = FULL_MESH
    hop_limit: Optional[int] = None


@dataclass(frozen=True)
class Instance:
    name: str
    nodes: tuple
    links: tuple
    demands: tuple = ()
    policy: CandidatePolicy = CandidatePolicy()
    solver: SolverConfig = SolverConfig()
    version: int = 1
    _node_index: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "demands", tuple(self.demands))
        object.__setattr__(self, "_node_index", {n.id: n for n in self.nodes})

    def node(self, node_id: str) -> TransportNode:
        return self._node_index[node_id]

    @property
    def lsr_candidates(self) -> list:
        return sorted(n.id for n in self.nodes if n.lsr_candidate)

    def demand(self, demand_id: str) -> Demand:
        for d in self.demands:
            if d.id == demand_id:
                return d
        raise KeyError(demand_id)

    def transport_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(sorted(n.id for n in self.nodes))
        for link in self.links:
            g.add_edge(link.a, link.b, id=link.id, fixed_cost=link.fixed_cost)
        return g

    def scale_costs(self, factor: int) -> "Instance":
        """Copy of the instance with every money value multiplied by ``factor``."""
        if factor <= 0 or int(factor) != factor:
            raise ValueError("factor must be a positive integer")
        return replace(
            self,
            nodes=tuple(replace(n, lsr_install_cost=n.lsr_install_cost * factor) for n in self.nodes),
            links=tuple(
                replace(l, fixed_cost=l.fixed_cost * factor, module_cost=l.module_cost * factor)
                for l in self.links
            ),
        )

    def with_demands(self, demands) -> "Instance":
        return replace(self, demands=tuple(demands))


def _nonneg_int(value, location, allow_none=False, positive=False):
    if value is None and allow_none:
        return
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError(f"expected an integer, got {value!r}", location)
    if positive and value <= 0:
        raise InstanceError(f"must be > 0, got {value}", location)
    if value < 0:
        raise InstanceError(f"must be >= 0, got {value}", location)


def check_instance(instance: Instance) -> Instance:
    """Validate every instance invariant and return the instance.

    Raises :class:`InstanceError` naming the first offending field.
    """
    ids = set()
    for i, n in enumerate(instance.nodes):
        loc = f"nodes[{i}]"
        if not isinstance(n.id, str) or not n.id:
            raise InstanceError("node id must be a non-empty string", f"{loc}.id")
        if n.id in ids:
            raise InstanceError(f"duplicate node id {n.id!r}", f"{loc}.id")
        if "|" in n.id or "/" in n.id:
            raise InstanceError(f"node id {n.id!r} may not contain '|' or '/'", f"{loc}.id")
        ids.add(n.id)
        _nonneg_int(n.lsr_install_cost, f"{loc}.lsr_install_cost")
        _nonneg_int(n.throughput_limit, f"{loc}.throughput_limit", allow_none=True)
    if not ids:
        raise InstanceError("instance has no transport nodes", "nodes")

    link_ids = set()
    pairs = {}
    for i, l in enumerate(instance.links):
        loc = f"links[{i}]"
        if l.id in link_ids:
            raise InstanceError(f"duplicate link id {l.id!r}", f"{loc}.id")
        link_ids.add(l.id)
        for end in ("a", "b"):
            if getattr(l, end) not in ids:
                raise InstanceError(f"unknown node {getattr(l, end)!r}", f"{loc}.{end}")
        if l.a == l.b:
            raise InstanceError(f"link {l.id!r} is a self-loop", loc)
        if l.endpoints in pairs:
            raise InstanceError(
                f"link {l.id!r} is parallel to {pairs[l.endpoints]!r}", loc
            )
        pairs[l.endpoints] = l.id
        _nonneg_int(l.fixed_cost, f"{loc}.fixed_cost")
        _nonneg_int(l.module_size, f"{loc}.module_size", positive=True)
        _nonneg_int(l.module_cost, f"{loc}.module_cost")
        _nonneg_int(l.max_modules, f"{loc}.max_modules")

    if not nx.is_connected(instance.transport_graph()):
        raise InstanceError("transport topology is disconnected", "links")
    candidates = set(instance.lsr_candidates)
    if not candidates:
        raise InstanceError("instance has no LSR candidate", "nodes")

    p = instance.policy
    _nonneg_int(p.k_paths, "policy.k_paths", positive=True)
    _nonneg_int(p.max_logical_degree, "policy.max_logical_degree", allow_none=True)
    if p.logical_edge_rule not in (FULL_MESH, DISTANCE_LIMITED):
        raise InstanceError(
            f"unknown logical_edge_rule {p.logical_edge_rule!r}", "policy.logical_edge_rule"
        )
    if p.logical_edge_rule == DISTANCE_LIMITED:
        _nonneg_int(p.hop_limit, "policy.hop_limit", positive=True)

    demand_ids = set()
    for i, d in enumerate(instance.demands):
        loc = f"demands[{i}]"
        if d.id in demand_ids:
            raise InstanceError(f"duplicate demand id {d.id!r}", f"{loc}.id")
        demand_ids.add(d.id)
        _nonneg_int(d.bandwidth, f"{loc}.bandwidth", positive=True)
        if not d.sinks:
            raise InstanceError(f"demand {d.id!r} has no sinks", f"{loc}.sinks")
        if len(set(d.sinks)) != len(d.sinks):
            raise InstanceError(f"demand {d.id!r} lists a sink twice", f"{loc}.sinks")
        if d.source in d.sinks:
            raise InstanceError(f"demand {d.id!r} has its source among its sinks", f"{loc}.sinks")
        for end in d.terminals:
            if end not in ids:
                raise InstanceError(f"demand {d.id!r} references unknown node {end!r}", loc)
            if end not in candidates:
                raise InstanceError(
                    f"demand {d.id!r} endpoint {end!r} is not an LSR candidate", loc
                )
    return instance
