"""Multicast routing on the logical layer and load mapping to transport."""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional

import networkx as nx

from mlgnet.exceptions import MLGError, StructuralError
from mlgnet.graph import LOGICAL, TRANSPORT, EdgeKind, MultiLayerGraph
from mlgnet.instance import Demand
from mlgnet.synthesis import logical_candidates


class UnreachableTerminal(MLGError):
    """A terminal cannot be connected to the tree being grown."""

    def __init__(self, terminal, message=None):
        self.terminal = terminal
        super().__init__(message or f"terminal {terminal!r} is unreachable")


@dataclass(frozen=True)
class MulticastRoute:
    """Logical tree of one demand plus the transport path used per tree edge.

    ``path_choice`` maps each tree edge id to an index into that logical
    edge's candidate paths.
    """

    demand_id: str
    logical_tree: frozenset
    path_choice: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "logical_tree", frozenset(self.logical_tree))
        object.__setattr__(self, "path_choice", dict(sorted(self.path_choice.items())))

    def __hash__(self):
        return hash((self.demand_id, self.logical_tree, tuple(self.path_choice.items())))


@dataclass
class LoadMap:
    """Bandwidth consumed per transport link, per logical edge and per LSR."""

    links: Counter = field(default_factory=Counter)
    logical: Counter = field(default_factory=Counter)
    throughput: Counter = field(default_factory=Counter)

    def __add__(self, other: "LoadMap") -> "LoadMap":
        return LoadMap(
            self.links + other.links,
            self.logical + other.logical,
            self.throughput + other.throughput,
        )

    def __eq__(self, other):
        if not isinstance(other, LoadMap):
            return NotImplemented
        strip = lambda c: {k: v for k, v in c.items() if v}
        return (
            strip(self.links) == strip(other.links)
            and strip(self.logical) == strip(other.logical)
            and strip(self.throughput) == strip(other.throughput)
        )

    def total_transport(self) -> int:
        return sum(self.links.values())


# -- Steiner heuristic -------------------------------------------------------


def takahashi_matsuyama(adj, terminals, length, node_weight=None, root=None):
    """Grow a Steiner tree by repeatedly attaching the nearest terminal.

    ``adj`` maps each vertex to ``(neighbor, edge_id)`` pairs and
    ``length(edge_id)`` returns a non-negative number or ``None`` for an
    unusable edge.  ``node_weight(v)`` is charged when a path enters a
    vertex that is not yet in the tree.  Ties are broken by vertex id.
    Returns the set of tree edge ids.
    """
    terminals = sorted(set(terminals))
    if not terminals:
        raise ValueError("need at least one terminal")
    for t in terminals:
        if t not in adj:
            raise UnreachableTerminal(t, f"terminal {t!r} is not in the graph")
    root = terminals[0] if root is None else root
    in_tree = {root}
    tree_edges = set()
    remaining = set(terminals) - in_tree
    while remaining:
        dist = {}
        pred = {}
        heap = [(0, v, "", "") for v in sorted(in_tree)]
        found = None
        while heap:
            d, v, p, eid = heapq.heappop(heap)
            if v in dist:
                continue
            dist[v] = d
            pred[v] = (p, eid)
            if v in remaining:
                found = v
                break
            for nbr, e in adj[v]:
                if nbr in dist:
                    continue
                w = length(e)
                if w is None:
                    continue
                step = d + w
                if node_weight is not None and nbr not in in_tree:
                    nw = node_weight(nbr)
                    if nw is None:
                        continue
                    step += nw
                heapq.heappush(heap, (step, nbr, v, e))
        if found is None:
            raise UnreachableTerminal(min(remaining))
        v = found
        while v not in in_tree:
            p, eid = pred[v]
            tree_edges.add(eid)
            in_tree.add(v)
            v = p
        remaining.discard(found)
    return tree_edges


def steiner_tree(
    logical: nx.Graph,
    terminals,
    edge_lengths: Optional[Mapping] = None,
    node_weights: Optional[Mapping] = None,
    root=None,
) -> frozenset:
    """Heuristic minimum Steiner tree over a logical-layer view.

    Edges are identified by their ``id`` attribute; ``edge_lengths`` maps
    edge ids to lengths and falls back to the ``weight`` attribute.  The
    result is a set of edge ids forming a tree that spans ``terminals``.

    Raises:
        UnreachableTerminal: some terminal cannot be connected.
    """
    adj = {n: [] for n in logical.nodes}
    lengths = {}
    for u, v, data in logical.edges(data=True):
        eid = data.get("id", (min(u, v), max(u, v)))
        adj[u].append((v, eid))
        adj[v].append((u, eid))
        if edge_lengths is not None and eid in edge_lengths:
            lengths[eid] = edge_lengths[eid]
        else:
            lengths[eid] = data.get("weight", 0) or 0
    for n in adj:
        adj[n].sort(key=lambda x: (x[0], str(x[1])))
    nw = None
    if node_weights is not None:
        nw = lambda v: node_weights.get(v, 0)
    return frozenset(takahashi_matsuyama(adj, terminals, lengths.get, nw, root))


def tree_vertices(mlg: MultiLayerGraph, tree) -> set:
    out = set()
    for eid in tree:
        e = mlg.edges[eid]
        out.add(e.u[1])
        out.add(e.v[1])
    return out


def is_steiner_tree(edges, terminals) -> bool:
    """True when ``edges`` (``(u, v)`` pairs) form a tree covering ``terminals``."""
    terminals = set(terminals)
    if not edges:
        return len(terminals) <= 1
    g = nx.Graph()
    g.add_edges_from(edges)
    if g.number_of_edges() != len(edges):
        return False
    return nx.is_tree(g) and terminals <= set(g.nodes)


# -- load mapping ---------------------------------------------------------------


def map_down(route: MulticastRoute, mlg: MultiLayerGraph, demand: Demand) -> LoadMap:
    """Load added by one routed demand.

    Every tree edge adds the demand bandwidth to each transport link of its
    chosen path; each LSR is charged bandwidth times its tree degree.
    """
    candidates = mlg.memo("logical_candidates", logical_candidates)
    delta = LoadMap()
    bw = demand.bandwidth
    for eid in sorted(route.logical_tree):
        cand = candidates.get(eid)
        if cand is None:
            raise StructuralError(f"{eid!r} is not a logical edge")
        idx = route.path_choice.get(eid)
        if idx is None or not 0 <= idx < len(cand.link_paths):
            raise StructuralError(
                f"invalid path index {idx!r} for logical edge {eid} "
                f"({len(cand.link_paths)} candidates)"
            )
        for link in cand.link_paths[idx]:
            delta.links[link] += bw
        delta.logical[eid] += bw
        delta.throughput[cand.a] += bw
        delta.throughput[cand.b] += bw
    return delta


def modules_needed(load: int, module_size: int) -> int:
    return -(-load // module_size)


@dataclass(frozen=True)
class CapacityViolation:
    element: str
    kind: str
    load: int
    limit: int

    def __str__(self):
        return f"{self.kind} on {self.element}: {self.load} > {self.limit}"


@dataclass(frozen=True)
class CapacityReport:
    violations: tuple = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.feasible


def dimension(load: LoadMap, mlg: MultiLayerGraph) -> dict:
    """Minimal module count per loaded transport link (not clamped)."""
    out = {}
    for link, amount in sorted(load.links.items()):
        if amount > 0:
            out[link] = modules_needed(amount, mlg.edges[link].module_size)
    return out


def check_capacity(load: LoadMap, mlg: MultiLayerGraph, dimensioning: Mapping) -> CapacityReport:
    """Every link/LSR whose load or module count exceeds its limit."""
    out = []
    links = sorted(set(load.links) | set(dimensioning))
    for link in links:
        e = mlg.edges.get(link)
        if e is None or e.kind is not EdgeKind.INTRA or e.u[0] != TRANSPORT:
            raise StructuralError(f"{link!r} is not a transport link")
        count = dimensioning.get(link, 0)
        amount = load.links.get(link, 0)
        if amount > count * e.module_size:
            out.append(CapacityViolation(link, "link load", amount, count * e.module_size))
        if e.max_modules is not None and count > e.max_modules:
            out.append(CapacityViolation(link, "module count", count, e.max_modules))
    for lsr in sorted(load.throughput):
        v = mlg.vertices.get((LOGICAL, lsr))
        if v is None:
            raise StructuralError(f"{lsr!r} is not an LSR candidate")
        if v.throughput_limit is not None and load.throughput[lsr] > v.throughput_limit:
            out.append(
                CapacityViolation(lsr, "LSR throughput", load.throughput[lsr], v.throughput_limit)
            )
    return CapacityReport(tuple(out))
