"""Construction of the initial redundant multilayer graph from an instance."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

import networkx as nx

from mlgnet.exceptions import InstanceError
from mlgnet.graph import (
    FIRST_FLOW_LAYER,
    LOGICAL,
    TRANSPORT,
    EdgeKind,
    MLGBuilder,
    MultiLayerGraph,
    Vertex,
    VertexKind,
)
from mlgnet.instance import DISTANCE_LIMITED, Instance, check_instance


@dataclass(frozen=True)
class LogicalEdgeCandidate:
    """A logical (layer 1) adjacency with its candidate transport realizations.

    ``candidate_paths`` are node id sequences, ``link_paths`` the matching
    transport edge ids of each path.
    """

    id: str
    a: str
    b: str
    candidate_paths: tuple
    link_paths: tuple
    weight: int = 0

    @property
    def endpoints(self) -> tuple:
        return (self.a, self.b)


def transport_edge_id(link_id: str) -> str:
    return f"t/{link_id}"


def logical_edge_id(a: str, b: str) -> str:
    a, b = sorted((a, b))
    return f"g/{a}|{b}"


def _path_key(cost, path):
    return (cost, len(path) - 1, tuple(path))


def _dijkstra(adj, s, t, banned_nodes, banned_edges):
    """Best s-t path under the (cost, hops, node ids) order, or None."""
    heap = [(0, 0, (s,))]
    done = set()
    while heap:
        cost, hops, path = heapq.heappop(heap)
        node = path[-1]
        if node in done:
            continue
        done.add(node)
        if node == t:
            return cost, path
        for nbr, w in adj[node]:
            if nbr in done or nbr in banned_nodes:
                continue
            if (node, nbr) in banned_edges:
                continue
            heapq.heappush(heap, (cost + w, hops + 1, path + (nbr,)))
    return None


def _adjacency(transport: nx.Graph, weight: str):
    adj = {n: [] for n in transport.nodes}
    for u, v, data in transport.edges(data=True):
        w = data.get(weight, 0) or 0
        adj[u].append((v, w))
        adj[v].append((u, w))
    for n in adj:
        adj[n].sort()
    return adj


def candidate_paths(transport: nx.Graph, s, t, k: int, weight: str = "weight") -> list:
    """Up to ``k`` loop-free ``s``-``t`` paths in ranking order.

    Paths are ranked by total edge ``weight`` (the link fixed cost on a
    transport view), then hop count, then the node id sequence.  Uses
    Yen's algorithm; an empty list means ``t`` is unreachable.
    """
    if s == t:
        raise ValueError("candidate_paths needs distinct endpoints")
    for node in (s, t):
        if node not in transport:
            raise KeyError(f"{node!r} is not in the transport view")
    if k < 1:
        return []
    adj = _adjacency(transport, weight)
    weight_of = {}
    for u, v, data in transport.edges(data=True):
        weight_of[(u, v)] = weight_of[(v, u)] = data.get(weight, 0) or 0

    first = _dijkstra(adj, s, t, frozenset(), frozenset())
    if first is None:
        return []
    accepted = [first]
    pending = []
    seen = {first[1]}
    while len(accepted) < k:
        prev_path = accepted[-1][1]
        for i in range(len(prev_path) - 1):
            root = prev_path[: i + 1]
            root_cost = sum(weight_of[(root[j], root[j + 1])] for j in range(i))
            banned_edges = set()
            for _, p in accepted:
                if p[: i + 1] == root and len(p) > i + 1:
                    banned_edges.add((p[i], p[i + 1]))
                    banned_edges.add((p[i + 1], p[i]))
            spur = _dijkstra(adj, root[-1], t, frozenset(root[:-1]), banned_edges)
            if spur is None:
                continue
            path = root[:-1] + spur[1]
            if path in seen:
                continue
            seen.add(path)
            cost = root_cost + spur[0]
            heapq.heappush(pending, _path_key(cost, path))
        if not pending:
            break
        cost, _, path = heapq.heappop(pending)
        accepted.append((cost, path))
    return [list(p) for _, p in accepted]


def _logical_pairs(instance: Instance, transport: nx.Graph, candidates: list):
    policy = instance.policy
    pairs = list(itertools.combinations(candidates, 2))
    if policy.logical_edge_rule == DISTANCE_LIMITED:
        hops = dict(nx.all_pairs_shortest_path_length(transport, cutoff=policy.hop_limit))
        pairs = [(a, b) for a, b in pairs if b in hops.get(a, {})]
    return pairs


def synthesize(instance: Instance) -> MultiLayerGraph:
    """Build the initial redundant multilayer graph for ``instance``.

    Layer 0 mirrors the transport topology (edge weight = link fixed cost,
    capacity = module size x max modules).  Layer 1 holds one vertex per
    LSR candidate and one logical edge per admissible LSR pair that has at
    least one candidate transport path.  Layer ``2 + i`` holds the
    endpoints of demand ``i`` joined wherever layer 1 joins them.
    """
    check_instance(instance)

    b = MLGBuilder()
    n_layers = FIRST_FLOW_LAYER + len(instance.demands)
    for layer in range(n_layers):
        b.add_layer(layer)

    for n in sorted(instance.nodes, key=lambda n: n.id):
        b.add_vertex(Vertex(n.id, TRANSPORT, VertexKind.TRANSPORT_NODE))
    for link in sorted(instance.links, key=lambda l: l.id):
        b.add_edge(
            transport_edge_id(link.id),
            (TRANSPORT, link.a),
            (TRANSPORT, link.b),
            weight=link.fixed_cost,
            capacity=link.max_capacity,
            module_size=link.module_size,
            module_cost=link.module_cost,
            max_modules=link.max_modules,
        )

    candidates = instance.lsr_candidates
    for c in candidates:
        node = instance.node(c)
        b.add_vertex(
            Vertex(c, LOGICAL, VertexKind.LSR_CANDIDATE, node.lsr_install_cost, node.throughput_limit)
        )
        b.add_edge(f"x/{LOGICAL}/{c}", (LOGICAL, c), (TRANSPORT, c), EdgeKind.INTER)

    transport = instance.transport_graph()
    ranked = []
    for a, c in _logical_pairs(instance, transport, candidates):
        paths = candidate_paths(transport, a, c, instance.policy.k_paths, weight="fixed_cost")
        if not paths:
            continue
        best_cost = sum(transport[u][v]["fixed_cost"] for u, v in zip(paths[0], paths[0][1:]))
        ranked.append((best_cost, len(paths[0]) - 1, a, c, paths))
    ranked.sort(key=lambda r: r[:4])

    degree = dict.fromkeys(candidates, 0)
    cap = instance.policy.max_logical_degree
    logical_adj = set()
    for _, _, a, c, paths in ranked:
        if cap is not None and (degree[a] >= cap or degree[c] >= cap):
            continue
        degree[a] += 1
        degree[c] += 1
        logical_adj.add((a, c))
        b.add_edge(
            logical_edge_id(a, c),
            (LOGICAL, a),
            (LOGICAL, c),
            weight=0,
            paths=tuple(tuple(p) for p in paths),
        )

    for i, d in enumerate(instance.demands):
        layer = FIRST_FLOW_LAYER + i
        ends = sorted(d.terminals)
        for e in ends:
            b.add_vertex(Vertex(e, layer, VertexKind.FLOW_ENDPOINT))
            b.add_edge(f"x/{layer}/{e}", (layer, e), (LOGICAL, e), EdgeKind.INTER)
        for a, c in itertools.combinations(ends, 2):
            if (a, c) in logical_adj:
                b.add_edge(f"f/{d.id}/{a}|{c}", (layer, a), (layer, c), weight=0)

    return b.build(strict=True)


def logical_candidates(mlg: MultiLayerGraph) -> dict:
    """Logical edges of a synthesized graph keyed by edge id."""
    out = {}
    for e in mlg.intra_edges(LOGICAL):
        link_paths = []
        for path in e.paths:
            ids = []
            for x, y in zip(path, path[1:]):
                te = mlg.edge_between((TRANSPORT, x), (TRANSPORT, y))
                if te is None:
                    raise InstanceError(f"logical edge {e.id} uses a missing link {x}-{y}")
                ids.append(te.id)
            link_paths.append(tuple(ids))
        out[e.id] = LogicalEdgeCandidate(
            e.id, e.u[1], e.v[1], e.paths, tuple(link_paths), e.weight
        )
    return out


def flow_layer(mlg: MultiLayerGraph, instance: Instance, demand_id: str) -> int:
    for i, d in enumerate(instance.demands):
        if d.id == demand_id:
            return FIRST_FLOW_LAYER + i
    raise KeyError(demand_id)
