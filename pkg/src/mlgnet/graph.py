"""Multilayer graph model.

Layer 0 holds the transport topology, layer 1 the MPLS (logical) layer
and layers 2..k one multicast flow each; every flow layer rests directly
on layer 1.  Vertices are addressed by a
``(layer, id)`` key because ids are only unique within a layer.  Edges
are undirected; inter-layer edges only record which lower-layer element
realizes an upper-layer one and carry neither weight nor capacity.

A :class:`MultiLayerGraph` is immutable once built.  Use
:class:`MLGBuilder` to assemble one.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

import networkx as nx

from mlgnet.exceptions import MLGError, StructuralError, UnknownLayerError

TRANSPORT = 0
LOGICAL = 1
FIRST_FLOW_LAYER = 2

VertexKey = tuple  # (layer, id)


def parent_layer(layer: int) -> int:
    """Layer an upper-layer vertex is realized on.

    Flow layers all sit directly on the logical layer, so the parent of
    any layer >= 2 is layer 1.
    """
    if layer <= 0:
        raise ValueError("the transport layer has no parent")
    return layer - 1 if layer <= FIRST_FLOW_LAYER else LOGICAL


def adjacent_layers(a: int, b: int) -> bool:
    lo, hi = sorted((a, b))
    return hi > 0 and parent_layer(hi) == lo


class VertexKind(str, enum.Enum):
    TRANSPORT_NODE = "transport_node"
    LSR_CANDIDATE = "lsr_candidate"
    FLOW_ENDPOINT = "flow_endpoint"


class EdgeKind(str, enum.Enum):
    INTRA = "intra"
    INTER = "inter"


@dataclass(frozen=True)
class Vertex:
    """A vertex of one layer.

    ``throughput_limit`` of ``None`` means unbounded.
    """

    id: str
    layer: int
    kind: VertexKind
    node_cost: int = 0
    throughput_limit: Optional[int] = None

    @property
    def key(self) -> VertexKey:
        return (self.layer, self.id)


@dataclass(frozen=True)
class Edge:
    """An undirected edge.

    ``u`` and ``v`` are vertex keys stored in sorted order.  ``paths`` is
    only populated on logical edges: the ordered candidate transport paths
    (node id sequences) that can realize the edge.  Transport edges carry
    their capacity module parameters; ``capacity`` is then
    ``module_size * max_modules``.
    """

    id: str
    u: VertexKey
    v: VertexKey
    kind: EdgeKind
    weight: int = 0
    capacity: Optional[int] = None
    paths: tuple = ()
    module_size: Optional[int] = None
    module_cost: int = 0
    max_modules: Optional[int] = None

    @property
    def endpoints(self) -> tuple:
        return (self.u, self.v)

    @property
    def layer(self):
        """Layer index for intra-layer edges, ``(lower, upper)`` otherwise."""
        if self.kind is EdgeKind.INTRA:
            return self.u[0]
        return tuple(sorted((self.u[0], self.v[0])))

    def other(self, key: VertexKey) -> VertexKey:
        if key == self.u:
            return self.v
        if key == self.v:
            return self.u
        raise KeyError(key)


@dataclass(frozen=True)
class Selection:
    """A subset of vertices (by key) and edges (by id) of one graph."""

    vertices: frozenset = frozenset()
    edges: frozenset = frozenset()

    def __or__(self, other: "Selection") -> "Selection":
        return Selection(self.vertices | other.vertices, self.edges | other.edges)

    def is_disjoint(self, other: "Selection") -> bool:
        return self.vertices.isdisjoint(other.vertices) and self.edges.isdisjoint(
            other.edges
        )


@dataclass(frozen=True, order=True)
class Violation:
    element: str
    code: str
    message: str = field(compare=False)

    def __str__(self):
        return f"{self.element}: {self.code} ({self.message})"


class MultiLayerGraph:
    """Immutable layered graph with intra- and inter-layer edges."""

    def __init__(self, layers: Iterable[int], vertices: Iterable[Vertex], edges: Iterable[Edge]):
        self._layers = tuple(layers)
        self._vertices = MappingProxyType({v.key: v for v in vertices})
        self._edges = MappingProxyType({e.id: e for e in edges})
        incident = defaultdict(list)
        down = defaultdict(list)
        pair_index = {}
        for e in self._edges.values():
            incident[e.u].append(e.id)
            incident[e.v].append(e.id)
            if e.kind is EdgeKind.INTER:
                upper, lower = (e.u, e.v) if e.u[0] > e.v[0] else (e.v, e.u)
                down[upper].append(lower)
            else:
                pair_index.setdefault((e.u, e.v), e.id)
        self._incident = {k: tuple(sorted(ids)) for k, ids in incident.items()}
        self._down = {k: tuple(sorted(vs)) for k, vs in down.items()}
        self._pair_index = pair_index
        self._memo = {}

    @property
    def layers(self) -> tuple:
        return self._layers

    @property
    def vertices(self) -> Mapping:
        return self._vertices

    @property
    def edges(self) -> Mapping:
        return self._edges

    def __repr__(self):
        return (
            f"MultiLayerGraph(layers={len(self._layers)}, "
            f"vertices={len(self._vertices)}, edges={len(self._edges)})"
        )

    def has_layer(self, layer: int) -> bool:
        return layer in self._layers

    def vertices_on(self, layer: int) -> list:
        return sorted(
            (v for v in self._vertices.values() if v.layer == layer), key=lambda v: v.id
        )

    def intra_edges(self, layer: int) -> list:
        return sorted(
            (
                e
                for e in self._edges.values()
                if e.kind is EdgeKind.INTRA and e.u[0] == layer
            ),
            key=lambda e: e.id,
        )

    def inter_edges(self) -> list:
        return sorted(
            (e for e in self._edges.values() if e.kind is EdgeKind.INTER),
            key=lambda e: e.id,
        )

    def incident(self, key: VertexKey) -> tuple:
        return self._incident.get(key, ())

    def edge_between(self, a: VertexKey, b: VertexKey) -> Optional[Edge]:
        """Intra-layer edge joining ``a`` and ``b``, if any."""
        eid = self._pair_index.get(tuple(sorted((a, b))))
        return None if eid is None else self._edges[eid]

    def downward(self, key: VertexKey) -> tuple:
        return self._down.get(key, ())

    def flow_layers(self) -> list:
        return [k for k in self._layers if k >= FIRST_FLOW_LAYER]

    def memo(self, name: str, compute):
        """Cache a value derived from this (immutable) graph."""
        if name not in self._memo:
            self._memo[name] = compute(self)
        return self._memo[name]


class MLGBuilder:
    """Single-owner mutable builder for :class:`MultiLayerGraph`.

    Example:
        >>> b = MLGBuilder()
        >>> b.add_layer(0)
        >>> _ = b.add_vertex(Vertex("a", 0, VertexKind.TRANSPORT_NODE))
        >>> b.build().vertices_on(0)[0].id
        'a'
    """

    def __init__(self):
        self._layers = []
        self._vertices = {}
        self._edges = {}

    def add_layer(self, layer: int) -> None:
        if layer not in self._layers:
            self._layers.append(layer)

    def add_vertex(self, vertex: Vertex) -> Vertex:
        if vertex.key in self._vertices:
            raise StructuralError(f"duplicate vertex {vertex.key}")
        self._vertices[vertex.key] = vertex
        return vertex

    def add_edge(
        self,
        id: str,
        a: VertexKey,
        b: VertexKey,
        kind: EdgeKind = EdgeKind.INTRA,
        weight: int = 0,
        capacity: Optional[int] = None,
        paths: tuple = (),
        **modules,
    ) -> Edge:
        if id in self._edges:
            raise StructuralError(f"duplicate edge id {id!r}")
        u, v = sorted((tuple(a), tuple(b)))
        edge = Edge(id, u, v, EdgeKind(kind), weight, capacity, tuple(paths), **modules)
        self._edges[id] = edge
        return edge

    def build(self, strict: bool = True) -> MultiLayerGraph:
        """Freeze the graph.

        With ``strict`` the result must pass :func:`validate`; otherwise
        :class:`StructuralError` lists every violation.
        """
        mlg = MultiLayerGraph(sorted(self._layers), self._vertices.values(), self._edges.values())
        if strict:
            violations = validate(mlg)
            if violations:
                raise StructuralError(
                    "invalid multilayer graph: " + "; ".join(map(str, violations))
                )
        return mlg


def _vname(key: VertexKey) -> str:
    return f"L{key[0]}:{key[1]}"


def validate(mlg: MultiLayerGraph) -> list:
    """Return every structural violation of ``mlg`` sorted by element id.

    An empty list means the graph is valid.
    """
    out = []
    layers = list(mlg.layers)
    if not layers:
        return [Violation("graph", "missing layer 0", "graph has no layers")]
    if layers != list(range(len(layers))):
        if 0 not in layers:
            out.append(Violation("graph", "missing layer 0", "no transport layer"))
        else:
            out.append(
                Violation("graph", "non-contiguous layers", f"layers {layers} are not 0..n-1")
            )
    known = set(layers)

    for key, v in mlg.vertices.items():
        name = _vname(key)
        if v.layer not in known:
            out.append(Violation(name, "unknown layer", f"layer {v.layer} not declared"))
        if v.kind is VertexKind.LSR_CANDIDATE and v.layer != LOGICAL:
            out.append(Violation(name, "misplaced vertex", "LSR candidates live on layer 1"))
        if v.kind is VertexKind.FLOW_ENDPOINT and v.layer < FIRST_FLOW_LAYER:
            out.append(Violation(name, "misplaced vertex", "flow endpoints live on layers >= 2"))
        if v.kind is VertexKind.TRANSPORT_NODE and v.layer != TRANSPORT:
            out.append(Violation(name, "misplaced vertex", "transport nodes live on layer 0"))
        if v.node_cost < 0:
            out.append(Violation(name, "negative cost", f"node_cost={v.node_cost}"))
        if v.throughput_limit is not None and v.throughput_limit < 0:
            out.append(Violation(name, "negative limit", f"throughput_limit={v.throughput_limit}"))
        if v.layer >= 1:
            below = [k for k in mlg.downward(key) if k[0] == parent_layer(v.layer)]
            if len(below) != 1:
                out.append(
                    Violation(
                        name,
                        "unmapped vertex" if not below else "ambiguous mapping",
                        f"{len(below)} downward inter-layer edges, expected 1",
                    )
                )

    seen_pairs = {}
    for eid, e in mlg.edges.items():
        ename = f"edge:{eid}"
        missing = [k for k in e.endpoints if k not in mlg.vertices]
        if missing:
            out.append(
                Violation(ename, "unknown endpoint", ", ".join(_vname(k) for k in missing))
            )
            continue
        if e.u == e.v:
            out.append(Violation(ename, "self-loop", _vname(e.u)))
            continue
        if e.weight < 0:
            out.append(Violation(ename, "negative weight", f"weight={e.weight}"))
        if e.capacity is not None and e.capacity < 0:
            out.append(Violation(ename, "negative capacity", f"capacity={e.capacity}"))
        lu, lv = e.u[0], e.v[0]
        if e.kind is EdgeKind.INTRA:
            if lu != lv:
                out.append(Violation(ename, "cross-layer intra edge", f"layers {lu} and {lv}"))
            elif (e.u, e.v) in seen_pairs:
                out.append(
                    Violation(ename, "parallel edge", f"duplicates edge {seen_pairs[(e.u, e.v)]}")
                )
            else:
                seen_pairs[(e.u, e.v)] = eid
        else:
            if not adjacent_layers(lu, lv):
                out.append(Violation(ename, "non-adjacent layers", f"layers {lu} and {lv}"))
            if e.weight != 0 or e.capacity is not None:
                out.append(
                    Violation(ename, "weighted inter-layer edge", "inter-layer edges carry no weight or capacity")
                )

    if 0 in known:
        transport = layer_subgraph(mlg, TRANSPORT)
        if transport.number_of_nodes() and not nx.is_connected(transport):
            comps = sorted(min(c) for c in nx.connected_components(transport))
            out.append(
                Violation("layer:0", "disconnected transport", f"{len(comps)} components")
            )
    return sorted(out)


def layer_subgraph(mlg: MultiLayerGraph, layer: int) -> nx.Graph:
    """Simple weighted graph of one layer (vertices + intra-layer edges).

    Nodes are the vertex ids local to the layer; edges carry ``id``,
    ``weight`` and ``capacity`` attributes.
    """
    if not mlg.has_layer(layer):
        raise UnknownLayerError(layer)
    g = nx.Graph(layer=layer)
    for v in mlg.vertices_on(layer):
        g.add_node(v.id, node_cost=v.node_cost, throughput_limit=v.throughput_limit)
    for e in mlg.intra_edges(layer):
        if e.u in mlg.vertices and e.v in mlg.vertices:
            g.add_edge(e.u[1], e.v[1], id=e.id, weight=e.weight, capacity=e.capacity)
    return g


def total_weight(mlg: MultiLayerGraph, sel: Selection) -> int:
    """Sum of node costs of chosen vertices plus weights of chosen edges."""
    unknown_v = sorted(k for k in sel.vertices if k not in mlg.vertices)
    unknown_e = sorted(e for e in sel.edges if e not in mlg.edges)
    if unknown_v or unknown_e:
        raise MLGError(
            f"selection references unknown elements: vertices={unknown_v} edges={unknown_e}"
        )
    return sum(mlg.vertices[k].node_cost for k in sel.vertices) + sum(
        mlg.edges[e].weight for e in sel.edges
    )


def check_selection(mlg: MultiLayerGraph, sel: Selection) -> list:
    """Violations of a selection against ``mlg`` (unknown ids, open incidence)."""
    out = []
    for k in sorted(sel.vertices):
        if k not in mlg.vertices:
            out.append(Violation(_vname(k), "unknown vertex", "not in graph"))
    for eid in sorted(sel.edges):
        e = mlg.edges.get(eid)
        if e is None:
            out.append(Violation(f"edge:{eid}", "unknown edge", "not in graph"))
            continue
        for k in e.endpoints:
            if k not in sel.vertices:
                out.append(
                    Violation(f"edge:{eid}", "open incidence", f"endpoint {_vname(k)} not chosen")
                )
    return sorted(out)


def descend(mlg: MultiLayerGraph, v: Union[Vertex, VertexKey]) -> Vertex:
    """The unique vertex on the parent layer of ``v`` that realizes it."""
    key = v.key if isinstance(v, Vertex) else tuple(v)
    if key not in mlg.vertices:
        raise StructuralError(f"unknown vertex {_vname(key)}")
    if key[0] < 1:
        raise StructuralError(f"{_vname(key)} is on the bottom layer; nothing to descend to")
    below = [k for k in mlg.downward(key) if k[0] == parent_layer(key[0])]
    if len(below) != 1:
        raise StructuralError(
            f"{_vname(key)} has {len(below)} downward inter-layer edges, expected exactly 1"
        )
    return mlg.vertices[below[0]]
