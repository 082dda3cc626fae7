"""Design representation, cost model and the mutable search state."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional

from mlgnet.exceptions import StructuralError
from mlgnet.graph import (
    FIRST_FLOW_LAYER,
    LOGICAL,
    TRANSPORT,
    EdgeKind,
    MultiLayerGraph,
    Selection,
)
from mlgnet.instance import Instance
from mlgnet.routing import LoadMap, MulticastRoute, map_down, modules_needed
from mlgnet.synthesis import logical_candidates


@dataclass(frozen=True)
class Infeasible:
    """Why no design exists (or none was found).

    ``proven`` is True when the reason is a certificate (an uncoverable
    demand or a capacity that every design violates) rather than a
    heuristic giving up.
    """

    message: str
    demand_id: Optional[str] = None
    element: Optional[str] = None
    proven: bool = False


@dataclass(frozen=True)
class Design:
    """A selected subgraph with routes, dimensioning and cost.

    ``dimensioning`` maps transport edge ids to module counts (only
    links with at least one module appear).  ``meta`` holds solver
    bookkeeping and is ignored by equality.
    """

    selection: Selection
    routes: tuple
    dimensioning: Mapping
    cost: int
    installed: frozenset
    meta: Mapping = field(default_factory=dict, compare=False)

    def route(self, demand_id: str) -> MulticastRoute:
        for r in self.routes:
            if r.demand_id == demand_id:
                return r
        raise KeyError(demand_id)

    @property
    def path_choice(self) -> dict:
        out = {}
        for r in self.routes:
            out.update(r.path_choice)
        return dict(sorted(out.items()))

    def key(self) -> tuple:
        """Canonical comparable encoding used for deterministic tie-breaks."""
        return (
            tuple(sorted(self.installed)),
            tuple((r.demand_id, tuple(sorted(r.logical_tree))) for r in self.routes),
            tuple(self.path_choice.items()),
        )

    def encoding(self) -> str:
        installed, trees, choice = self.key()
        return json.dumps(
            {
                "installed": list(installed),
                "trees": {d: list(t) for d, t in trees},
                "paths": dict(choice),
                "modules": dict(sorted(self.dimensioning.items())),
            },
            sort_keys=True,
            separators=(",", ":"),
        )

    def with_meta(self, **meta) -> "Design":
        merged = dict(self.meta)
        merged.update(meta)
        return Design(self.selection, self.routes, self.dimensioning, self.cost, self.installed, merged)


class Space:
    """Indexed, read-only view of a synthesized graph used by the solvers."""

    def __init__(self, mlg: MultiLayerGraph, instance: Instance):
        self.mlg = mlg
        self.instance = instance
        self.candidates = mlg.memo("logical_candidates", logical_candidates)
        self.lsrs = [v.id for v in mlg.vertices_on(LOGICAL)]
        self.install = {v.id: v.node_cost for v in mlg.vertices_on(LOGICAL)}
        self.limit = {v.id: v.throughput_limit for v in mlg.vertices_on(LOGICAL)}
        self.links = {e.id: e for e in mlg.intra_edges(TRANSPORT)}
        self.adj = {v: [] for v in self.lsrs}
        for eid, c in sorted(self.candidates.items()):
            self.adj[c.a].append((c.b, eid))
            self.adj[c.b].append((c.a, eid))
        for v in self.adj:
            self.adj[v].sort()
        self.demands = {d.id: d for d in instance.demands}
        self.order = [d.id for d in sorted(instance.demands, key=lambda d: (-d.bandwidth, d.id))]
        self.terminal_set = set()
        for d in instance.demands:
            self.terminal_set.update(d.terminals)

    def link_cost(self, link: str, load: int) -> Optional[int]:
        """Cost of carrying ``load`` on a link, ``None`` if it cannot fit."""
        if load <= 0:
            return 0
        e = self.links[link]
        n = modules_needed(load, e.module_size)
        if e.max_modules is not None and n > e.max_modules:
            return None
        return e.weight + n * e.module_cost

    def headroom(self, lsr: str, used: int) -> Optional[int]:
        lim = self.limit[lsr]
        return None if lim is None else lim - used


class State:
    """Mutable partial design: installed LSRs, trees, path choices, loads."""

    def __init__(self, space: Space):
        self.space = space
        self.installed = set()
        self.trees = {}
        self.choice = {}
        self.links = Counter()
        self.thr = Counter()
        self.edge_use = Counter()

    def copy(self) -> "State":
        s = State.__new__(State)
        s.space = self.space
        s.installed = set(self.installed)
        s.trees = dict(self.trees)
        s.choice = dict(self.choice)
        s.links = Counter(self.links)
        s.thr = Counter(self.thr)
        s.edge_use = Counter(self.edge_use)
        return s

    def touched(self) -> set:
        out = set()
        for did, tree in self.trees.items():
            out.update(self.space.demands[did].terminals)
            for eid in tree:
                out.update(self.space.candidates[eid].endpoints)
        return out

    def add_route(self, demand_id: str, tree, choices: Mapping) -> None:
        sp = self.space
        d = sp.demands[demand_id]
        bw = d.bandwidth
        for eid in tree:
            if eid not in self.choice:
                self.choice[eid] = choices[eid]
            cand = sp.candidates[eid]
            for link in cand.link_paths[self.choice[eid]]:
                self.links[link] += bw
            self.thr[cand.a] += bw
            self.thr[cand.b] += bw
            self.edge_use[eid] += 1
        self.trees[demand_id] = frozenset(tree)
        self.installed.update(d.terminals)
        for eid in tree:
            self.installed.update(sp.candidates[eid].endpoints)

    def remove_route(self, demand_id: str) -> frozenset:
        sp = self.space
        bw = sp.demands[demand_id].bandwidth
        tree = self.trees.pop(demand_id)
        for eid in tree:
            cand = sp.candidates[eid]
            for link in cand.link_paths[self.choice[eid]]:
                self.links[link] -= bw
            self.thr[cand.a] -= bw
            self.thr[cand.b] -= bw
            self.edge_use[eid] -= 1
            if self.edge_use[eid] == 0:
                del self.edge_use[eid]
                del self.choice[eid]
        return tree

    def set_choice(self, eid: str, idx: int) -> None:
        """Move every demand on ``eid`` to candidate path ``idx``."""
        sp = self.space
        old = self.choice[eid]
        if old == idx:
            return
        bw_total = self.edge_bandwidth(eid)
        for link in sp.candidates[eid].link_paths[old]:
            self.links[link] -= bw_total
        for link in sp.candidates[eid].link_paths[idx]:
            self.links[link] += bw_total
        self.choice[eid] = idx

    def commit(self, demand_id: str, tree, choices: Mapping) -> None:
        """Re-path edges whose choice differs, then add the route."""
        for eid in sorted(tree):
            if eid in self.choice and self.choice[eid] != choices[eid]:
                self.set_choice(eid, choices[eid])
        self.add_route(demand_id, tree, choices)

    def edge_bandwidth(self, eid: str) -> int:
        return sum(
            self.space.demands[did].bandwidth for did, tree in self.trees.items() if eid in tree
        )

    def cost(self) -> Optional[int]:
        """Objective value, or ``None`` when a capacity is exceeded."""
        sp = self.space
        for v, used in self.thr.items():
            if used > 0 and sp.limit[v] is not None and used > sp.limit[v]:
                return None
        total = sum(sp.install[v] for v in self.installed)
        for link, load in self.links.items():
            c = sp.link_cost(link, load)
            if c is None:
                return None
            total += c
        return total

    def to_design(self, **meta) -> Design:
        return build_design(self.space, self.installed, self.trees, self.choice, **meta)


def build_design(space: Space, installed, trees: Mapping, choice: Mapping, **meta) -> Design:
    """Assemble a :class:`Design` (selection, dimensioning, cost) from raw parts."""
    mlg = space.mlg
    routes = []
    for did in sorted(space.demands):
        tree = frozenset(trees.get(did, ()))
        routes.append(MulticastRoute(did, tree, {e: choice[e] for e in tree}))

    loads = Counter()
    for r in routes:
        bw = space.demands[r.demand_id].bandwidth
        for eid in r.logical_tree:
            for link in space.candidates[eid].link_paths[r.path_choice[eid]]:
                loads[link] += bw
    dimensioning = {
        link: modules_needed(load, space.links[link].module_size)
        for link, load in sorted(loads.items())
        if load > 0
    }

    vertices = set()
    edges = set()
    for v in installed:
        vertices.add((LOGICAL, v))
        vertices.add((TRANSPORT, v))
        edges.add(f"x/{LOGICAL}/{v}")
    used_edges = set()
    for r in routes:
        used_edges |= r.logical_tree
    for eid in used_edges:
        edges.add(eid)
        cand = space.candidates[eid]
        idx = choice[eid]
        for node in cand.candidate_paths[idx]:
            vertices.add((TRANSPORT, node))
        edges.update(cand.link_paths[idx])
    for i, d in enumerate(space.instance.demands):
        layer = FIRST_FLOW_LAYER + i
        tree = frozenset(trees.get(d.id, ()))
        for t in d.terminals:
            vertices.add((layer, t))
            edges.add(f"x/{layer}/{t}")
        terms = set(d.terminals)
        for eid in tree:
            cand = space.candidates[eid]
            if cand.a in terms and cand.b in terms:
                fe = f"f/{d.id}/{cand.a}|{cand.b}"
                if fe in mlg.edges:
                    edges.add(fe)
    selection = Selection(frozenset(vertices), frozenset(edges))
    design = Design(selection, tuple(routes), dimensioning, 0, frozenset(installed), dict(meta))
    return Design(
        selection, design.routes, dimensioning, objective(mlg, design), design.installed, dict(meta)
    )


def objective(mlg: MultiLayerGraph, design: Design) -> int:
    """Equipment cost of installed LSRs plus cost of every used transport link.

    A used link costs its fixed cost plus module count times module cost.

    Raises:
        StructuralError: the design references unknown elements, invalid
            path indices, inconsistent path choices or uninstalled LSRs.
    """
    candidates = mlg.memo("logical_candidates", logical_candidates)
    choice = {}
    for r in design.routes:
        if set(r.path_choice) != set(r.logical_tree):
            raise StructuralError(f"route {r.demand_id}: path choices do not match tree edges")
        for eid in r.logical_tree:
            cand = candidates.get(eid)
            if cand is None:
                raise StructuralError(f"route {r.demand_id}: unknown logical edge {eid!r}")
            idx = r.path_choice[eid]
            if not 0 <= idx < len(cand.link_paths):
                raise StructuralError(f"route {r.demand_id}: bad path index {idx} on {eid}")
            if choice.setdefault(eid, idx) != idx:
                raise StructuralError(f"logical edge {eid} uses two different transport paths")
            for v in cand.endpoints:
                if v not in design.installed:
                    raise StructuralError(f"route {r.demand_id} crosses uninstalled LSR {v!r}")
    total = 0
    for v in sorted(design.installed):
        vertex = mlg.vertices.get((LOGICAL, v))
        if vertex is None:
            raise StructuralError(f"{v!r} is not an LSR candidate")
        total += vertex.node_cost
    for link, count in sorted(design.dimensioning.items()):
        e = mlg.edges.get(link)
        if e is None or e.kind is not EdgeKind.INTRA or e.u[0] != TRANSPORT:
            raise StructuralError(f"{link!r} is not a transport link")
        if count < 0:
            raise StructuralError(f"negative module count on {link}")
        if count > 0:
            total += e.weight + count * e.module_cost
    return total


def design_load(mlg: MultiLayerGraph, instance: Instance, design: Design) -> LoadMap:
    """Total load of a design, summed from per-demand deltas."""
    total = LoadMap()
    for r in design.routes:
        total = total + map_down(r, mlg, instance.demand(r.demand_id))
    return total
