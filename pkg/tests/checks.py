"""Structural checks on returned designs, written against the graph data only."""

from mlgnet.graph import LOGICAL, TRANSPORT, EdgeKind, descend
from mlgnet.optimizer import design_load
from mlgnet.routing import check_capacity

from oracles import price_design


def selected_logical_edges(mlg, design):
    return sorted(
        eid
        for eid in design.selection.edges
        if mlg.edges[eid].kind is EdgeKind.INTRA and mlg.edges[eid].u[0] == LOGICAL
    )


def layer_mapping_problems(mlg, design):
    """Selected logical edges that are not carried by a selected transport path.

    The chosen path must start and end at the transport images of the
    logical endpoints and every hop must be a selected transport edge.
    """
    problems = []
    sel = design.selection
    choice = design.path_choice
    for eid in selected_logical_edges(mlg, design):
        e = mlg.edges[eid]
        if eid not in choice:
            problems.append(f"{eid}: no path chosen")
            continue
        path = e.paths[choice[eid]]
        ends = {descend(mlg, e.u).id, descend(mlg, e.v).id}
        if {path[0], path[-1]} != ends:
            problems.append(f"{eid}: path {path} does not join {sorted(ends)}")
        for x, y in zip(path, path[1:]):
            te = mlg.edge_between((TRANSPORT, x), (TRANSPORT, y))
            if te is None or te.id not in sel.edges:
                problems.append(f"{eid}: hop {x}-{y} not selected")
            if (TRANSPORT, x) not in sel.vertices or (TRANSPORT, y) not in sel.vertices:
                problems.append(f"{eid}: hop {x}-{y} endpoint not selected")
        for key in e.endpoints:
            if key not in sel.vertices:
                problems.append(f"{eid}: endpoint {key} not selected")
    for r in design.routes:
        if set(r.logical_tree) - set(selected_logical_edges(mlg, design)):
            problems.append(f"{r.demand_id}: tree edge missing from selection")
    return problems


def capacity_ok(mlg, instance, design):
    return check_capacity(design_load(mlg, instance, design), mlg, design.dimensioning).feasible


def independent_price(mlg, instance, design):
    """Cost of ``design`` recomputed by the oracle pricing routine."""
    trees = {}
    path_of = {}
    choice = design.path_choice
    for r in design.routes:
        pairs = []
        for eid in r.logical_tree:
            e = mlg.edges[eid]
            pair = (e.u[1], e.v[1])
            pairs.append(pair)
            path_of[pair] = mlg.edges[eid].paths[choice[eid]]
        trees[r.demand_id] = pairs
    cost, _, thr = price_design(instance, design.installed, trees, path_of)
    for v, used in thr.items():
        limit = instance.node(v).throughput_limit
        if limit is not None and used > limit:
            return None
    return cost
