"""Greedy marginal-cost construction."""

from __future__ import annotations

import logging
from collections import Counter

from mlgnet.exceptions import InfeasibleError
from mlgnet.graph import MultiLayerGraph
from mlgnet.instance import Instance
from mlgnet.optimizer.design import Design, Infeasible, Space, State
from mlgnet.routing import UnreachableTerminal, takahashi_matsuyama

log = logging.getLogger(__name__)


class RoutingFailure(Exception):
    def __init__(self, demand_id, element, message):
        self.demand_id = demand_id
        self.element = element
        super().__init__(message)


def _path_increment(space: Space, state: State, link_path, bw):
    inc = 0
    for link in link_path:
        load = state.links[link]
        after = space.link_cost(link, load + bw)
        if after is None:
            return None
        inc += after - space.link_cost(link, load)
    return inc


def _repath_increment(space: Space, state: State, eid: str, idx: int, bw):
    """Cost change of moving ``eid`` with its current traffic onto path ``idx``
    and adding ``bw`` on top."""
    cand = space.candidates[eid]
    old = state.choice[eid]
    if idx == old:
        return _path_increment(space, state, cand.link_paths[idx], bw)
    carried = state.edge_bandwidth(eid)
    delta = Counter()
    for link in cand.link_paths[old]:
        delta[link] -= carried
    for link in cand.link_paths[idx]:
        delta[link] += carried + bw
    inc = 0
    for link, change in delta.items():
        load = state.links[link]
        after = space.link_cost(link, load + change)
        if after is None:
            return None
        inc += after - space.link_cost(link, load)
    return inc


def route_demand(
    space: Space,
    state: State,
    demand_id: str,
    root=None,
    banned=frozenset(),
    free=frozenset(),
):
    """Route one demand on top of ``state`` at least marginal cost.

    Logical edge lengths are the exact cost increase of pushing the
    demand bandwidth over the edge's cheapest candidate path.  For an edge
    other demands already use, switching paths moves their traffic too,
    and that move is priced in; the current path wins ties.  Entering an LSR that is neither installed nor in ``free``
    costs its install cost.  ``banned`` LSRs are never used as transit.

    Returns ``(tree, choices)`` without modifying ``state``.

    Raises:
        RoutingFailure: no capacity-feasible tree was found.
    """
    d = space.demands[demand_id]
    bw = d.bandwidth
    terminals = set(d.terminals)

    def headroom(v):
        lim = space.limit[v]
        return None if lim is None else lim - state.thr[v]

    for t in sorted(terminals):
        h = headroom(t)
        if h is not None and h < bw:
            raise RoutingFailure(demand_id, t, f"LSR {t} lacks throughput for demand {demand_id}")

    blocked_edges = set()
    blocked_vertices = set(banned) - terminals
    for _ in range(len(space.candidates) + len(space.lsrs) + 1):
        lengths = {}
        choices = {}
        for eid, cand in space.candidates.items():
            if eid in blocked_edges:
                continue
            committed = state.choice.get(eid)
            best = None
            for i, lp in enumerate(cand.link_paths):
                if committed is None:
                    inc_i = _path_increment(space, state, lp, bw)
                else:
                    inc_i = _repath_increment(space, state, eid, i, bw)
                # the committed path wins ties so that settled edges stay put
                rank = (inc_i, i != committed, i) if inc_i is not None else None
                if rank is not None and (best is None or rank < best):
                    best = rank
            if best is None:
                inc, idx = None, None
            else:
                inc, _, idx = best
            if inc is not None:
                lengths[eid] = inc
                choices[eid] = idx

        def node_weight(v):
            if v in blocked_vertices:
                return None
            if v not in terminals:
                h = headroom(v)
                if h is not None and h < 2 * bw:
                    return None
            if v in state.installed or v in free:
                return 0
            return space.install[v]

        try:
            tree = takahashi_matsuyama(
                space.adj, terminals, lengths.get, node_weight, root or d.source
            )
        except UnreachableTerminal as exc:
            raise RoutingFailure(
                demand_id, exc.terminal, f"demand {demand_id}: terminal {exc.terminal} unreachable"
            ) from None

        trial = state.copy()
        trial.commit(demand_id, tree, choices)
        deg = Counter()
        for eid in tree:
            deg.update(space.candidates[eid].endpoints)
        over_link = next(
            (l for l in sorted(trial.links) if space.link_cost(l, trial.links[l]) is None),
            None,
        )
        if over_link is not None:
            users = sorted(e for e in tree if over_link in space.candidates[e].link_paths[choices[e]])
            blocked_edges.update(users[1:] if len(users) > 1 else users)
            log.debug("demand %s: link %s overflows, blocking %s", demand_id, over_link, users)
            continue
        over_v = next(
            (
                v
                for v in sorted(deg)
                if headroom(v) is not None and deg[v] * bw > headroom(v)
            ),
            None,
        )
        if over_v is not None:
            if over_v in terminals:
                at_v = sorted(e for e in tree if over_v in space.candidates[e].endpoints)
                blocked_edges.add(at_v[-1])
            else:
                blocked_vertices.add(over_v)
            continue
        return frozenset(tree), {e: choices[e] for e in tree}
    raise RoutingFailure(demand_id, None, f"demand {demand_id}: no capacity-feasible tree found")


def _repair(space: Space, state: State, did, banned, free):
    """Retry ``did`` after moving one settled logical edge to another path.

    Returns the cheapest repaired state, or ``None``.
    """
    best = None
    for eid in sorted(state.choice):
        for idx in range(len(space.candidates[eid].link_paths)):
            if idx == state.choice[eid]:
                continue
            trial = state.copy()
            trial.set_choice(eid, idx)
            if trial.cost() is None:
                continue
            try:
                tree, choices = route_demand(space, trial, did, banned=banned, free=free)
            except RoutingFailure:
                continue
            trial.commit(did, tree, choices)
            cost = trial.cost()
            if cost is not None and (best is None or cost < best[0]):
                best = (cost, trial)
    return None if best is None else best[1]


def route_all(space: Space, state: State, demand_ids, banned=frozenset(), free=frozenset()) -> State:
    """Route ``demand_ids`` in order onto ``state`` (mutated and returned).

    A demand that does not fit gets one repair attempt in which a single
    already-routed logical edge may switch to another candidate path.
    """
    for did in demand_ids:
        try:
            tree, choices = route_demand(space, state, did, banned=banned, free=free)
        except RoutingFailure:
            repaired = _repair(space, state, did, banned, free)
            if repaired is None:
                raise
            log.debug("demand %s routed after re-pathing a settled edge", did)
            state.__dict__.update(repaired.__dict__)
            continue
        state.commit(did, tree, choices)
    return state


def greedy_state(space: Space) -> State:
    state = State(space)
    try:
        route_all(space, state, space.order)
    except RoutingFailure as exc:
        raise InfeasibleError(
            Infeasible(str(exc), demand_id=exc.demand_id, element=exc.element, proven=False)
        ) from None
    return state


def greedy_construct(mlg: MultiLayerGraph, instance: Instance) -> Design:
    """Route demands by descending bandwidth, each at least marginal cost.

    LSRs and links are installed lazily: their costs enter the routing
    lengths only while unused.  Links are dimensioned with the minimal
    module count for their final load.

    Raises:
        InfeasibleError: some demand could not be routed.
    """
    space = Space(mlg, instance)
    return greedy_state(space).to_design(mode="greedy")
