"""First-improvement local search over three move types.

Moves:
    toggle  install or remove one LSR and reroute the demands it affects
    path    switch the transport path of one used logical edge
    reroot  reroute one demand, growing its tree from a chosen terminal
"""

from __future__ import annotations

import logging
import random
import time
from typing import Optional

from mlgnet.graph import MultiLayerGraph
from mlgnet.instance import Instance
from mlgnet.optimizer.design import Design, Space, State
from mlgnet.optimizer.greedy import RoutingFailure, route_all, route_demand

log = logging.getLogger(__name__)


def state_from_design(space: Space, design: Design) -> State:
    state = State(space)
    for r in design.routes:
        state.add_route(r.demand_id, r.logical_tree, r.path_choice)
    state.installed = set(design.installed)
    return state


def _toggle(space: Space, state: State, v: str) -> Optional[State]:
    new = state.copy()
    if v in state.installed:
        if v in space.terminal_set:
            return None
        affected = [
            did
            for did in space.order
            if did in state.trees
            and any(v in space.candidates[e].endpoints for e in state.trees[did])
        ]
        before = new.touched()
        for did in affected:
            new.remove_route(did)
        new.installed.discard(v)
        route_all(space, new, affected, banned={v})
        new.installed -= before - new.touched()
        return new
    new.installed.add(v)
    before = new.touched()
    for did in list(new.trees):
        new.remove_route(did)
    route_all(space, new, space.order, free={v})
    new.installed -= before - new.touched()
    return new


def _switch_path(space: Space, state: State, eid: str, idx: int) -> State:
    new = state.copy()
    new.set_choice(eid, idx)
    return new


def _reroot(space: Space, state: State, did: str, root: str) -> State:
    new = state.copy()
    before = new.touched()
    new.remove_route(did)
    tree, choices = route_demand(space, new, did, root=root)
    new.commit(did, tree, choices)
    new.installed -= before - new.touched()
    return new


def _moves(space: Space, state: State):
    moves = [("toggle", v) for v in space.lsrs]
    for eid in sorted(state.choice):
        for idx in range(len(space.candidates[eid].link_paths)):
            if idx != state.choice[eid]:
                moves.append(("path", eid, idx))
    for did in space.order:
        for root in space.demands[did].terminals:
            moves.append(("reroot", did, root))
    return moves


def _apply(space: Space, state: State, move) -> Optional[State]:
    kind = move[0]
    try:
        if kind == "toggle":
            return _toggle(space, state, move[1])
        if kind == "path":
            return _switch_path(space, state, move[1], move[2])
        return _reroot(space, state, move[1], move[2])
    except RoutingFailure:
        return None


def improve(space: Space, state: State, budget: int, rng_seed: int, time_limit=None):
    """Run local search on ``state``; returns ``(state, evaluations)``."""
    rng = random.Random(rng_seed)
    cost = state.cost()
    if cost is None:
        raise ValueError("local search needs a feasible seed design")
    evaluations = 0
    deadline = None if time_limit is None else time.monotonic() + time_limit
    improved = True
    while improved and evaluations < budget:
        improved = False
        moves = _moves(space, state)
        rng.shuffle(moves)
        for move in moves:
            if evaluations >= budget:
                break
            if deadline is not None and time.monotonic() > deadline:
                return state, evaluations
            evaluations += 1
            cand = _apply(space, state, move)
            if cand is None:
                continue
            c = cand.cost()
            if c is not None and c < cost:
                log.debug("move %s: cost %d -> %d", move, cost, c)
                state, cost = cand, c
                improved = True
                break
    return state, evaluations


def local_search(
    mlg: MultiLayerGraph,
    instance: Instance,
    seed_design: Design,
    budget: int,
    rng_seed: int = 0,
    time_limit=None,
) -> Design:
    """Improve a feasible design; the returned cost never exceeds the seed's.

    ``budget`` caps the number of evaluated moves.  The search stops
    early at a local optimum (a full pass without improvement).
    """
    if budget <= 0:
        return seed_design
    space = Space(mlg, instance)
    state = state_from_design(space, seed_design)
    state, evaluations = improve(space, state, budget, rng_seed, time_limit)
    design = state.to_design(**dict(seed_design.meta))
    if design.cost >= seed_design.cost:
        return seed_design.with_meta(ls_evaluations=evaluations)
    return design.with_meta(mode="ls", ls_evaluations=evaluations)
