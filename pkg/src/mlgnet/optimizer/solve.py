from __future__ import annotations

import logging
from typing import Optional

from mlgnet.config import Mode, SolverConfig
from mlgnet.exceptions import InfeasibleError
from mlgnet.graph import MultiLayerGraph
from mlgnet.instance import Instance
from mlgnet.optimizer.design import Design, Infeasible, Space
from mlgnet.optimizer.exact import check_limits, exact_bruteforce
from mlgnet.optimizer.greedy import greedy_construct
from mlgnet.optimizer.local_search import local_search

log = logging.getLogger(__name__)


def certify(mlg: MultiLayerGraph, instance: Instance) -> Optional[Infeasible]:
    """Cheap proof of infeasibility, if one exists.

    A demand is uncoverable when some sink cannot be reached from the
    source through logical edges that have a candidate path whose every
    link can carry the demand bandwidth, using only LSRs whose throughput
    limit admits it (bandwidth for terminals, twice that for transit).
    """
    space = Space(mlg, instance)
    for d in instance.demands:
        bw = d.bandwidth
        terminals = set(d.terminals)
        for t in sorted(terminals):
            lim = space.limit[t]
            if lim is not None and lim < bw:
                return Infeasible(
                    f"LSR {t} throughput limit {lim} is below demand {d.id} bandwidth {bw}",
                    demand_id=d.id,
                    element=t,
                    proven=True,
                )

        def usable_vertex(v):
            lim = space.limit[v]
            return v in terminals or lim is None or lim >= 2 * bw

        def usable_edge(cand):
            return any(
                all(
                    space.links[l].max_modules is None
                    or space.links[l].capacity >= bw
                    for l in lp
                )
                for lp in cand.link_paths
            )

        reach = {d.source}
        frontier = [d.source]
        while frontier:
            v = frontier.pop()
            if v not in terminals and v != d.source and not usable_vertex(v):
                continue
            for nbr, eid in space.adj[v]:
                if nbr in reach or not usable_vertex(nbr):
                    continue
                if usable_edge(space.candidates[eid]):
                    reach.add(nbr)
                    frontier.append(nbr)
        missing = sorted(terminals - reach)
        if missing:
            return Infeasible(
                f"demand {d.id}: sink {missing[0]} is cut off from source {d.source}; "
                f"no candidate path offers {bw} units on every link",
                demand_id=d.id,
                element=missing[0],
                proven=True,
            )
    return None


def solve(mlg: MultiLayerGraph, instance: Instance, cfg: SolverConfig = SolverConfig()) -> Design:
    """Minimum-cost design for ``instance`` over its synthesized graph ``mlg``.

    Raises:
        InfeasibleError: a certificate proves infeasibility, or the chosen
            mode found no feasible design.
        LimitsExceededError: exact mode on an oversized instance.
    """
    mode = Mode.parse(cfg.mode)
    if mode is Mode.EXACT:
        check_limits(mlg, instance, cfg.limits)
    cert = certify(mlg, instance)
    if cert is not None:
        raise InfeasibleError(cert)

    if mode is Mode.EXACT:
        try:
            incumbent = greedy_construct(mlg, instance)
        except InfeasibleError:
            incumbent = None
        design = exact_bruteforce(mlg, instance, cfg.limits, incumbent=incumbent)
    else:
        design = greedy_construct(mlg, instance)
        if mode is Mode.LOCAL_SEARCH:
            design = local_search(
                mlg, instance, design, cfg.local_search_budget, cfg.rng_seed, cfg.time_limit
            )
    log.info("solved %s in mode %s: cost %d", instance.name, mode.value, design.cost)
    return design.with_meta(mode=mode.value, seed=cfg.rng_seed)
