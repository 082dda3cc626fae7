"""Exhaustive search for the minimum-cost design at desk scale.

The candidate space is every combination of one Steiner tree per demand
over the logical layer and one candidate transport path per used logical
edge.  The installed LSRs are exactly the vertices the trees touch: an
installed but unused LSR can only add cost.  Trees with a non-terminal
leaf are skipped for the same reason.  Partial costs never decrease as
the search descends, so branches costing more than the incumbent are cut.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from typing import Optional

from mlgnet.config import ExactLimits
from mlgnet.exceptions import InfeasibleError, LimitsExceededError
from mlgnet.graph import MultiLayerGraph
from mlgnet.instance import Instance
from mlgnet.optimizer.design import Design, Infeasible, Space, build_design

log = logging.getLogger(__name__)


def problem_size(mlg: MultiLayerGraph, instance: Instance) -> dict:
    return {
        "max_lsr_candidates": len(instance.lsr_candidates),
        "max_demands": len(instance.demands),
        "max_k_paths": instance.policy.k_paths,
    }


def check_limits(mlg: MultiLayerGraph, instance: Instance, limits: ExactLimits) -> None:
    sizes = problem_size(mlg, instance)
    bounds = {
        "max_lsr_candidates": limits.max_lsr_candidates,
        "max_demands": limits.max_demands,
        "max_k_paths": limits.max_k_paths,
    }
    if any(sizes[k] > bounds[k] for k in bounds):
        raise LimitsExceededError(sizes, bounds)


def _spanning_trees(vertices, edges):
    """All spanning trees of the graph ``(vertices, edges)`` as edge tuples."""
    n = len(vertices)
    if n == 1:
        yield ()
        return
    need = n - 1

    def find(parent, x):
        while parent[x] != x:
            x = parent[x]
        return x

    def rec(i, parent, chosen):
        if len(chosen) == need:
            yield tuple(chosen)
            return
        if len(chosen) + (len(edges) - i) < need:
            return
        eid, a, b = edges[i]
        ra, rb = find(parent, a), find(parent, b)
        if ra != rb:
            p2 = dict(parent)
            p2[ra] = rb
            chosen.append(eid)
            yield from rec(i + 1, p2, chosen)
            chosen.pop()
        yield from rec(i + 1, parent, chosen)

    yield from rec(0, {v: v for v in vertices}, [])


def steiner_trees(space: Space, terminals, bandwidth: int = 0):
    """Every tree over the logical layer spanning ``terminals`` whose leaves
    are all terminals, skipping trees no LSR throughput limit can carry."""
    terminals = sorted(set(terminals))
    others = [v for v in space.lsrs if v not in terminals]
    out = []
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            verts = set(terminals) | set(extra)
            edges = [
                (eid, c.a, c.b)
                for eid, c in sorted(space.candidates.items())
                if c.a in verts and c.b in verts
            ]
            for tree in _spanning_trees(sorted(verts), edges):
                deg = Counter()
                for eid in tree:
                    c = space.candidates[eid]
                    deg[c.a] += 1
                    deg[c.b] += 1
                if any(deg[v] < 2 for v in extra):
                    continue
                if any(
                    space.limit[v] is not None and deg[v] * bandwidth > space.limit[v]
                    for v in deg
                ):
                    continue
                out.append(tuple(tree))
    return out


class _Search:
    def __init__(self, space: Space, incumbent: Optional[Design]):
        self.sp = space
        self.order = list(space.order)
        self.trees = {
            did: steiner_trees(space, space.demands[did].terminals, space.demands[did].bandwidth)
            for did in self.order
        }
        self.links = Counter()
        self.link_cost = {}
        self.link_total = 0
        self.thr = Counter()
        self.vref = Counter()
        self.install_total = 0
        self.choice = {}
        self.eref = Counter()
        self.chosen_trees = {}
        self.best_cost = None
        self.best_key = None
        self.best = None
        self.nodes = 0
        self.leaves = 0
        if incumbent is not None:
            self.best_cost = incumbent.cost
            self.best_key = incumbent.key()
            self.best = (
                set(incumbent.installed),
                {r.demand_id: r.logical_tree for r in incumbent.routes},
                incumbent.path_choice,
            )

    def partial(self) -> int:
        return self.install_total + self.link_total

    def _pruned(self) -> bool:
        return self.best_cost is not None and self.partial() > self.best_cost

    def run(self):
        self._demand(0)

    def _leaf(self):
        self.leaves += 1
        cost = self.partial()
        installed = tuple(sorted(v for v, n in self.vref.items() if n > 0))
        key = (
            installed,
            tuple(
                (did, tuple(sorted(self.chosen_trees[did])))
                for did in sorted(self.chosen_trees)
            ),
            tuple(sorted(self.choice.items())),
        )
        if self.best_cost is None or cost < self.best_cost or (
            cost == self.best_cost and key < self.best_key
        ):
            self.best_cost = cost
            self.best_key = key
            self.best = (set(installed), dict(self.chosen_trees), dict(self.choice))

    def _demand(self, i):
        self.nodes += 1
        if i == len(self.order):
            self._leaf()
            return
        did = self.order[i]
        d = self.sp.demands[did]
        bw = d.bandwidth
        for tree in self.trees[did]:
            deg = Counter()
            for eid in tree:
                c = self.sp.candidates[eid]
                deg[c.a] += 1
                deg[c.b] += 1
            if any(
                self.sp.limit[v] is not None and self.thr[v] + n * bw > self.sp.limit[v]
                for v, n in deg.items()
            ):
                continue
            touched = set(d.terminals) | set(deg)
            for v in touched:
                if self.vref[v] == 0:
                    self.install_total += self.sp.install[v]
                self.vref[v] += 1
            for v, n in deg.items():
                self.thr[v] += n * bw
            self.chosen_trees[did] = tree
            if not self._pruned():
                self._edges(i, tree, 0, bw)
            del self.chosen_trees[did]
            for v, n in deg.items():
                self.thr[v] -= n * bw
            for v in touched:
                self.vref[v] -= 1
                if self.vref[v] == 0:
                    self.install_total -= self.sp.install[v]

    def _push(self, link_path, bw) -> bool:
        ok = True
        for link in link_path:
            self.links[link] += bw
            new = self.sp.link_cost(link, self.links[link])
            if new is None:
                ok = False
                new = 0
            self.link_total += new - self.link_cost.get(link, 0)
            self.link_cost[link] = new
        return ok

    def _pop(self, link_path, bw):
        for link in link_path:
            self.links[link] -= bw
            new = self.sp.link_cost(link, self.links[link])
            self.link_total += new - self.link_cost.get(link, 0)
            self.link_cost[link] = new

    def _edges(self, i, tree, pos, bw):
        if pos == len(tree):
            self._demand(i + 1)
            return
        eid = tree[pos]
        cand = self.sp.candidates[eid]
        if eid in self.choice:
            options = [self.choice[eid]]
        else:
            options = range(len(cand.link_paths))
        for idx in options:
            fresh = eid not in self.choice
            if fresh:
                self.choice[eid] = idx
            self.eref[eid] += 1
            lp = cand.link_paths[idx]
            if self._push(lp, bw) and not self._pruned():
                self._edges(i, tree, pos + 1, bw)
            self._pop(lp, bw)
            self.eref[eid] -= 1
            if fresh:
                del self.choice[eid]


def exact_bruteforce(
    mlg: MultiLayerGraph,
    instance: Instance,
    limits: ExactLimits = ExactLimits(),
    incumbent: Optional[Design] = None,
) -> Design:
    """Globally minimum-cost design over the synthesized candidate space.

    Ties are broken by the smallest design encoding.  ``incumbent`` (any
    feasible design of the same space) only tightens pruning.

    Raises:
        LimitsExceededError: the instance is larger than ``limits``.
        InfeasibleError: no feasible design exists in the candidate space.
    """
    check_limits(mlg, instance, limits)
    space = Space(mlg, instance)
    search = _Search(space, incumbent)
    search.run()
    log.info("exact search: %d nodes, %d leaves", search.nodes, search.leaves)
    if search.best is None:
        raise InfeasibleError(
            Infeasible(
                "exhaustive search found no capacity-feasible design",
                demand_id=space.order[0] if space.order else None,
                proven=True,
            )
        )
    installed, trees, choice = search.best
    return build_design(
        space, installed, trees, choice, mode="exact", explored=search.leaves
    )
