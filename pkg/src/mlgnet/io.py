"""Instance files, design reports and DOT export.

Instance files are JSON documents with the sections ``meta`` (``name``,
``version``), ``nodes``, ``links``, ``demands``, ``policy`` and
``solver``.  Unknown fields are rejected.  ``serialize_instance`` writes
the canonical form, so parse/serialize round-trips are exact.
"""

from __future__ import annotations

import json
from typing import Optional, Union

from mlgnet.config import Mode, SolverConfig
from mlgnet.exceptions import InstanceError
from mlgnet.graph import LOGICAL
from mlgnet.instance import (
    FULL_MESH,
    CandidatePolicy,
    Demand,
    Instance,
    TransportLink,
    TransportNode,
    check_instance,
)
from mlgnet.optimizer.design import Design
from mlgnet.synthesis import logical_candidates

FORMAT_VERSION = 1
REPORT_FORMAT = "mlgnet-design-report"
REQUIRED = object()

_NODE_FIELDS = {"id": REQUIRED, "lsr_candidate": False, "lsr_install_cost": 0, "throughput_limit": None}
_LINK_FIELDS = {
    "id": REQUIRED,
    "a": REQUIRED,
    "b": REQUIRED,
    "fixed_cost": 0,
    "module_size": REQUIRED,
    "module_cost": 0,
    "max_modules": 1,
}
_DEMAND_FIELDS = {"id": REQUIRED, "source": REQUIRED, "sinks": REQUIRED, "bandwidth": REQUIRED}
_POLICY_FIELDS = {
    "k_paths": 1,
    "max_logical_degree": None,
    "logical_edge_rule": FULL_MESH,
    "hop_limit": None,
}
_SOLVER_FIELDS = {"mode": "greedy", "seed": 0, "budget": 200, "time_limit": None}
_TOP_FIELDS = ("meta", "nodes", "links", "demands", "policy", "solver")


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise InstanceError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _record(obj, fields: dict, location: str) -> dict:
    if not isinstance(obj, dict):
        raise InstanceError(f"expected an object, got {type(obj).__name__}", location)
    unknown = sorted(set(obj) - set(fields))
    if unknown:
        raise InstanceError(f"unknown field {unknown[0]!r}", f"{location}.{unknown[0]}")
    out = {}
    for key, default in fields.items():
        if key in obj:
            out[key] = obj[key]
        elif default is REQUIRED:
            raise InstanceError(f"missing required field {key!r}", f"{location}.{key}")
        else:
            out[key] = default
    return out


def _string(value, location):
    if not isinstance(value, str) or not value:
        raise InstanceError(f"expected a non-empty string, got {value!r}", location)
    return value


def _list(value, location):
    if not isinstance(value, list):
        raise InstanceError(f"expected a list, got {type(value).__name__}", location)
    return value


def instance_from_dict(doc) -> Instance:
    """Build and validate an :class:`Instance` from a decoded document."""
    if not isinstance(doc, dict):
        raise InstanceError("top level must be an object")
    unknown = sorted(set(doc) - set(_TOP_FIELDS))
    if unknown:
        raise InstanceError(f"unknown section {unknown[0]!r}", unknown[0])
    for key in ("meta", "nodes", "links"):
        if key not in doc:
            raise InstanceError(f"missing section {key!r}", key)

    meta = doc["meta"]
    if not isinstance(meta, dict):
        raise InstanceError("expected an object", "meta")
    extra = sorted(set(meta) - {"name", "version"})
    if extra:
        raise InstanceError(f"unknown field {extra[0]!r}", f"meta.{extra[0]}")
    if "version" not in meta:
        raise InstanceError("missing required field 'version'", "meta.version")
    if meta["version"] != FORMAT_VERSION:
        raise InstanceError(
            f"unsupported version {meta['version']!r} (expected {FORMAT_VERSION})", "meta.version"
        )
    name = meta.get("name", "")
    if not isinstance(name, str):
        raise InstanceError("expected a string", "meta.name")

    nodes = []
    for i, raw in enumerate(_list(doc["nodes"], "nodes")):
        loc = f"nodes[{i}]"
        r = _record(raw, _NODE_FIELDS, loc)
        if not isinstance(r["lsr_candidate"], bool):
            raise InstanceError("expected true or false", f"{loc}.lsr_candidate")
        nodes.append(
            TransportNode(
                _string(r["id"], f"{loc}.id"),
                r["lsr_candidate"],
                r["lsr_install_cost"],
                r["throughput_limit"],
            )
        )

    links = []
    for i, raw in enumerate(_list(doc["links"], "links")):
        loc = f"links[{i}]"
        r = _record(raw, _LINK_FIELDS, loc)
        links.append(
            TransportLink(
                _string(r["id"], f"{loc}.id"),
                _string(r["a"], f"{loc}.a"),
                _string(r["b"], f"{loc}.b"),
                r["fixed_cost"],
                r["module_size"],
                r["module_cost"],
                r["max_modules"],
            )
        )

    demands = []
    for i, raw in enumerate(_list(doc.get("demands", []), "demands")):
        loc = f"demands[{i}]"
        r = _record(raw, _DEMAND_FIELDS, loc)
        sinks = _list(r["sinks"], f"{loc}.sinks")
        for j, s in enumerate(sinks):
            _string(s, f"{loc}.sinks[{j}]")
        did = _string(r["id"], f"{loc}.id")
        source = _string(r["source"], f"{loc}.source")
        if source in sinks:
            raise InstanceError(f"demand {did!r} has source {source!r} among its sinks", f"{loc}.sinks")
        if len(set(sinks)) != len(sinks):
            raise InstanceError(f"demand {did!r} lists a sink twice", f"{loc}.sinks")
        demands.append(Demand(did, source, tuple(sinks), r["bandwidth"]))

    p = _record(doc.get("policy", {}), _POLICY_FIELDS, "policy")
    policy = CandidatePolicy(p["k_paths"], p["max_logical_degree"], p["logical_edge_rule"], p["hop_limit"])

    s = _record(doc.get("solver", {}), _SOLVER_FIELDS, "solver")
    for key in ("seed", "budget"):
        if isinstance(s[key], bool) or not isinstance(s[key], int):
            raise InstanceError("expected an integer", f"solver.{key}")
    if s["time_limit"] is not None and (
        isinstance(s["time_limit"], bool) or not isinstance(s["time_limit"], (int, float))
    ):
        raise InstanceError("expected a number or null", "solver.time_limit")
    try:
        solver = SolverConfig(Mode.parse(s["mode"]), s["budget"], s["seed"], s["time_limit"])
    except ValueError as exc:
        raise InstanceError(str(exc), "solver") from None

    instance = Instance(name, nodes, links, demands, policy, solver, version=meta["version"])
    return check_instance(instance)


def parse_instance(data: Union[bytes, str]) -> Instance:
    """Parse an instance document.

    Raises:
        InstanceError: syntax error (with line number), schema violation or
            instance invariant violation (with field location).
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InstanceError(f"not UTF-8 text: {exc}") from None
    try:
        doc = json.loads(data, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"syntax error: {exc.msg}", line=exc.lineno) from None
    return instance_from_dict(doc)


def load_instance(path) -> Instance:
    with open(path, "rb") as fh:
        return parse_instance(fh.read())


def instance_to_dict(instance: Instance) -> dict:
    return {
        "meta": {"name": instance.name, "version": instance.version},
        "nodes": [
            {
                "id": n.id,
                "lsr_candidate": n.lsr_candidate,
                "lsr_install_cost": n.lsr_install_cost,
                "throughput_limit": n.throughput_limit,
            }
            for n in instance.nodes
        ],
        "links": [
            {
                "id": l.id,
                "a": l.a,
                "b": l.b,
                "fixed_cost": l.fixed_cost,
                "module_size": l.module_size,
                "module_cost": l.module_cost,
                "max_modules": l.max_modules,
            }
            for l in instance.links
        ],
        "demands": [
            {"id": d.id, "source": d.source, "sinks": list(d.sinks), "bandwidth": d.bandwidth}
            for d in instance.demands
        ],
        "policy": {
            "k_paths": instance.policy.k_paths,
            "max_logical_degree": instance.policy.max_logical_degree,
            "logical_edge_rule": instance.policy.logical_edge_rule,
            "hop_limit": instance.policy.hop_limit,
        },
        "solver": {
            "mode": instance.solver.mode.value,
            "seed": instance.solver.rng_seed,
            "budget": instance.solver.local_search_budget,
            "time_limit": instance.solver.time_limit,
        },
    }


def serialize_instance(instance: Instance) -> bytes:
    return (json.dumps(instance_to_dict(instance), indent=2) + "\n").encode("utf-8")


# -- reports -------------------------------------------------------------------


def report_dict(design: Design, instance: Instance, mlg, reference_cost: Optional[int] = None) -> dict:
    """Machine-readable report covering both network levels."""
    cands = mlg.memo("logical_candidates", logical_candidates)
    choice = design.path_choice
    logical_load = {}
    link_load = {}
    throughput = dict.fromkeys(sorted(design.installed), 0)
    for r in design.routes:
        bw = instance.demand(r.demand_id).bandwidth
        for eid in r.logical_tree:
            c = cands[eid]
            logical_load[eid] = logical_load.get(eid, 0) + bw
            for link in c.link_paths[choice[eid]]:
                link_load[link] = link_load.get(link, 0) + bw
            throughput[c.a] = throughput.get(c.a, 0) + bw
            throughput[c.b] = throughput.get(c.b, 0) + bw

    equipment = sum(mlg.vertices[(LOGICAL, v)].node_cost for v in design.installed)
    link_rows = []
    transport = 0
    for link, count in sorted(design.dimensioning.items()):
        e = mlg.edges[link]
        load = link_load.get(link, 0)
        capacity = count * e.module_size
        cost = (e.weight + count * e.module_cost) if count > 0 else 0
        transport += cost
        link_rows.append(
            {
                "link": link[2:] if link.startswith("t/") else link,
                "a": e.u[1],
                "b": e.v[1],
                "load": load,
                "modules": count,
                "module_size": e.module_size,
                "capacity": capacity,
                "utilization_pct": round(100.0 * load / capacity, 2) if capacity else 0.0,
                "cost": cost,
            }
        )

    report = {
        "format": REPORT_FORMAT,
        "version": FORMAT_VERSION,
        "instance": instance.name,
        "solver": {
            "mode": design.meta.get("mode"),
            "seed": design.meta.get("seed"),
        },
        "installed_lsrs": sorted(design.installed),
        "logical_topology": [
            {
                "edge": eid,
                "a": cands[eid].a,
                "b": cands[eid].b,
                "path_index": choice[eid],
                "transport_path": list(cands[eid].candidate_paths[choice[eid]]),
                "load": logical_load.get(eid, 0),
            }
            for eid in sorted(choice)
        ],
        "routes": [
            {
                "demand": r.demand_id,
                "source": instance.demand(r.demand_id).source,
                "sinks": list(instance.demand(r.demand_id).sinks),
                "bandwidth": instance.demand(r.demand_id).bandwidth,
                "tree": sorted(r.logical_tree),
            }
            for r in design.routes
        ],
        "links": link_rows,
        "lsr_throughput": throughput,
        "cost": {"equipment": equipment, "transport": transport, "total": design.cost},
        "optimality_gap": None,
    }
    if reference_cost is not None:
        gap = design.cost - reference_cost
        report["optimality_gap"] = {
            "exact_cost": reference_cost,
            "absolute": gap,
            "relative_pct": round(100.0 * gap / reference_cost, 4) if reference_cost else 0.0,
        }
    return report


def parse_report(data: Union[bytes, str]) -> dict:
    """Load a structured report and check its cost arithmetic."""
    doc = json.loads(data)
    if doc.get("format") != REPORT_FORMAT:
        raise ValueError("not a design report")
    cost = doc["cost"]
    if cost["equipment"] + cost["transport"] != cost["total"]:
        raise ValueError("cost breakdown does not sum to the total")
    if sum(row["cost"] for row in doc["links"]) != cost["transport"]:
        raise ValueError("link costs do not sum to the transport cost")
    return doc


def _text_report(rep: dict) -> str:
    lines = [f"Design report: {rep['instance'] or '(unnamed)'}"]
    solver = rep["solver"]
    lines.append(f"solver: mode={solver['mode']} seed={solver['seed']}")
    c = rep["cost"]
    lines.append(
        f"cost: total={c['total']} (equipment={c['equipment']}, transport={c['transport']})"
    )
    if rep["optimality_gap"] is not None:
        g = rep["optimality_gap"]
        lines.append(
            f"optimality gap: {g['absolute']} ({g['relative_pct']}%) vs exact {g['exact_cost']}"
        )
    lines.append("")
    lines.append(f"Installed LSRs ({len(rep['installed_lsrs'])}):")
    for v in rep["installed_lsrs"]:
        lines.append(f"  {v}  throughput={rep['lsr_throughput'].get(v, 0)}")
    lines.append("")
    lines.append(f"Logical topology ({len(rep['logical_topology'])} edges):")
    for row in rep["logical_topology"]:
        lines.append(
            f"  {row['a']} -- {row['b']}  via {'-'.join(row['transport_path'])}"
            f"  [path {row['path_index']}, load {row['load']}]"
        )
    lines.append("")
    lines.append(f"Multicast routes ({len(rep['routes'])}):")
    for row in rep["routes"]:
        tree = ", ".join(e[2:].replace("|", "-") for e in row["tree"]) or "(none)"
        lines.append(
            f"  {row['demand']}: {row['source']} -> {','.join(row['sinks'])}"
            f" bw={row['bandwidth']}  tree: {tree}"
        )
    lines.append("")
    lines.append(f"Transport links ({len(rep['links'])} used):")
    for row in rep["links"]:
        lines.append(
            f"  {row['link']} ({row['a']}-{row['b']}): load {row['load']}/{row['capacity']}"
            f" = {row['utilization_pct']:.2f}%  modules={row['modules']}  cost={row['cost']}"
        )
    return "\n".join(lines) + "\n"


def _dot_id(prefix, name):
    return json.dumps(f"{prefix}:{name}")


def _dot_report(design: Design, instance: Instance, mlg) -> str:
    cands = mlg.memo("logical_candidates", logical_candidates)
    choice = design.path_choice
    used_links = set(design.dimensioning)
    out = [f"graph {json.dumps(instance.name or 'design')} {{"]
    out.append("  subgraph cluster_transport {")
    out.append('    label="transport";')
    for n in sorted(instance.nodes, key=lambda n: n.id):
        out.append(f"    {_dot_id('t', n.id)} [label={json.dumps(n.id)}];")
    for e in mlg.intra_edges(0):
        style = "bold" if e.id in used_links else "dotted"
        out.append(
            f"    {_dot_id('t', e.u[1])} -- {_dot_id('t', e.v[1])} [style={style}];"
        )
    out.append("  }")
    out.append("  subgraph cluster_mpls {")
    out.append('    label="mpls";')
    for v in sorted(design.installed):
        out.append(f"    {_dot_id('m', v)} [label={json.dumps(v)}, shape=box];")
    for eid in sorted(choice):
        c = cands[eid]
        path = "-".join(c.candidate_paths[choice[eid]])
        out.append(
            f"    {_dot_id('m', c.a)} -- {_dot_id('m', c.b)} [label={json.dumps(path)}];"
        )
    out.append("  }")
    for v in sorted(design.installed):
        out.append(f"  {_dot_id('m', v)} -- {_dot_id('t', v)} [style=dashed];")
    out.append("}")
    return "\n".join(out) + "\n"


def emit_report(
    design: Design,
    instance: Instance,
    mlg,
    format: str = "text",
    reference_cost: Optional[int] = None,
) -> bytes:
    """Render a design as ``text``, ``structured`` (JSON) or ``dot``."""
    if format == "dot":
        return _dot_report(design, instance, mlg).encode("utf-8")
    rep = report_dict(design, instance, mlg, reference_cost)
    if format == "structured":
        return (json.dumps(rep, indent=2, sort_keys=True) + "\n").encode("utf-8")
    if format == "text":
        return _text_report(rep).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")
