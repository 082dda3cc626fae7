"""Command-line interface.

Exit codes: 0 success, 1 infeasible, 2 input error, 3 exact-solver limits
exceeded.  Set ``MLG_LOG_LEVEL`` to error, warn, info or debug.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from collections import Counter

from mlgnet.config import Mode, SolverConfig
from mlgnet.exceptions import InfeasibleError, InstanceError, LimitsExceededError
from mlgnet.graph import LOGICAL, TRANSPORT, validate
from mlgnet.io import emit_report, load_instance
from mlgnet.optimizer import exact_bruteforce, greedy_construct, local_search, solve
from mlgnet.optimizer.exact import check_limits
from mlgnet.optimizer.solve import certify
from mlgnet.synthesis import synthesize

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_LIMITS = 0, 1, 2, 3

_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "warning": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

log = logging.getLogger("mlgnet")


def _setup_logging():
    name = os.environ.get("MLG_LOG_LEVEL", "warn").lower()
    logging.basicConfig(
        level=_LEVELS.get(name, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if name not in _LEVELS:
        log.warning("ignoring unknown MLG_LOG_LEVEL %r", name)


def _load(path):
    try:
        return load_instance(path)
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None


def cmd_validate(args) -> int:
    instance = _load(args.file)
    mlg = synthesize(instance)
    violations = validate(mlg)
    if violations:
        for v in violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_INPUT
    print(
        f"ok: {instance.name or args.file}: {len(instance.nodes)} nodes, "
        f"{len(instance.links)} links, {len(instance.lsr_candidates)} LSR candidates, "
        f"{len(instance.demands)} demands"
    )
    return EXIT_OK


def cmd_synth(args) -> int:
    instance = _load(args.file)
    mlg = synthesize(instance)
    print(f"instance: {instance.name}")
    print(f"layers: {len(mlg.layers)}")
    for layer in mlg.layers:
        if layer == TRANSPORT:
            role = "transport"
        elif layer == LOGICAL:
            role = "mpls"
        else:
            role = f"flow {instance.demands[layer - 2].id}"
        print(
            f"  layer {layer} ({role}): {len(mlg.vertices_on(layer))} vertices, "
            f"{len(mlg.intra_edges(layer))} edges"
        )
    print(f"inter-layer edges: {len(mlg.inter_edges())}")
    paths = Counter(len(e.paths) for e in mlg.intra_edges(LOGICAL))
    for n in sorted(paths):
        print(f"logical edges with {n} candidate path(s): {paths[n]}")
    return EXIT_OK


def _config(instance, args) -> SolverConfig:
    cfg = instance.solver
    changes = {}
    if args.mode is not None:
        changes["mode"] = Mode.parse(args.mode)
    if args.seed is not None:
        changes["rng_seed"] = args.seed
    if args.budget is not None:
        changes["local_search_budget"] = args.budget
    if args.time_limit is not None:
        changes["time_limit"] = args.time_limit
    return dataclasses.replace(cfg, **changes)


def cmd_solve(args) -> int:
    instance = _load(args.file)
    mlg = synthesize(instance)
    cfg = _config(instance, args)
    design = solve(mlg, instance, cfg)
    reference = None
    if cfg.mode is Mode.EXACT:
        reference = design.cost
    elif args.gap:
        reference = exact_bruteforce(mlg, instance, cfg.limits).cost
    data = emit_report(design, instance, mlg, args.format, reference_cost=reference)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


def cmd_compare(args) -> int:
    instance = _load(args.file)
    mlg = synthesize(instance)
    cfg = _config(instance, args)
    check_limits(mlg, instance, cfg.limits)
    cert = certify(mlg, instance)
    if cert is not None:
        raise InfeasibleError(cert)
    exact = exact_bruteforce(mlg, instance, cfg.limits)
    rows = []
    try:
        greedy = greedy_construct(mlg, instance)
        ls = local_search(mlg, instance, greedy, cfg.local_search_budget, cfg.rng_seed, cfg.time_limit)
        rows = [("greedy", greedy.cost), ("ls", ls.cost)]
    except InfeasibleError as exc:
        log.warning("greedy found no design: %s", exc)
        rows = [("greedy", None), ("ls", None)]
    rows.append(("exact", exact.cost))
    print(f"{'mode':<8}{'cost':>12}{'gap':>12}{'gap %':>10}")
    for mode, cost in rows:
        if cost is None:
            print(f"{mode:<8}{'-':>12}{'-':>12}{'-':>10}")
            continue
        gap = cost - exact.cost
        pct = 100.0 * gap / exact.cost if exact.cost else 0.0
        print(f"{mode:<8}{cost:>12}{gap:>12}{pct:>10.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlgnet", description="Two-level MPLS-over-transport network design."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an instance file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="print statistics of the synthesized multilayer graph")
    p.add_argument("file")
    p.set_defaults(func=cmd_synth)

    def solver_flags(p):
        p.add_argument("--mode", choices=["greedy", "ls", "exact"])
        p.add_argument("--seed", type=int)
        p.add_argument("--budget", type=int)
        p.add_argument("--time-limit", type=float, dest="time_limit")

    p = sub.add_parser("solve", help="design the network")
    p.add_argument("file")
    solver_flags(p)
    p.add_argument("--out")
    p.add_argument("--format", choices=["text", "structured", "dot"], default="text")
    p.add_argument("--gap", action="store_true", help="also run the exact solver and report the gap")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="run every mode and print the gap table")
    p.add_argument("file")
    solver_flags(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InstanceError as exc:
        print(f"error: {args.file}: {exc.diagnostic()}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        cert = exc.certificate
        kind = "proven" if cert.proven else "heuristic"
        print(f"infeasible ({kind}): {cert.message}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except LimitsExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMITS


if __name__ == "__main__":
    sys.exit(main())
