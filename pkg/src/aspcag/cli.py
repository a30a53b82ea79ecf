"""Command-line entry point: ``aspcag <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time

from . import hcp
from .bench import BenchConfig, run_bench
from .cag import cag_plan, cag_rewrite
from .errors import AspError, ConfigError, IterationUnsat, EngineTimeout
from .grounder import ground, grounding_stats, herbrand_instantiate
from .incremental import engine_from_spec, incremental_solve
from .parser import parse_atoms, parse_program, render_atoms, render_program
from .solver import check_stable, enumerate_brute_force, solve

EXIT_SAT, EXIT_UNSAT = 10, 20


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _read_model(path: str):
    atoms = []
    for line in _read(path).splitlines():
        line = line.strip()
        if line and not line.startswith("%"):
            atoms += parse_atoms(line.replace(". ", " ").rstrip("."))
    return atoms


def _duration(text: str) -> float:
    text = text.strip()
    scale = {"ms": 0.001, "s": 1, "m": 60, "h": 3600}
    for suffix in ("ms", "s", "m", "h"):
        if text.endswith(suffix):
            return float(text[:-len(suffix)]) * scale[suffix]
    return float(text)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _print_stats(stats, fmt: str):
    if fmt == "csv":
        w = csv.writer(sys.stderr)
        w.writerow(["rule_count", "constraint_count", "atom_occurrences", "bytes", "elapsed"])
        w.writerow([stats.rule_count, stats.constraint_count, stats.atom_occurrences,
                    stats.bytes, f"{stats.elapsed:.6f}"])
    else:
        print(f"rules: {stats.rule_count}  constraints: {stats.constraint_count}  "
              f"atom occurrences: {stats.atom_occurrences}  bytes: {stats.bytes}  "
              f"time: {stats.elapsed:.3f}s", file=sys.stderr)


def cmd_ground(args) -> int:
    p = parse_program(_read(args.file))
    t = time.perf_counter()
    g = herbrand_instantiate(p) if args.oracle else ground(p, keep_symmetric=args.keep_symmetric)
    elapsed = time.perf_counter() - t
    sys.stdout.write(g.render())
    if args.stats:
        _print_stats(grounding_stats(g, elapsed), args.stats)
    return 0


def cmd_solve(args) -> int:
    g = ground(parse_program(_read(args.file)))
    if args.check:
        model = set(_read_model(args.check))
        ok = check_stable(g, model)
        print("STABLE" if ok else "NOT STABLE")
        return 0 if ok else 1
    if args.brute_force:
        models = enumerate_brute_force(g)
        if args.models:
            models = models[:args.models]
    else:
        models = solve(g, limit=args.models or None, timeout=args.timeout)
    for m in models:
        print(render_atoms(m))
    if not models:
        print("UNSATISFIABLE")
        return EXIT_UNSAT
    return EXIT_SAT


def cmd_rewrite(args) -> int:
    p = parse_program(_read(args.file))
    only = args.only.split(",") if args.only else None
    if args.report:
        for e in cag_plan(p, args.unfold_depth, only):
            lit = e.literal if e.literal is not None else "(skipped)"
            kind = "derived" if e.condition.derived else "constraint"
            print(f"% {e.rule.head}: {kind} {e.condition.source_constraint}")
            print(f"%   condition {e.condition}")
            print(f"%   adds {lit}")
    sys.stdout.write(render_program(cag_rewrite(p, args.unfold_depth, only)))
    return 0


def cmd_inc(args) -> int:
    enc = parse_program(_read(args.encoding))
    if args.cag:
        enc = cag_rewrite(enc)
    instance = list(parse_program(_read(args.instance)).facts)
    batches = hcp.batch_facts(instance, args.ppi)
    engine = engine_from_spec(args.engine)
    try:
        model, traces = incremental_solve(enc, batches, engine)
        status = 0
    except (IterationUnsat, EngineTimeout) as exc:
        print(f"error: {exc}", file=sys.stderr)
        model, traces, status = None, exc.traces, 1
    if args.trace:
        _print_trace(traces, args.trace)
    if model is not None:
        print(render_atoms(model))
    return status


def _print_trace(traces, fmt: str):
    cols = ["index", "input_fact_count", "rules", "bytes", "ground_time", "solve_time",
            "answer_set_size", "status", "verified"]
    rows = []
    for t in traces:
        rows.append([t.index, t.input_fact_count,
                     t.stats.rule_count if t.stats else "", t.stats.bytes if t.stats else "",
                     f"{t.ground_time:.4f}", f"{t.solve_time:.4f}", t.answer_set_size, t.status,
                     "" if t.verified is None else t.verified])
    if fmt == "csv":
        w = csv.writer(sys.stderr)
        w.writerow(cols)
        w.writerows(rows)
    else:
        for r in rows:
            print("  ".join(f"{c}={v}" for c, v in zip(cols, r)), file=sys.stderr)


def cmd_gen(args) -> int:
    spec = hcp.InstanceSpec(args.persons, args.things_per_person, args.cabinets_per_person,
                            args.rooms_per_person)
    facts = hcp.gen_instance(spec)
    if args.emit_batches:
        if not args.ppi:
            raise ConfigError("--emit-batches requires --ppi")
        os.makedirs(args.emit_batches, exist_ok=True)
        for b in hcp.batch_facts(facts, args.ppi):
            with open(os.path.join(args.emit_batches, f"batch_{b.index:03d}.lp"), "w") as fh:
                fh.write(hcp.render_facts(b.facts))
    sys.stdout.write(hcp.render_facts(facts))
    return 0


def cmd_verify(args) -> int:
    instance = list(parse_program(_read(args.instance)).facts)
    violations = hcp.verify_solution(instance, _read_model(args.model))
    for v in violations:
        print(v)
    if not violations:
        print("OK")
    return 1 if violations else 0


def cmd_bench(args) -> int:
    cfg = BenchConfig(_int_list(args.sizes), args.ppi, args.mode, args.rewrite, args.engine,
                      _duration(args.timeout), args.out, args.parallel)
    for rec in run_bench(cfg):
        print(f"persons={rec.persons} status={rec.status} total={rec.total_time:.2f}s "
              f"rules={rec.final_ground_rules}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aspcag", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ground", help="ground a program")
    s.add_argument("file")
    s.add_argument("--oracle", action="store_true", help="naive Herbrand instantiation")
    s.add_argument("--stats", choices=["csv", "human"])
    s.add_argument("--keep-symmetric", action="store_true")
    s.set_defaults(func=cmd_ground)

    s = sub.add_parser("solve", help="compute stable models")
    s.add_argument("file")
    s.add_argument("--models", type=int, default=1, help="0 for all")
    s.add_argument("--brute-force", action="store_true")
    s.add_argument("--check", metavar="MODEL_FILE")
    s.add_argument("--timeout", type=float)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("rewrite", help="constraint-aware guessing rewrite")
    s.add_argument("file")
    s.add_argument("--unfold-depth", type=int, default=2)
    s.add_argument("--only", help="comma-separated predicates to rewrite")
    s.add_argument("--report", action="store_true")
    s.set_defaults(func=cmd_rewrite)

    s = sub.add_parser("inc", help="incremental solving")
    s.add_argument("encoding")
    s.add_argument("--instance", required=True)
    s.add_argument("--ppi", type=int, default=1)
    s.add_argument("--engine", default="internal")
    s.add_argument("--cag", action="store_true")
    s.add_argument("--trace", choices=["csv", "human"])
    s.set_defaults(func=cmd_inc)

    s = sub.add_parser("gen", help="generate an HCP instance")
    s.add_argument("--persons", type=int, required=True)
    s.add_argument("--things-per-person", type=int, default=10)
    s.add_argument("--cabinets-per-person", type=int, default=2)
    s.add_argument("--rooms-per-person", type=int, default=1)
    s.add_argument("--ppi", type=int)
    s.add_argument("--emit-batches", metavar="DIR")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("verify", help="check an HCP configuration")
    s.add_argument("instance")
    s.add_argument("model")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("bench", help="run the benchmark grid")
    s.add_argument("--sizes", required=True, help="e.g. 1,2,3")
    s.add_argument("--mode", default="incremental", choices=["one-shot", "incremental"])
    s.add_argument("--rewrite", default="plain", choices=["plain", "cag"])
    s.add_argument("--ppi", type=int, default=5)
    s.add_argument("--timeout", default="60s")
    s.add_argument("--out")
    s.add_argument("--engine", default="internal")
    s.add_argument("--parallel", type=int, default=1)
    s.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (AspError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
