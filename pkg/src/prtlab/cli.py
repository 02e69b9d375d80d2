"""Command line entry point: ``prtlab <subcommand> ...``.

Exit status: 0 on success / pass, 1 when a test fails or coverage is below
``--min-coverage``, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .campaign import CoverageReport, FaultUniverse, compare_reports, run_campaign, search_tdb
from .config import ConfigError, entry_to_dict, load_config
from .galois import (DEFAULT_POLYS, FieldSpec, gf_inv, gf_mul, naive_gate_count,
                     poly_is_irreducible, synthesize_multiplier)
from .lfsr import LfsrDef, expected_final, lfsr_from_generator, lfsr_period, lfsr_sequence
from .march import MarchSyntaxError, execute_march, parse_march
from .memory import FAULT_CLASSES, Memory, MemoryConfig, fault_from_dict
from .pi_engine import run_prt_schedule

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t, 0) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _int(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def parse_fault(text: str):
    """``Kind:key=value,...``, e.g. ``StuckAt:cell=3,bit=0,value=1``."""
    kind, _, rest = text.partition(":")
    if kind not in FAULT_CLASSES:
        raise UsageError(f"unknown fault class {kind!r}; known: {', '.join(FAULT_CLASSES)}")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"bad fault parameter {item!r}")
        try:
            params[key.strip()] = int(value, 0)
        except ValueError:
            params[key.strip()] = value.strip()
    try:
        return fault_from_dict(kind, params)
    except TypeError as exc:
        raise UsageError(f"fault {kind}: {exc}") from None


def _field(args) -> FieldSpec:
    poly = args.poly if args.poly is not None else DEFAULT_POLYS.get(args.m)
    if poly is None:
        raise UsageError(f"no default polynomial for m={args.m}")
    return FieldSpec(args.m, poly)


def _lfsr(args, spec: FieldSpec) -> LfsrDef:
    if (args.taps is None) == (args.generator is None):
        raise UsageError("give exactly one of --taps or --generator")
    if args.taps is not None:
        return LfsrDef(spec, tuple(args.taps))
    return lfsr_from_generator(spec, args.generator)


def _write_out(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------------ commands


def cmd_field(args) -> int:
    if args.action == "irreducible":
        if args.poly is None:
            raise UsageError("--poly is required")
        ok = poly_is_irreducible(args.poly)
        print(f"{args.poly:#x}: {'irreducible' if ok else 'reducible'}")
        return EXIT_OK if ok else EXIT_FAIL
    spec = _field(args)
    if args.action == "info":
        print(spec)
        print(f"order {spec.order}, irreducible {poly_is_irreducible(spec.poly)}")
        print("inverses: " + " ".join(f"{a:x}->{gf_inv(spec, a):x}" for a in range(1, min(spec.order, 256))))
        return EXIT_OK
    if spec.m > 8:
        raise UsageError("mul-table is limited to m <= 8")
    width = len(f"{spec.order - 1:x}")
    print("*".rjust(width) + " | " + " ".join(f"{b:>{width}x}" for b in range(spec.order)))
    for a in range(spec.order):
        print(f"{a:>{width}x} | " + " ".join(f"{gf_mul(spec, a, b):>{width}x}" for b in range(spec.order)))
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = _field(args)
    net = synthesize_multiplier(spec, spec.check(args.const))
    header = (f"# x -> {args.const:#x} * x in {spec}; {net.gate_count} XOR gates "
              f"(naive {naive_gate_count(spec, args.const)})\n")
    _write_out(header + net.to_netlist(), args.out)
    return EXIT_OK


def cmd_lfsr(args) -> int:
    spec = _field(args)
    lfsr = _lfsr(args, spec)
    init = tuple(args.init)
    print(f"taps {list(lfsr.taps)} over {spec}")
    if args.action == "period":
        print(f"period {lfsr_period(lfsr, init)}")
    elif args.action == "expected-final":
        if args.n is None:
            raise UsageError("--n is required")
        print(f"Fin* {list(expected_final(lfsr, init, args.n))}")
    else:
        if args.n is None:
            raise UsageError("--n is required")
        print(" ".join(f"{v:x}" for v in lfsr_sequence(lfsr, init, args.n)))
    return EXIT_OK


def cmd_run_march(args) -> int:
    test = parse_march(args.test)
    mem = Memory(MemoryConfig(args.n, args.m))
    for f in args.fault or []:
        mem.inject(parse_fault(f))
    verdict = execute_march(test, mem, full_trace=args.full_trace)
    s = mem.stats
    print(f"{test}: {'PASS' if verdict.passed else 'FAIL'} "
          f"(reads {s.reads}, writes {s.writes}, cycles {s.cycles})")
    for f in verdict.failures:
        print(f"  element {f.element} op {f.op} addr {f.address}: read {f.read:x}, expected {f.expected:x}")
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_run_prt(args) -> int:
    cfg = load_config(args.config)
    mem = Memory(cfg.memory)
    for f in args.fault or []:
        mem.inject(parse_fault(f))
    verdict = run_prt_schedule(cfg.schedule, mem)
    if args.json:
        out = {
            "passed": verdict.passed,
            "first_failure": verdict.first_failure,
            "iterations": [
                {"config": entry_to_dict(c), "fin": list(r.fin), "fin_expected": list(r.fin_expected),
                 "passed": r.passed, "lanes": r.lanes,
                 "stats": {"reads": r.stats.reads, "writes": r.stats.writes, "cycles": r.stats.cycles}}
                for c, r in zip(cfg.schedule, verdict.results)
            ],
        }
        print(json.dumps(out, indent=2))
    else:
        for i, r in enumerate(verdict.results):
            lanes = "" if r.lanes is None else " lanes " + "".join("1" if ok else "0" for ok in r.lanes)
            print(f"iteration {i}: {'PASS' if r.passed else 'FAIL'} Fin {list(r.fin)} "
                  f"expected {list(r.fin_expected)} ops {r.stats.as_tuple()}{lanes}")
        print("PASS" if verdict.passed else f"FAIL (first at iteration {verdict.first_failure})")
    return EXIT_OK if verdict.passed else EXIT_FAIL


def _universe(cfg, args) -> FaultUniverse:
    if cfg.universe is None:
        raise UsageError("config has no 'universe' section")
    return FaultUniverse.from_spec(cfg.universe, cfg.memory)


def cmd_campaign(args) -> int:
    cfg = load_config(args.config)
    universe = _universe(cfg, args)
    test = parse_march(args.march) if args.march else cfg.schedule
    report = run_campaign(test, universe, workers=args.workers)
    _write_out(report.to_json(timing=not args.no_timing), args.out)
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    below = []
    for c, s in report.summary.items():
        print(f"{c:<20} {s.detected:>6}/{s.total:<6} {s.coverage:.4f}", file=sys.stderr)
        if args.min_coverage is not None and s.coverage < args.min_coverage:
            below.append(c)
    if below:
        print(f"coverage below {args.min_coverage} for: {', '.join(below)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_compare(args) -> int:
    a = CoverageReport.from_json(Path(args.a).read_text())
    b = CoverageReport.from_json(Path(args.b).read_text())
    print(compare_reports(a, b).format(Path(args.a).stem, Path(args.b).stem))
    return EXIT_OK


def cmd_tdb_search(args) -> int:
    cfg = load_config(args.config)
    universe = _universe(cfg, args)
    schedule, report = search_tdb(universe, cfg.lfsr, iterations=args.iterations, trials=args.trials,
                                  seed=args.seed, vary_taps=args.vary_taps, base=cfg.schedule[0],
                                  workers=args.workers)
    doc = {
        "memory": {"n": cfg.memory.n, "m": cfg.memory.m, "ports": cfg.memory.ports},
        "field": {"m": cfg.field.m, "poly": hex(cfg.field.poly)},
        "lfsr": {"taps": list(cfg.lfsr.taps)},
        "schedule": [{k: v for k, v in entry_to_dict(c).items() if k != "field"} for c in schedule],
        "universe": {"classes": list(universe.classes), "d_max": universe.d_max},
    }
    _write_out(json.dumps(doc, indent=2) + "\n", args.out)
    print(f"best coverage {report.coverage:.4f}", file=sys.stderr)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prtlab", description="Pseudo-ring testing laboratory for simulated RAM.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def field_args(sp, m_default=4):
        sp.add_argument("--m", type=int, default=m_default, help="word width in bits")
        sp.add_argument("--poly", type=_int, help="reduction polynomial as bitmask, e.g. 0x13")

    sp = sub.add_parser("field", help="inspect a field GF(2^m)")
    sp.add_argument("action", choices=["info", "mul-table", "irreducible"])
    field_args(sp)
    sp.set_defaults(func=cmd_field)

    sp = sub.add_parser("synth", help="XOR netlist for multiplication by a constant")
    field_args(sp)
    sp.add_argument("--const", type=_int, required=True)
    sp.add_argument("--out", help="write the netlist here instead of stdout")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("lfsr", help="period / expected final state / sequence of a virtual LFSR")
    sp.add_argument("action", choices=["period", "expected-final", "sequence"])
    field_args(sp, m_default=1)
    sp.add_argument("--taps", type=_int_list)
    sp.add_argument("--generator", type=_int_list, help="g(x) coefficients a_0..a_k")
    sp.add_argument("--init", type=_int_list, required=True)
    sp.add_argument("--n", type=int, help="memory cell count")
    sp.set_defaults(func=cmd_lfsr)

    sp = sub.add_parser("run-march", help="run a March test on a simulated memory")
    sp.add_argument("--test", required=True, help='e.g. "{a(w0); u(r0,w1); d(r1,w0)}"')
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--fault", action="append", help="inject a fault, e.g. StuckAt:cell=3,bit=0,value=1")
    sp.add_argument("--full-trace", action="store_true", help="report every mismatch, not just the first")
    sp.set_defaults(func=cmd_run_march)

    sp = sub.add_parser("run-prt", help="run the PRT schedule of a config file")
    sp.add_argument("--config", required=True)
    sp.add_argument("--fault", action="append")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_run_prt)

    sp = sub.add_parser("campaign", help="single-fault coverage campaign")
    sp.add_argument("--config", required=True)
    sp.add_argument("--march", help="run this March test instead of the config's PRT schedule")
    sp.add_argument("--out", help="JSON report path (stdout if omitted)")
    sp.add_argument("--csv", help="also write rows as CSV")
    sp.add_argument("--min-coverage", type=float)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--no-timing", action="store_true", help="omit the timing block (byte-reproducible output)")
    sp.set_defaults(func=cmd_campaign)

    sp = sub.add_parser("compare", help="diff two campaign reports")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("tdb-search", help="random search for initial states maximising coverage")
    sp.add_argument("--config", required=True)
    sp.add_argument("--iterations", type=int, default=3)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=_int, default=0)
    sp.add_argument("--vary-taps", action="store_true")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_tdb_search)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MarchSyntaxError as exc:
        print(f"prtlab: syntax error {exc}", file=sys.stderr)
    except (UsageError, ConfigError, ValueError, ZeroDivisionError) as exc:
        print(f"prtlab: error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"prtlab: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
