"""Single-fault coverage campaigns for PRT schedules and March tests."""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .config import UniverseSpec, entry_to_dict
from .lfsr import LfsrDef
from .march import MarchTest, execute_march, format_march, parse_march
from .memory import (FAULT_CLASSES, AddressAlias, AddressVoid, CouplingIdempotent,
                     CouplingInversion, CouplingState, Fault, Memory, MemoryConfig,
                     StuckAt, Transition, fault_class, fault_params)
from .pi_engine import PiTestConfig, check_schedule, run_prt_schedule

# coupling/alias pairs are windowed to this cell distance when n > 64 and no d_max is given
DEFAULT_D_MAX = 8
FULL_PAIRS_MAX_N = 64

CSV_COLUMNS = ("fault_id", "class", "params", "detected", "detected_by")


@dataclass(frozen=True)
class FaultUniverse:
    classes: tuple[str, ...]
    geometry: MemoryConfig
    d_max: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if not self.classes:
            raise ValueError("fault universe needs at least one class")
        for c in self.classes:
            if c not in FAULT_CLASSES:
                raise ValueError(f"unknown fault class {c!r}")
        if self.d_max is not None and self.d_max < 1:
            raise ValueError("d_max must be >= 1")

    @classmethod
    def from_spec(cls, spec: UniverseSpec, geometry: MemoryConfig) -> "FaultUniverse":
        return cls(spec.classes, geometry, spec.d_max)

    @property
    def window(self) -> int | None:
        if self.d_max is not None:
            return self.d_max
        return None if self.geometry.n <= FULL_PAIRS_MAX_N else DEFAULT_D_MAX

    def to_dict(self) -> dict:
        g = self.geometry
        return {"classes": [c for c in FAULT_CLASSES if c in self.classes],
                "n": g.n, "m": g.m, "ports": g.ports, "d_max": self.window}


def _positions(n: int, m: int):
    return [(c, b) for c in range(n) for b in range(m)]


def _pairs(n: int, m: int, window: int | None):
    for (ac, ab), (vc, vb) in itertools.permutations(_positions(n, m), 2):
        if window is None or abs(ac - vc) <= window:
            yield ac, ab, vc, vb


def enumerate_faults(u: FaultUniverse) -> list[Fault]:
    """Every fault of the universe, in a fixed order (class, then parameters)."""
    n, m, w = u.geometry.n, u.geometry.m, u.window
    out: list[Fault] = []
    for name in FAULT_CLASSES:
        if name not in u.classes:
            continue
        if name == "StuckAt":
            out += [StuckAt(c, b, v) for c, b in _positions(n, m) for v in (0, 1)]
        elif name == "Transition":
            out += [Transition(c, b, d) for c, b in _positions(n, m)
                    for d in ("up_blocked", "down_blocked")]
        elif name == "CouplingInversion":
            out += [CouplingInversion(*p, e) for p in _pairs(n, m, w) for e in ("rise", "fall")]
        elif name == "CouplingIdempotent":
            out += [CouplingIdempotent(*p, e, fv) for p in _pairs(n, m, w)
                    for e in ("rise", "fall") for fv in (0, 1)]
        elif name == "CouplingState":
            out += [CouplingState(ac, ab, s, vc, vb, fv) for ac, ab, vc, vb in _pairs(n, m, w)
                    for s in (0, 1) for fv in (0, 1)]
        elif name == "AddressAlias":
            out += [AddressAlias(a, b) for a, b in itertools.permutations(range(n), 2)
                    if w is None or abs(a - b) <= w]
        elif name == "AddressVoid":
            out += [AddressVoid(a, d) for a in range(n) for d in (0, 1)]
    return out


# ------------------------------------------------------------------ reports


@dataclass
class FaultRow:
    fault_id: int
    fault_class: str
    params: dict
    detected: bool
    detected_by: int | None

    def to_dict(self) -> dict:
        return {"fault_id": self.fault_id, "class": self.fault_class, "params": self.params,
                "detected": self.detected, "detected_by": self.detected_by}


@dataclass
class ClassSummary:
    total: int = 0
    detected: int = 0

    @property
    def coverage(self) -> float:
        return self.detected / self.total if self.total else 0.0


@dataclass
class CoverageReport:
    rows: list[FaultRow]
    metadata: dict
    timing: dict = field(default_factory=dict)

    @property
    def summary(self) -> dict[str, ClassSummary]:
        out: dict[str, ClassSummary] = {}
        for r in self.rows:
            s = out.setdefault(r.fault_class, ClassSummary())
            s.total += 1
            s.detected += r.detected
        return out

    @property
    def coverage(self) -> float:
        return sum(r.detected for r in self.rows) / len(self.rows) if self.rows else 0.0

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "metadata": self.metadata,
            "summary": {c: {"total": s.total, "detected": s.detected, "coverage": s.coverage}
                        for c, s in self.summary.items()},
            "rows": [r.to_dict() for r in self.rows],
        }
        if timing:
            d["timing"] = self.timing
        return d

    def to_json(self, timing: bool = True) -> str:
        """JSON text; with ``timing=False`` the output is fully deterministic."""
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            params = ";".join(f"{k}={v}" for k, v in r.params.items())
            w.writerow([r.fault_id, r.fault_class, params, int(r.detected),
                        "" if r.detected_by is None else r.detected_by])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, d: dict) -> "CoverageReport":
        rows = [FaultRow(r["fault_id"], r["class"], r["params"], r["detected"], r["detected_by"])
                for r in d["rows"]]
        return cls(rows, d["metadata"], d.get("timing", {}))

    @classmethod
    def from_json(cls, text: str) -> "CoverageReport":
        return cls.from_dict(json.loads(text))


# ------------------------------------------------------------------ campaigns


def describe_test(test) -> dict:
    if isinstance(test, MarchTest):
        return {"kind": "march", "march": format_march(test)}
    return {"kind": "prt", "schedule": [entry_to_dict(c) for c in test]}


def _config_hash(test_desc: dict, universe: dict) -> str:
    blob = json.dumps({"test": test_desc, "universe": universe}, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def run_test(test, mem: Memory):
    """Run a March test or PRT schedule; return (detected, detected_by)."""
    if isinstance(test, MarchTest):
        v = execute_march(test, mem)
        return (False, None) if v.passed else (True, v.first.element)
    v = run_prt_schedule(test, mem, stop_on_fail=True)
    return (False, None) if v.passed else (True, v.first_failure)


def run_campaign(test, universe: FaultUniverse, workers: int = 1) -> CoverageReport:
    """Inject each fault of `universe` alone into a fresh memory and run `test`.

    `test` is a MarchTest (or its text) or a list of PiTestConfig.  Faults
    are independent, so `workers` > 1 fans them out across threads; the
    report is identical either way.
    """
    if isinstance(test, str):
        test = parse_march(test)
    geometry = universe.geometry
    if not isinstance(test, MarchTest):
        test = list(test)
        check_schedule(test, Memory(geometry))
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()

    reference = Memory(geometry)
    detected, _ = run_test(test, reference)
    if detected:
        raise ValueError("test fails on a fault-free memory; coverage would be meaningless")
    ops = reference.stats

    faults = enumerate_faults(universe)

    def one(item):
        fid, f = item
        mem = Memory(geometry)
        mem.inject(f)
        hit, by = run_test(test, mem)
        return FaultRow(fid, fault_class(f), fault_params(f), hit, by)

    items = list(enumerate(faults))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, items))
    else:
        rows = [one(it) for it in items]
    rows.sort(key=lambda r: r.fault_id)

    desc = describe_test(test)
    udesc = universe.to_dict()
    metadata = {
        "test": desc,
        "universe": udesc,
        "config_hash": _config_hash(desc, udesc),
        "fault_count": len(rows),
        "ops": {"reads": ops.reads, "writes": ops.writes, "cycles": ops.cycles},
    }
    timing = {"started": started.isoformat(), "wall_time_s": round(time.perf_counter() - t0, 6)}
    return CoverageReport(rows, metadata, timing)


@dataclass
class ReportDiff:
    # class -> (coverage a, coverage b, a - b)
    per_class: dict[str, tuple[float, float, float]]
    only_a: list[int]
    only_b: list[int]

    @property
    def is_zero(self) -> bool:
        return not self.only_a and not self.only_b and all(d == 0 for *_, d in self.per_class.values())

    def format(self, label_a: str = "A", label_b: str = "B") -> str:
        lines = [f"{'class':<20} {label_a:>8} {label_b:>8} {'delta':>8}"]
        for c, (a, b, d) in self.per_class.items():
            lines.append(f"{c:<20} {a:>8.4f} {b:>8.4f} {d:>+8.4f}")
        lines.append(f"caught only by {label_a}: {len(self.only_a)} {self.only_a[:20]}")
        lines.append(f"caught only by {label_b}: {len(self.only_b)} {self.only_b[:20]}")
        return "\n".join(lines)


def compare_reports(a: CoverageReport, b: CoverageReport) -> ReportDiff:
    def key(r):
        return [(x.fault_id, x.fault_class, x.params) for x in r.rows]

    if a.metadata.get("universe") != b.metadata.get("universe") or key(a) != key(b):
        raise ValueError("reports cover different fault universes")
    sa, sb = a.summary, b.summary
    per_class = {c: (sa[c].coverage, sb[c].coverage, sa[c].coverage - sb[c].coverage) for c in sa}
    only_a = [x.fault_id for x, y in zip(a.rows, b.rows) if x.detected and not y.detected]
    only_b = [x.fault_id for x, y in zip(a.rows, b.rows) if y.detected and not x.detected]
    return ReportDiff(per_class, only_a, only_b)


def search_tdb(universe: FaultUniverse, lfsr: LfsrDef, iterations: int = 3, trials: int = 20,
               seed: int = 0, vary_taps: bool = False, base: PiTestConfig | None = None,
               workers: int = 1):
    """Random search for word-oriented initial states (and optionally taps).

    Draws `trials` schedules of `iterations` entries and keeps the one with
    the highest overall coverage, ties broken by fewest charged cycles.
    Returns (schedule, report).
    """
    rng = random.Random(seed)
    spec = lfsr.spec
    best = None
    for _ in range(trials):
        schedule = []
        for _ in range(iterations):
            taps = lfsr.taps
            if vary_taps:
                taps = (rng.randrange(1, spec.order),) + tuple(rng.randrange(spec.order)
                                                                for _ in range(lfsr.k - 1))
            init = (0,) * lfsr.k
            while not any(init):
                init = tuple(rng.randrange(spec.order) for _ in range(lfsr.k))
            entry = PiTestConfig(LfsrDef(spec, taps), init)
            if base is not None:
                entry = PiTestConfig(entry.lfsr, init, base.trajectory, "oracle", base.port_mode)
            schedule.append(entry)
        report = run_campaign(schedule, universe, workers=workers)
        score = (report.coverage, -report.metadata["ops"]["cycles"])
        if best is None or score > best[0]:
            best = (score, schedule, report)
    return best[1], best[2]
