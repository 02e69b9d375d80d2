"""Pseudo-ring test iterations run against a simulated memory.

One iteration seeds k cells along a trajectory with the initial state, then
walks the trajectory: read the k previous cells, write their tap-weighted
field sum into the next cell.  The last k cells (Fin) are then compared
either with the oracle prediction or, in ring mode, with the seed itself.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

from .galois import BIT
from .lfsr import BOM_LFSR, LfsrDef, LfsrState, expected_final, lfsr_advance, lfsr_period
from .memory import Memory, OpStats, Read, Write

MAX_SEED = 2**64 - 1


def _check_seed(seed: int) -> None:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed {seed} is not a 64-bit unsigned integer")


@dataclass(frozen=True)
class Trajectory:
    """Address order of the virtual LFSR.

    Random orders are a Fisher-Yates shuffle driven by Python's
    ``random.Random(seed)`` (MT19937), so a seed pins the order.
    """

    kind: Literal["ascending", "descending", "random"] = "ascending"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("ascending", "descending", "random"):
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        _check_seed(self.seed)

    def permutation(self, n: int) -> tuple[int, ...]:
        return _permutation(self, n)


@lru_cache(maxsize=256)
def _permutation(t: Trajectory, n: int) -> tuple[int, ...]:
    order = list(range(n))
    if t.kind == "descending":
        order.reverse()
    elif t.kind == "random":
        random.Random(t.seed).shuffle(order)
    return tuple(order)


@dataclass(frozen=True)
class LaneMode:
    """How a word-oriented cell is driven.

    ``word``: one automaton over GF(2^m).  ``parallel``: m identical bit
    automatons, one per bit lane.  ``random``: m bit automatons sharing the
    taps but with seeded random nonzero initial states.
    """

    kind: Literal["word", "parallel", "random"] = "word"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("word", "parallel", "random"):
            raise ValueError(f"unknown lane mode {self.kind!r}")
        _check_seed(self.seed)


@dataclass(frozen=True)
class PiTestConfig:
    """One pi-test iteration.

    In ``word`` lane mode `init` holds k field elements.  In laned modes
    it holds k bits shared by every lane (ignored for random lanes).

    `ring_closure` selects the ring-compare convention: ``window`` needs
    (n - k) to be a multiple of the period and compares Fin with Init
    directly; ``wrap`` needs n itself to be a multiple and compares Init with
    Fin advanced k more steps, i.e. the values the automaton would write if
    it continued around into the seed cells.
    """

    lfsr: LfsrDef
    init: tuple[int, ...]
    trajectory: Trajectory = Trajectory()
    compare: Literal["oracle", "ring"] = "oracle"
    port_mode: Literal["single", "dual"] = "single"
    lane_mode: LaneMode = LaneMode()
    ring_closure: Literal["window", "wrap"] = "window"

    def __post_init__(self):
        object.__setattr__(self, "init", tuple(self.init))
        if self.compare not in ("oracle", "ring"):
            raise ValueError(f"unknown compare mode {self.compare!r}")
        if self.port_mode not in ("single", "dual"):
            raise ValueError(f"unknown port mode {self.port_mode!r}")
        if self.ring_closure not in ("window", "wrap"):
            raise ValueError(f"unknown ring closure {self.ring_closure!r}")
        if self.lane_mode.kind == "word":
            self.lfsr.check_state(self.init)
        else:
            if self.lfsr.spec.m == 1:
                raise ValueError("lane modes need a word-oriented memory (m > 1)")
            if not self.lfsr.is_binary:
                raise ValueError("lane modes need taps in {0, 1}")
            if len(self.init) != self.k or any(b not in (0, 1) for b in self.init):
                raise ValueError(f"lane init must be {self.k} bits")

    @property
    def k(self) -> int:
        return self.lfsr.k

    @property
    def m(self) -> int:
        return self.lfsr.spec.m


@dataclass
class IterationResult:
    fin: LfsrState
    fin_expected: LfsrState
    passed: bool
    stats: OpStats
    # per-lane verdicts for laned modes, bit b -> lane b
    lanes: list[bool] | None = None
    # state actually compared with fin_expected (differs from fin only for wrap closure)
    fin_compared: LfsrState | None = None


@dataclass
class ScheduleVerdict:
    results: list[IterationResult] = field(default_factory=list)
    first_failure: int | None = None
    stats: OpStats = field(default_factory=OpStats)

    @property
    def passed(self) -> bool:
        return self.first_failure is None


# ------------------------------------------------------------------ planning


def plan_lanes(cfg: PiTestConfig) -> list[tuple[LfsrState, tuple[int, ...]]]:
    """Per-lane (init bits, taps) for laned modes."""
    if cfg.lane_mode.kind == "word":
        raise ValueError("plan_lanes needs a laned configuration")
    if cfg.m == 1:
        raise ValueError("lane modes need m > 1")
    taps = cfg.lfsr.taps
    if cfg.lane_mode.kind == "parallel":
        return [(cfg.init, taps) for _ in range(cfg.m)]
    rng = random.Random(cfg.lane_mode.seed)
    lanes = []
    for _ in range(cfg.m):
        while True:
            bits = tuple(rng.randrange(2) for _ in range(cfg.k))
            if any(bits):
                break
        lanes.append((bits, taps))
    return lanes


def _pack(lane_states) -> LfsrState:
    k = len(lane_states[0])
    return tuple(sum(s[j] << b for b, s in enumerate(lane_states)) for j in range(k))


def seed_words(cfg: PiTestConfig) -> LfsrState:
    """The k words written by the seeding step."""
    if cfg.lane_mode.kind == "word":
        return cfg.init
    return _pack([init for init, _ in plan_lanes(cfg)])


@lru_cache(maxsize=1024)
def _period(lfsr: LfsrDef, init: LfsrState) -> int:
    return lfsr_period(lfsr, init)


def _lane_automata(cfg: PiTestConfig) -> list[tuple[LfsrDef, LfsrState]]:
    if cfg.lane_mode.kind == "word":
        return [(cfg.lfsr, cfg.init)]
    return [(LfsrDef(BIT, taps), init) for init, taps in plan_lanes(cfg)]


def validate(cfg: PiTestConfig, mem: Memory) -> None:
    n = mem.cfg.n
    if cfg.m != mem.cfg.m:
        raise ValueError(f"config word width {cfg.m} != memory cell width {mem.cfg.m}")
    if cfg.k >= n:
        raise ValueError(f"LFSR has {cfg.k} stages but memory only {n} cells")
    if cfg.compare == "ring":
        steps = n - cfg.k if cfg.ring_closure == "window" else n
        for lfsr, init in _lane_automata(cfg):
            period = _period(lfsr, init)
            if steps % period:
                raise ValueError(f"ring compare needs {'n - k' if cfg.ring_closure == 'window' else 'n'} "
                                 f"= {steps} to be a multiple of the period {period}")


def expected_fin(cfg: PiTestConfig, n: int) -> LfsrState:
    """Oracle prediction of the last k cells after a fault-free pass."""
    finals = [expected_final(lfsr, init, n) for lfsr, init in _lane_automata(cfg)]
    return finals[0] if cfg.lane_mode.kind == "word" else _pack(finals)


# ------------------------------------------------------------------ execution


def initialize_tdb(cfg: PiTestConfig, mem: Memory) -> None:
    order = cfg.trajectory.permutation(mem.cfg.n)
    for j, v in enumerate(seed_words(cfg)):
        mem.write(order[j], v)


def _verdict(cfg: PiTestConfig, mem: Memory, order: tuple[int, ...], before: OpStats) -> IterationResult:
    n, k = mem.cfg.n, cfg.k
    stats = mem.stats - before
    fin = tuple(mem.read(order[n - k + j], charge=False) for j in range(k))
    if cfg.compare == "oracle":
        reference = expected_fin(cfg, n)
        compared = fin
    else:
        reference = seed_words(cfg)
        compared = fin if cfg.ring_closure == "window" else lfsr_advance(cfg.lfsr, fin, k)
    lanes = None
    if cfg.lane_mode.kind != "word":
        lanes = [all((a >> b & 1) == (e >> b & 1) for a, e in zip(compared, reference))
                 for b in range(cfg.m)]
    return IterationResult(fin, reference, compared == reference, stats, lanes, compared)


def pi_iteration(cfg: PiTestConfig, mem: Memory) -> IterationResult:
    """Single-port iteration: k + (k+1)(n-k) charged operations."""
    validate(cfg, mem)
    before = OpStats(*mem.stats.as_tuple())
    n, k = mem.cfg.n, cfg.k
    order = cfg.trajectory.permutation(n)
    initialize_tdb(cfg, mem)
    feedback = cfg.lfsr.feedback
    for i in range(n - k):
        window = [mem.read(order[i + j]) for j in range(k)]
        mem.write(order[i + k], feedback(window))
    return _verdict(cfg, mem, order, before)


def pi_iteration_dual_port(cfg: PiTestConfig, mem: Memory) -> IterationResult:
    """Two-port iteration: both operands read in one cycle, then one write.

    Costs k + 2(n-k) cycles.  Only defined for 2-stage automatons.
    """
    if mem.cfg.ports != 2:
        raise ValueError("dual-port iteration needs a 2-port memory")
    if cfg.k != 2:
        raise ValueError(f"unsupported dual-port stage count k={cfg.k} (only k=2)")
    validate(cfg, mem)
    before = OpStats(*mem.stats.as_tuple())
    n = mem.cfg.n
    order = cfg.trajectory.permutation(n)
    initialize_tdb(cfg, mem)
    feedback = cfg.lfsr.feedback
    for i in range(n - 2):
        r0, r1 = mem.cycle_dual(Read(order[i]), Read(order[i + 1]))
        mem.cycle_dual(Write(order[i + 2], feedback((r0, r1))), None)
    return _verdict(cfg, mem, order, before)


def run_iteration(cfg: PiTestConfig, mem: Memory) -> IterationResult:
    if cfg.port_mode == "dual":
        return pi_iteration_dual_port(cfg, mem)
    return pi_iteration(cfg, mem)


def check_schedule(schedule: list[PiTestConfig], mem: Memory) -> None:
    if not schedule:
        raise ValueError("empty PRT schedule")
    for idx, cfg in enumerate(schedule):
        try:
            validate(cfg, mem)
            if cfg.port_mode == "dual" and mem.cfg.ports != 2:
                raise ValueError("dual-port iteration on a single-port memory")
        except ValueError as exc:
            raise ValueError(f"schedule entry {idx}: {exc}") from None


def run_prt_schedule(schedule: list[PiTestConfig], mem: Memory,
                     stop_on_fail: bool = False) -> ScheduleVerdict:
    """Run iterations back to back; memory is not cleared in between."""
    check_schedule(schedule, mem)
    verdict = ScheduleVerdict()
    for idx, cfg in enumerate(schedule):
        res = run_iteration(cfg, mem)
        verdict.results.append(res)
        verdict.stats = verdict.stats + res.stats
        if not res.passed and verdict.first_failure is None:
            verdict.first_failure = idx
            if stop_on_fail:
                break
    return verdict


def bom_schedule(inits=((0, 1), (1, 0), (1, 1)), **kwargs) -> list[PiTestConfig]:
    """Bit-oriented schedule, one iteration per initial state."""
    return [PiTestConfig(BOM_LFSR, init, **kwargs) for init in inits]
