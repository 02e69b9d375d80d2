"""JSON campaign configuration.

Example::

    {
      "memory":   {"n": 64, "m": 1, "ports": 1},
      "field":    {"m": 1, "poly": "0x3"},
      "lfsr":     {"taps": [1, 1]},
      "schedule": [{"init": [0, 1]}, {"init": [1, 0]}, {"init": [1, 1]}],
      "universe": {"classes": ["StuckAt"], "d_max": null}
    }

``lfsr`` takes either ``taps`` (feedback coefficients, newest stage last)
or ``generator`` (a_0..a_k of g(x)).  Schedule entries accept ``init``,
``trajectory`` {kind, seed}, ``compare``, ``port_mode``, ``lane_mode``
("word" | "parallel" | {"kind": "random", "seed": s}), ``ring_closure`` and
an ``lfsr`` override.  Unknown keys anywhere are an error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .galois import FieldSpec, default_field
from .lfsr import LfsrDef, lfsr_from_generator
from .memory import FAULT_CLASSES, MemoryConfig
from .pi_engine import LaneMode, PiTestConfig, Trajectory


class ConfigError(ValueError):
    pass


def _keys(section: str, d, allowed: set, required: set = frozenset()):
    if not isinstance(d, dict):
        raise ConfigError(f"{section}: expected an object")
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"{section}: unknown key(s) {sorted(unknown)}")
    missing = set(required) - set(d)
    if missing:
        raise ConfigError(f"{section}: missing key(s) {sorted(missing)}")


def parse_int(v) -> int:
    """Accept ints and hex/decimal strings ("0x13", "19")."""
    if isinstance(v, bool):
        raise ConfigError(f"expected an integer, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v, 0)
        except ValueError:
            pass
    raise ConfigError(f"expected an integer, got {v!r}")


@dataclass(frozen=True)
class UniverseSpec:
    classes: tuple[str, ...]
    d_max: int | None = None


@dataclass
class CampaignConfig:
    memory: MemoryConfig
    field: FieldSpec
    lfsr: LfsrDef
    schedule: list[PiTestConfig]
    universe: UniverseSpec | None = None


def parse_lfsr(section: str, d, spec: FieldSpec) -> LfsrDef:
    _keys(section, d, {"taps", "generator"})
    if ("taps" in d) == ("generator" in d):
        raise ConfigError(f"{section}: give exactly one of 'taps' or 'generator'")
    try:
        if "taps" in d:
            return LfsrDef(spec, tuple(parse_int(t) for t in d["taps"]))
        return lfsr_from_generator(spec, [parse_int(a) for a in d["generator"]])
    except ValueError as exc:
        raise ConfigError(f"{section}: {exc}") from None


def _parse_entry(idx: int, d, spec: FieldSpec, lfsr: LfsrDef) -> PiTestConfig:
    where = f"schedule[{idx}]"
    _keys(where, d, {"init", "trajectory", "compare", "port_mode", "lane_mode", "ring_closure", "lfsr"},
          {"init"})
    if "lfsr" in d:
        lfsr = parse_lfsr(f"{where}.lfsr", d["lfsr"], spec)
    traj = d.get("trajectory", {"kind": "ascending"})
    _keys(f"{where}.trajectory", traj, {"kind", "seed"}, {"kind"})
    lane = d.get("lane_mode", "word")
    if isinstance(lane, str):
        lane = {"kind": lane}
    _keys(f"{where}.lane_mode", lane, {"kind", "seed"}, {"kind"})
    try:
        return PiTestConfig(
            lfsr=lfsr,
            init=tuple(parse_int(v) for v in d["init"]),
            trajectory=Trajectory(traj["kind"], parse_int(traj.get("seed", 0))),
            compare=d.get("compare", "oracle"),
            port_mode=d.get("port_mode", "single"),
            lane_mode=LaneMode(lane["kind"], parse_int(lane.get("seed", 0))),
            ring_closure=d.get("ring_closure", "window"),
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_universe(d) -> UniverseSpec:
    _keys("universe", d, {"classes", "d_max"}, {"classes"})
    classes = d["classes"]
    if not classes:
        raise ConfigError("universe: class set is empty")
    for c in classes:
        if c not in FAULT_CLASSES:
            raise ConfigError(f"universe: unknown fault class {c!r}; known: {list(FAULT_CLASSES)}")
    d_max = d.get("d_max")
    return UniverseSpec(tuple(classes), None if d_max is None else parse_int(d_max))


def parse_config(doc: dict) -> CampaignConfig:
    _keys("config", doc, {"memory", "field", "lfsr", "schedule", "universe"}, {"memory", "lfsr", "schedule"})
    mem = doc["memory"]
    _keys("memory", mem, {"n", "m", "ports"}, {"n"})
    try:
        memory = MemoryConfig(parse_int(mem["n"]), parse_int(mem.get("m", 1)), parse_int(mem.get("ports", 1)))
    except ValueError as exc:
        raise ConfigError(f"memory: {exc}") from None

    if "field" in doc:
        fd = doc["field"]
        _keys("field", fd, {"m", "poly"}, {"poly"})
        try:
            spec = FieldSpec(parse_int(fd.get("m", memory.m)), parse_int(fd["poly"]))
        except ValueError as exc:
            raise ConfigError(f"field: {exc}") from None
    else:
        spec = default_field(memory.m)
    if spec.m != memory.m:
        raise ConfigError(f"field width {spec.m} does not match memory cell width {memory.m}")

    lfsr = parse_lfsr("lfsr", doc["lfsr"], spec)
    if not isinstance(doc["schedule"], list) or not doc["schedule"]:
        raise ConfigError("schedule: expected a nonempty list")
    schedule = [_parse_entry(i, e, spec, lfsr) for i, e in enumerate(doc["schedule"])]
    universe = parse_universe(doc["universe"]) if "universe" in doc else None
    return CampaignConfig(memory, spec, lfsr, schedule, universe)


def load_config(path) -> CampaignConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return parse_config(doc)


def entry_to_dict(cfg: PiTestConfig) -> dict:
    """Canonical JSON form of one schedule entry (used for hashing and reports)."""
    d = {
        "init": list(cfg.init),
        "lfsr": {"taps": list(cfg.lfsr.taps)},
        "field": {"m": cfg.lfsr.spec.m, "poly": hex(cfg.lfsr.spec.poly)},
        "trajectory": {"kind": cfg.trajectory.kind, "seed": cfg.trajectory.seed},
        "compare": cfg.compare,
        "port_mode": cfg.port_mode,
        "lane_mode": {"kind": cfg.lane_mode.kind, "seed": cfg.lane_mode.seed},
    }
    if cfg.compare == "ring":
        d["ring_closure"] = cfg.ring_closure
    return d
