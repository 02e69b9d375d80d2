"""Simulated RAM with injectable functional faults.

Fault semantics are applied in a fixed order on every access:
address decoder faults first (remap or drop the access), then stuck-at,
then transition faults, then coupling faults on the victim.  State coupling
is evaluated when the victim is read.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Literal, Union

MIN_CELLS = 3


class PortConflict(RuntimeError):
    """Both ports of a dual-port memory wrote the same cell in one cycle."""


@dataclass(frozen=True)
class MemoryConfig:
    n: int
    m: int = 1
    ports: int = 1

    def __post_init__(self):
        if self.n < MIN_CELLS:
            raise ValueError(f"need at least {MIN_CELLS} cells, got n={self.n}")
        if not 1 <= self.m <= 16:
            raise ValueError(f"cell width m={self.m} outside 1..16")
        if self.ports not in (1, 2):
            raise ValueError(f"ports must be 1 or 2, got {self.ports}")


# ------------------------------------------------------------------ faults


@dataclass(frozen=True)
class StuckAt:
    cell: int
    bit: int
    value: int


@dataclass(frozen=True)
class Transition:
    cell: int
    bit: int
    direction: Literal["up_blocked", "down_blocked"]


@dataclass(frozen=True)
class CouplingInversion:
    aggressor_cell: int
    aggressor_bit: int
    victim_cell: int
    victim_bit: int
    edge: Literal["rise", "fall"]


@dataclass(frozen=True)
class CouplingIdempotent:
    aggressor_cell: int
    aggressor_bit: int
    victim_cell: int
    victim_bit: int
    edge: Literal["rise", "fall"]
    forced_value: int


@dataclass(frozen=True)
class CouplingState:
    aggressor_cell: int
    aggressor_bit: int
    aggressor_state: int
    victim_cell: int
    victim_bit: int
    forced_value: int


@dataclass(frozen=True)
class AddressAlias:
    """Accesses to address_b land in the cell of address_a."""

    address_a: int
    address_b: int


@dataclass(frozen=True)
class AddressVoid:
    """No cell answers `address`: writes vanish, reads return all-`read_default`."""

    address: int
    read_default: int


Fault = Union[StuckAt, Transition, CouplingInversion, CouplingIdempotent,
              CouplingState, AddressAlias, AddressVoid]

FAULT_CLASSES = {cls.__name__: cls for cls in (
    StuckAt, Transition, CouplingInversion, CouplingIdempotent,
    CouplingState, AddressAlias, AddressVoid)}


def fault_class(f: Fault) -> str:
    return type(f).__name__


def fault_params(f: Fault) -> dict:
    return {fl.name: getattr(f, fl.name) for fl in fields(f)}


def fault_from_dict(kind: str, params: dict) -> Fault:
    try:
        cls = FAULT_CLASSES[kind]
    except KeyError:
        raise ValueError(f"unknown fault class {kind!r}") from None
    return cls(**params)


def validate_fault(cfg: MemoryConfig, f: Fault) -> None:
    def cell(c, what="cell"):
        if not 0 <= c < cfg.n:
            raise ValueError(f"{what} {c} out of range for n={cfg.n}")

    def bit(b):
        if not 0 <= b < cfg.m:
            raise ValueError(f"bit {b} out of range for m={cfg.m}")

    def binary(v, what):
        if v not in (0, 1):
            raise ValueError(f"{what} must be 0 or 1, got {v!r}")

    if isinstance(f, StuckAt):
        cell(f.cell), bit(f.bit), binary(f.value, "value")
    elif isinstance(f, Transition):
        cell(f.cell), bit(f.bit)
        if f.direction not in ("up_blocked", "down_blocked"):
            raise ValueError(f"bad transition direction {f.direction!r}")
    elif isinstance(f, (CouplingInversion, CouplingIdempotent, CouplingState)):
        cell(f.aggressor_cell, "aggressor cell"), bit(f.aggressor_bit)
        cell(f.victim_cell, "victim cell"), bit(f.victim_bit)
        if (f.aggressor_cell, f.aggressor_bit) == (f.victim_cell, f.victim_bit):
            raise ValueError("aggressor and victim must differ")
        if isinstance(f, CouplingState):
            binary(f.aggressor_state, "aggressor_state")
        else:
            if f.edge not in ("rise", "fall"):
                raise ValueError(f"bad coupling edge {f.edge!r}")
        if not isinstance(f, CouplingInversion):
            binary(f.forced_value, "forced_value")
    elif isinstance(f, AddressAlias):
        cell(f.address_a, "address"), cell(f.address_b, "address")
        if f.address_a == f.address_b:
            raise ValueError("address alias needs two distinct addresses")
    elif isinstance(f, AddressVoid):
        cell(f.address, "address"), binary(f.read_default, "read_default")
    else:
        raise TypeError(f"not a fault descriptor: {f!r}")


# ------------------------------------------------------------------ memory


@dataclass
class OpStats:
    reads: int = 0
    writes: int = 0
    cycles: int = 0

    def __sub__(self, other: "OpStats") -> "OpStats":
        return OpStats(self.reads - other.reads, self.writes - other.writes,
                       self.cycles - other.cycles)

    def __add__(self, other: "OpStats") -> "OpStats":
        return OpStats(self.reads + other.reads, self.writes + other.writes,
                       self.cycles + other.cycles)

    def as_tuple(self):
        return self.reads, self.writes, self.cycles


@dataclass(frozen=True)
class Read:
    addr: int


@dataclass(frozen=True)
class Write:
    addr: int
    value: int


class Memory:
    """One RAM instance.  Not thread-safe; use one instance per worker."""

    def __init__(self, cfg: MemoryConfig):
        self.cfg = cfg
        self.cells = [0] * cfg.n
        self.faults: list[Fault] = []
        self.stats = OpStats()

    def __repr__(self):
        return f"Memory(n={self.cfg.n}, m={self.cfg.m}, ports={self.cfg.ports}, faults={self.faults})"

    # fault management

    def inject(self, f: Fault) -> None:
        validate_fault(self.cfg, f)
        self.faults.append(f)

    def clear_faults(self) -> None:
        self.faults.clear()

    def reset_stats(self) -> None:
        self.stats = OpStats()

    # internals

    def _check(self, port: int, addr: int, value: int | None = None):
        if not 0 <= port < self.cfg.ports:
            raise ValueError(f"port {port} does not exist on a {self.cfg.ports}-port memory")
        if not 0 <= addr < self.cfg.n:
            raise IndexError(f"address {addr} out of range 0..{self.cfg.n - 1}")
        if value is not None and not 0 <= value < (1 << self.cfg.m):
            raise ValueError(f"value {value} does not fit in {self.cfg.m} bits")

    def _decode(self, addr: int) -> int | None:
        """Physical cell for `addr`, or None if the decoder selects nothing."""
        for f in self.faults:
            if isinstance(f, AddressVoid) and f.address == addr:
                return None
            if isinstance(f, AddressAlias) and f.address_b == addr:
                return f.address_a
        return addr

    def _store(self, cell: int, value: int) -> None:
        old = self.cells[cell]
        new = value
        for f in self.faults:
            if isinstance(f, StuckAt) and f.cell == cell:
                new = (new & ~(1 << f.bit)) | (f.value << f.bit)
        for f in self.faults:
            if isinstance(f, Transition) and f.cell == cell:
                was, want = old >> f.bit & 1, new >> f.bit & 1
                if (f.direction == "up_blocked" and not was and want) or \
                        (f.direction == "down_blocked" and was and not want):
                    new ^= 1 << f.bit
        self.cells[cell] = new
        for f in self.faults:
            if not isinstance(f, (CouplingInversion, CouplingIdempotent)) or f.aggressor_cell != cell:
                continue
            was, now = old >> f.aggressor_bit & 1, new >> f.aggressor_bit & 1
            fired = (was, now) == ((0, 1) if f.edge == "rise" else (1, 0))
            if not fired:
                continue
            vb = 1 << f.victim_bit
            if isinstance(f, CouplingInversion):
                self.cells[f.victim_cell] ^= vb
            elif f.forced_value:
                self.cells[f.victim_cell] |= vb
            else:
                self.cells[f.victim_cell] &= ~vb

    def _load(self, addr: int) -> int:
        cell = self._decode(addr)
        if cell is None:
            return (1 << self.cfg.m) - 1 if self._void(addr).read_default else 0
        v = self.cells[cell]
        for f in self.faults:
            if isinstance(f, StuckAt) and f.cell == cell:
                v = (v & ~(1 << f.bit)) | (f.value << f.bit)
            elif isinstance(f, CouplingState) and f.victim_cell == cell:
                if (self.cells[f.aggressor_cell] >> f.aggressor_bit & 1) == f.aggressor_state:
                    v = (v & ~(1 << f.victim_bit)) | (f.forced_value << f.victim_bit)
        return v

    def _void(self, addr: int) -> AddressVoid:
        return next(f for f in self.faults if isinstance(f, AddressVoid) and f.address == addr)

    def _write(self, addr: int, value: int) -> None:
        cell = self._decode(addr)
        if cell is not None:
            self._store(cell, value)

    # public access

    def read(self, addr: int, port: int = 0, charge: bool = True) -> int:
        """Read one cell.  `charge=False` is a diagnostic read kept out of stats."""
        self._check(port, addr)
        if charge:
            self.stats.reads += 1
            self.stats.cycles += 1
        return self._load(addr)

    def write(self, addr: int, value: int, port: int = 0) -> None:
        self._check(port, addr, value)
        self.stats.writes += 1
        self.stats.cycles += 1
        self._write(addr, value)

    def cycle_dual(self, op_a: Read | Write | None, op_b: Read | Write | None):
        """One dual-port cycle: `op_a` on port 0 and `op_b` on port 1.

        Reads see the memory as it was before the cycle's writes.  Either
        op may be None for an idle port.  Returns (result_a, result_b), with
        None for writes and idle ports.
        """
        if self.cfg.ports != 2:
            raise ValueError("dual-port cycle on a single-port memory")
        ops = (op_a, op_b)
        for port, op in enumerate(ops):
            if op is not None:
                self._check(port, op.addr, op.value if isinstance(op, Write) else None)
        if isinstance(op_a, Write) and isinstance(op_b, Write) and op_a.addr == op_b.addr:
            raise PortConflict(f"both ports write address {op_a.addr} in the same cycle")
        results = [self._load(op.addr) if isinstance(op, Read) else None for op in ops]
        for op in ops:
            if isinstance(op, Write):
                self._write(op.addr, op.value)
        self.stats.reads += sum(isinstance(op, Read) for op in ops)
        self.stats.writes += sum(isinstance(op, Write) for op in ops)
        self.stats.cycles += 1
        return results[0], results[1]

    def dump(self) -> list[int]:
        """Raw stored cell contents, bypassing read-side fault effects."""
        return list(self.cells)
