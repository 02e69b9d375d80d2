"""March test notation: parse, format, execute.

Text form::

    {a(w0); u(r0,w1); d(r1,w0)}

Directions are ``u`` (ascending), ``d`` (descending) and ``a`` (any order,
run ascending).  Data values are hex so word-oriented tests can be written,
e.g. ``u(w5,r5)``.  Whitespace is ignored everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from .memory import Memory

DIRECTIONS = ("u", "d", "a")
HEX = "0123456789abcdefABCDEF"

MARCH_A = "{a(w0); u(r0,w1); d(r1,w0)}"
WRITE_READ_SMOKE = "{u(w0); u(r0); u(w1); u(r1)}"


class MarchSyntaxError(ValueError):
    def __init__(self, offset: int, message: str, text: str = ""):
        self.offset = offset
        self.message = message
        super().__init__(f"at offset {offset}: {message}" + (f"\n  {text}\n  {' ' * offset}^" if text else ""))


@dataclass(frozen=True)
class MarchOp:
    kind: Literal["w", "r"]
    value: int

    def __str__(self):
        return f"{self.kind}{self.value:x}"


@dataclass(frozen=True)
class MarchElement:
    direction: Literal["u", "d", "a"]
    ops: tuple[MarchOp, ...]

    def __str__(self):
        return f"{self.direction}({','.join(map(str, self.ops))})"


@dataclass(frozen=True)
class MarchTest:
    elements: tuple[MarchElement, ...]

    def __str__(self):
        return format_march(self)

    @property
    def ops_per_address(self) -> int:
        return sum(len(e.ops) for e in self.elements)

    def max_value(self) -> int:
        return max(op.value for e in self.elements for op in e.ops)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def error(self, expected: str):
        got = self.peek()
        found = repr(got) if got else "end of input"
        raise MarchSyntaxError(self.pos, f"expected {expected}, found {found}", self.text)

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(repr(ch))
        self.pos += 1

    def parse(self) -> MarchTest:
        self.expect("{")
        elements = [self.element()]
        while self.peek() == ";":
            self.pos += 1
            elements.append(self.element())
        self.expect("}")
        if self.peek():
            self.error("end of input")
        return MarchTest(tuple(elements))

    def element(self) -> MarchElement:
        d = self.peek()
        if d not in DIRECTIONS or not d:
            self.error("direction 'u', 'd' or 'a'")
        self.pos += 1
        self.expect("(")
        if self.peek() == ")":
            self.error("an operation (empty element)")
        ops = [self.op()]
        while self.peek() == ",":
            self.pos += 1
            ops.append(self.op())
        self.expect(")")
        return MarchElement(d, tuple(ops))

    def op(self) -> MarchOp:
        kind = self.peek()
        if kind not in ("w", "r") or not kind:
            self.error("operation 'w' or 'r'")
        self.pos += 1
        digits = ""
        while (c := self.peek()) and c in HEX:
            digits += c
            self.pos += 1
        if not digits:
            self.error("hex data digit")
        return MarchOp(kind, int(digits, 16))


def parse_march(text: str) -> MarchTest:
    return _Parser(text).parse()


def format_march(t: MarchTest) -> str:
    return "{" + "; ".join(str(e) for e in t.elements) + "}"


@dataclass(frozen=True)
class MarchFailure:
    element: int
    op: int
    address: int
    read: int
    expected: int


@dataclass
class MarchVerdict:
    failures: list[MarchFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def first(self) -> MarchFailure | None:
        return self.failures[0] if self.failures else None


def addresses(direction: str, n: int) -> range:
    return range(n - 1, -1, -1) if direction == "d" else range(n)


def execute_march(t: MarchTest, mem: Memory, full_trace: bool = False) -> MarchVerdict:
    """Run `t` on `mem`.  Stops at the first mismatching read unless `full_trace`."""
    limit = 1 << mem.cfg.m
    for e in t.elements:
        for op in e.ops:
            if op.value >= limit:
                raise ValueError(f"data {op.value:#x} does not fit a {mem.cfg.m}-bit cell")
    verdict = MarchVerdict()
    for ei, e in enumerate(t.elements):
        for addr in addresses(e.direction, mem.cfg.n):
            for oi, op in enumerate(e.ops):
                if op.kind == "w":
                    mem.write(addr, op.value)
                    continue
                got = mem.read(addr)
                if got != op.value:
                    verdict.failures.append(MarchFailure(ei, oi, addr, got, op.value))
                    if not full_trace:
                        return verdict
    return verdict
