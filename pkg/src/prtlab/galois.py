"""Arithmetic over GF(2)[z] and the extension fields GF(2^m).

Polynomials and field elements are plain ints used as coefficient bit
vectors: bit i holds the coefficient of z^i.  A field is described by a
:class:`FieldSpec` (word width plus reduction polynomial).

The second half of the module builds XOR-only circuits that multiply a
field element by a fixed constant, and a small text netlist format for them.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

MAX_M = 16
# exact (breadth-first) multiplier search is only run up to this width
EXACT_SYNTH_MAX_M = 4


def degree(p: int) -> int:
    """Degree of a GF(2) polynomial; -1 for the zero polynomial."""
    return p.bit_length() - 1


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2) polynomials."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = degree(b)
    q = 0
    while a and degree(a) >= db:
        shift = degree(a) - db
        q |= 1 << shift
        a ^= b << shift
    return q, a


def poly_mod(a: int, b: int) -> int:
    return poly_divmod(a, b)[1]


@lru_cache(maxsize=None)
def poly_is_irreducible(p: int) -> bool:
    """True iff `p` has no factor of degree 1..deg(p)//2 over GF(2).

    Plain trial division; fine for the degrees used here (<= 16).
    """
    d = degree(p)
    if d < 1:
        raise ValueError(f"polynomial {p:#x} has degree {d}; irreducibility needs degree >= 1")
    for divisor in range(2, 1 << (d // 2 + 1)):
        if poly_mod(p, divisor) == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """GF(2^m) with reduction polynomial `poly` (bit m must be set)."""

    m: int
    poly: int

    def __post_init__(self):
        if not 1 <= self.m <= MAX_M:
            raise ValueError(f"word width m={self.m} outside 1..{MAX_M}")
        if degree(self.poly) != self.m:
            raise ValueError(f"poly {self.poly:#x} has degree {degree(self.poly)}, expected {self.m}")
        if not poly_is_irreducible(self.poly):
            raise ValueError(f"poly {self.poly:#x} is reducible over GF(2)")

    @property
    def order(self) -> int:
        return 1 << self.m

    @property
    def mask(self) -> int:
        return (1 << self.m) - 1

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise ValueError(f"{a} is not an element of GF(2^{self.m})")
        return a

    def __str__(self):
        return f"GF(2^{self.m}) mod {self.poly:#x}"


# Conventional reduction polynomials; the m=4 entry is 1 + z + z^4.
DEFAULT_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0x11B,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}

BIT = FieldSpec(1, 0b11)


def default_field(m: int) -> FieldSpec:
    return FieldSpec(m, DEFAULT_POLYS[m])


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(spec: FieldSpec, a: int, b: int) -> int:
    """Product of `a` and `b` in `spec`, reduced as it is accumulated."""
    m, poly = spec.m, spec.poly
    top = 1 << m
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return r


def gf_pow(spec: FieldSpec, a: int, e: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = gf_mul(spec, r, a)
        a = gf_mul(spec, a, a)
        e >>= 1
    return r


def gf_inv(spec: FieldSpec, a: int) -> int:
    """Multiplicative inverse via a^(2^m - 2)."""
    if a == 0:
        raise ZeroDivisionError("no inverse of zero")
    spec.check(a)
    return gf_pow(spec, a, spec.order - 2)


def mul_by_const_matrix(spec: FieldSpec, c: int) -> list[list[int]]:
    """m x m GF(2) matrix M with M.x == c*x; M[i][j] is bit i of c*z^j."""
    cols = [gf_mul(spec, c, 1 << j) for j in range(spec.m)]
    return [[(cols[j] >> i) & 1 for j in range(spec.m)] for i in range(spec.m)]


def matrix_rows(spec: FieldSpec, c: int) -> list[int]:
    """Rows of the constant-multiplication matrix, each as an input bitmask."""
    return [sum(bit << j for j, bit in enumerate(row)) for row in mul_by_const_matrix(spec, c)]


def naive_gate_count(spec: FieldSpec, c: int) -> int:
    return sum(max(bin(r).count("1") - 1, 0) for r in matrix_rows(spec, c))


# ---------------------------------------------------------------- XOR networks


@dataclass
class XorNetwork:
    """Straight-line XOR program over inputs x0..x{m-1}.

    Signals are numbered: 0..m-1 are the inputs, m+i is the output of gate i.
    `outputs[j]` is the signal driving output bit j, or None when that bit is
    tied to zero (only happens for the constant 0).
    """

    m: int
    gates: list[tuple[int, int]] = field(default_factory=list)
    outputs: list[int | None] = field(default_factory=list)
    constant: int | None = None

    def __post_init__(self):
        for i, (a, b) in enumerate(self.gates):
            if not (0 <= a < self.m + i and 0 <= b < self.m + i):
                raise ValueError(f"gate t{i} references a signal not yet defined")
        if len(self.outputs) != self.m:
            raise ValueError(f"expected {self.m} outputs, got {len(self.outputs)}")
        for s in self.outputs:
            if s is not None and not 0 <= s < self.m + len(self.gates):
                raise ValueError(f"output references unknown signal {s}")

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    def signal_name(self, s: int) -> str:
        return f"x{s}" if s < self.m else f"t{s - self.m}"

    def to_netlist(self) -> str:
        lines = []
        for i, (a, b) in enumerate(self.gates):
            lines.append(f"t{i} = {self.signal_name(a)} ^ {self.signal_name(b)}")
        for j, s in enumerate(self.outputs):
            lines.append(f"y{j} = {'0' if s is None else self.signal_name(s)}")
        return "\n".join(lines) + "\n"


def eval_xor_network(net: XorNetwork, x: int) -> int:
    values = [(x >> i) & 1 for i in range(net.m)]
    for a, b in net.gates:
        values.append(values[a] ^ values[b])
    y = 0
    for j, s in enumerate(net.outputs):
        if s is not None:
            y |= values[s] << j
    return y


_GATE_RE = re.compile(r"^t(\d+)\s*=\s*([xt]\d+)\s*\^\s*([xt]\d+)$")
_OUT_RE = re.compile(r"^y(\d+)\s*=\s*([xt]\d+|0)$")


def parse_netlist(text: str, m: int) -> XorNetwork:
    """Inverse of :meth:`XorNetwork.to_netlist`."""
    gates: list[tuple[int, int]] = []
    outputs: dict[int, int | None] = {}

    def sig(name: str) -> int:
        idx = int(name[1:])
        if name[0] == "x":
            if idx >= m:
                raise ValueError(f"input {name} out of range for m={m}")
            return idx
        if idx >= len(gates):
            raise ValueError(f"{name} used before definition")
        return m + idx

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if mt := _GATE_RE.match(line):
            if outputs:
                raise ValueError(f"line {lineno}: gate after output bindings")
            if int(mt.group(1)) != len(gates):
                raise ValueError(f"line {lineno}: gates must be numbered consecutively")
            gates.append((sig(mt.group(2)), sig(mt.group(3))))
        elif mo := _OUT_RE.match(line):
            j = int(mo.group(1))
            if j >= m or j in outputs:
                raise ValueError(f"line {lineno}: bad or duplicate output y{j}")
            outputs[j] = None if mo.group(2) == "0" else sig(mo.group(2))
        else:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}")
    if sorted(outputs) != list(range(m)):
        raise ValueError("missing output bindings")
    return XorNetwork(m, gates, [outputs[j] for j in range(m)])


def _exact_program(m: int, targets: list[int]) -> list[tuple[int, int]] | None:
    """Shortest XOR program producing every target vector.

    Breadth-first search over the *set* of vectors computed so far; with
    m <= 4 there are at most 2^(2^m - m - 1) such sets, so this is exhaustive
    and returns a minimum-gate program.  Vectors are input bitmasks.
    """
    units = sum(1 << (1 << i) for i in range(m))
    need = 0
    for t in targets:
        if bin(t).count("1") >= 2:
            need |= 1 << t
    if need & ~units == 0:
        return []
    parent: dict[int, tuple[int, int, int] | None] = {units: None}
    frontier = [units]
    while frontier:
        nxt = []
        for state in frontier:
            present = [v for v in range(1, 1 << m) if state >> v & 1]
            for i, a in enumerate(present):
                for b in present[i + 1:]:
                    v = a ^ b
                    new = state | (1 << v)
                    if new == state or new in parent:
                        continue
                    parent[new] = (state, a, b)
                    if need & ~new == 0:
                        steps = []
                        s = new
                        while parent[s] is not None:
                            prev, x, y = parent[s]
                            steps.append((x, y))
                            s = prev
                        return steps[::-1]
                    nxt.append(new)
        frontier = nxt
    return None


def _greedy_program(m: int, targets: list[int]):
    """Pairwise common-subexpression elimination (Paar-style greedy).

    Returns (gates, outputs) over signal indices.
    """
    rows = [{i for i in range(m) if t >> i & 1} for t in targets]
    gates: list[tuple[int, int]] = []
    while True:
        pairs = Counter()
        for r in rows:
            members = sorted(r)
            for i, a in enumerate(members):
                for b in members[i + 1:]:
                    pairs[(a, b)] += 1
        if not pairs:
            break
        (a, b), count = min(pairs.items(), key=lambda kv: (-kv[1], kv[0]))
        if count < 2:
            break
        s = m + len(gates)
        gates.append((a, b))
        for r in rows:
            if a in r and b in r:
                r -= {a, b}
                r.add(s)
    outputs: list[int | None] = []
    for r in rows:
        members = sorted(r)
        if not members:
            outputs.append(None)
            continue
        acc = members[0]
        for s in members[1:]:
            gates.append((acc, s))
            acc = m + len(gates) - 1
        outputs.append(acc)
    return gates, outputs


def synthesize_multiplier(spec: FieldSpec, c: int) -> XorNetwork:
    """XOR-only network computing x -> c*x in `spec`.

    Minimum gate count for m <= 4, greedy CSE above that.  Never worse than
    building every output row independently.
    """
    spec.check(c)
    m = spec.m
    targets = matrix_rows(spec, c)
    steps = _exact_program(m, targets) if m <= EXACT_SYNTH_MAX_M else None
    if steps is None:
        gates, outputs = _greedy_program(m, targets)
        return XorNetwork(m, gates, outputs, constant=c)

    # map vectors to signal numbers as the program is replayed
    signal_of = {1 << i: i for i in range(m)}
    gates = []
    for a, b in steps:
        gates.append((signal_of[a], signal_of[b]))
        signal_of[a ^ b] = m + len(gates) - 1
    outputs = [signal_of[t] if t else None for t in targets]
    return XorNetwork(m, gates, outputs, constant=c)
