"""The virtual Fibonacci LFSR over GF(2^m) whose stages are memory cells.

A state is a tuple of k field elements (s_i, ..., s_{i+k-1}); one step
appends s_{i+k} = sum_j taps[j] * s_{i+j} and drops s_i.
"""

from __future__ import annotations

from dataclasses import dataclass

from .galois import BIT, FieldSpec, gf_inv, gf_mul

LfsrState = tuple[int, ...]


@dataclass(frozen=True)
class LfsrDef:
    spec: FieldSpec
    taps: tuple[int, ...]
    # raw generator coefficients a_0..a_k, if the taps were derived from one
    origin: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "taps", tuple(self.taps))
        if not self.taps:
            raise ValueError("an LFSR needs at least one stage")
        for t in self.taps:
            self.spec.check(t)
        if self.taps[0] == 0:
            raise ValueError("taps[0] must be nonzero, otherwise the state map is not invertible")

    @property
    def k(self) -> int:
        return len(self.taps)

    @property
    def is_binary(self) -> bool:
        """All taps in {0, 1}: the automaton acts bitwise, lane by lane."""
        return all(t in (0, 1) for t in self.taps)

    def check_state(self, s) -> LfsrState:
        s = tuple(s)
        if len(s) != self.k:
            raise ValueError(f"state has {len(s)} stages, LFSR has {self.k}")
        for v in s:
            self.spec.check(v)
        return s

    def feedback(self, s) -> int:
        acc = 0
        for t, v in zip(self.taps, s):
            if t == 1:
                acc ^= v
            elif t:
                acc ^= gf_mul(self.spec, t, v)
        return acc


def lfsr_from_generator(spec: FieldSpec, coefficients) -> LfsrDef:
    """Normalise g(x) = a_0 + a_1 x + ... + a_k x^k into feedback taps.

    The characteristic relation sum_j a_j s_{i+j} = 0 is solved for the
    newest stage, so taps[j] = a_j / a_k.
    """
    a = tuple(coefficients)
    if len(a) < 2:
        raise ValueError("generator needs degree >= 1")
    for c in a:
        spec.check(c)
    if a[-1] == 0 or a[0] == 0:
        raise ValueError(f"degenerate generator {a}: a_0 and a_k must be nonzero")
    lead_inv = gf_inv(spec, a[-1])
    taps = tuple(gf_mul(spec, lead_inv, c) for c in a[:-1])
    return LfsrDef(spec, taps, origin=a)


def lfsr_step(lfsr: LfsrDef, s) -> tuple[LfsrState, int]:
    out = lfsr.feedback(s)
    return tuple(s[1:]) + (out,), out


def lfsr_advance(lfsr: LfsrDef, s, steps: int) -> LfsrState:
    s = tuple(s)
    for _ in range(steps):
        s = tuple(s[1:]) + (lfsr.feedback(s),)
    return s


def lfsr_sequence(lfsr: LfsrDef, init, n: int) -> list[int]:
    """The n cell values a fault-free pass writes along its trajectory."""
    seq = list(lfsr.check_state(init))
    k = lfsr.k
    while len(seq) < n:
        seq.append(lfsr.feedback(seq[-k:]))
    return seq[:n]


def expected_final(lfsr: LfsrDef, init, n: int) -> LfsrState:
    """Fin*: the last k of n cells after a fault-free pass (n - k steps)."""
    init = lfsr.check_state(init)
    if n < lfsr.k:
        raise ValueError(f"need n >= k ({n} < {lfsr.k})")
    return lfsr_advance(lfsr, init, n - lfsr.k)


def lfsr_period(lfsr: LfsrDef, init) -> int:
    """Length of the orbit through `init`."""
    init = lfsr.check_state(init)
    if not any(init):
        raise ValueError("the all-zero state is a fixed point; no usable period")
    cap = lfsr.spec.order ** lfsr.k
    s = init
    for t in range(1, cap + 1):
        s = tuple(s[1:]) + (lfsr.feedback(s),)
        if s == init:
            return t
    raise RuntimeError("orbit did not close; taps[0] == 0?")  # unreachable for valid LfsrDef


# bit-oriented pseudo-ring recurrence: s_{i+2} = s_i xor s_{i+1}
BOM_LFSR = LfsrDef(BIT, (1, 1), origin=(1, 1, 1))
