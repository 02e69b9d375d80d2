import itertools

import pytest
from hypothesis import given, strategies as st

import oracles
from prtlab.galois import (BIT, DEFAULT_POLYS, FieldSpec, XorNetwork, clmul, default_field,
                           eval_xor_network, gf_add, gf_inv, gf_mul, mul_by_const_matrix,
                           naive_gate_count, parse_netlist, poly_divmod, poly_is_irreducible,
                           synthesize_multiplier)

F16 = FieldSpec(4, 0b10011)


@pytest.mark.parametrize("a,b,expected", [(5, 5, 0), (5, 0, 5), (5, 3, 6)])
def test_gf_add(a, b, expected):
    assert gf_add(a, b) == expected


@pytest.mark.parametrize("a,b,expected", [(2, 2, 4), (8, 2, 3), (1, 13, 13)])
def test_gf_mul_examples(a, b, expected):
    assert gf_mul(F16, a, b) == expected
    assert oracles.schoolbook_mul(a, b, F16.poly, 4) == expected


def test_gf_inv_examples():
    assert gf_inv(F16, 1) == 1
    assert gf_inv(F16, 2) == 9 == oracles.inverse_by_search(2, F16.poly, 4)
    with pytest.raises(ZeroDivisionError, match="no inverse of zero"):
        gf_inv(F16, 0)


@pytest.mark.parametrize("p,expected", [(0b10011, True), (0b11, True), (0b10101, False), (0b111, True)])
def test_irreducible_examples(p, expected):
    assert poly_is_irreducible(p) is expected


def test_irreducible_rejects_constants():
    for p in (0, 1):
        with pytest.raises(ValueError):
            poly_is_irreducible(p)


def test_irreducible_matches_factorisation_oracle():
    reducible = oracles.reducible_polys(8)
    for p in range(2, 1 << 9):
        assert poly_is_irreducible(p) == (p not in reducible), hex(p)


def test_default_polys_are_fields():
    for m in DEFAULT_POLYS:
        assert default_field(m).m == m


def test_fieldspec_validation():
    with pytest.raises(ValueError, match="reducible"):
        FieldSpec(4, 0b10101)
    with pytest.raises(ValueError, match="degree"):
        FieldSpec(4, 0b1011)
    with pytest.raises(ValueError):
        FieldSpec(17, 1 << 17 | 0b1001)
    assert gf_mul(BIT, 1, 1) == 1 and gf_mul(BIT, 1, 0) == 0


def test_poly_divmod_roundtrip():
    for a in range(1, 200):
        for b in (0b11, 0b111, 0b1011, 0b10011):
            q, r = poly_divmod(a, b)
            assert clmul(q, b) ^ r == a
            assert r.bit_length() < b.bit_length()


@pytest.mark.parametrize("m", range(1, 9))
def test_field_axioms_exhaustive(m):
    spec = default_field(m)
    els = range(spec.order)
    table = [[gf_mul(spec, a, b) for b in els] for a in els]
    for a in els:
        assert table[a][1] == a and table[a][0] == 0
        if a:
            assert table[a][gf_inv(spec, a)] == 1
    if m > 5:
        # associativity/distributivity on a sample; the full cube is 2^24 for m=8
        triples = itertools.islice(itertools.product(els, repeat=3), 0, None, 997)
    else:
        triples = itertools.product(els, repeat=3)
    for a, b, c in triples:
        assert table[a][b] == table[b][a]
        assert table[table[a][b]][c] == table[a][table[b][c]]
        assert table[a][b ^ c] == table[a][b] ^ table[a][c]


@pytest.mark.parametrize("m", range(1, 9))
def test_gf_mul_matches_schoolbook(m):
    spec = default_field(m)
    expected = oracles.schoolbook_table(spec.poly, m)
    for a in range(spec.order):
        row = expected[a]
        assert [gf_mul(spec, a, b) for b in range(spec.order)] == row.tolist()


@given(st.integers(9, 16).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, (1 << m) - 1),
                                                       st.integers(0, (1 << m) - 1))))
def test_gf_mul_wide_fields(args):
    m, a, b = args
    spec = default_field(m)
    assert gf_mul(spec, a, b) == oracles.schoolbook_mul(a, b, spec.poly, m)
    if a:
        assert gf_mul(spec, a, gf_inv(spec, a)) == 1


def test_const_matrix_examples():
    ident = [[int(i == j) for j in range(4)] for i in range(4)]
    assert mul_by_const_matrix(F16, 1) == ident
    assert mul_by_const_matrix(F16, 0) == [[0] * 4 for _ in range(4)]
    m2 = mul_by_const_matrix(F16, 2)
    columns = [sum(m2[i][j] << i for i in range(4)) for j in range(4)]
    assert columns == [2, 4, 8, 3]
    assert columns == [gf_mul(F16, 2, 1 << j) for j in range(4)]


def test_const_matrix_applies_multiplication():
    for c in range(16):
        mat = mul_by_const_matrix(F16, c)
        for x in range(16):
            y = sum((sum(mat[i][j] & (x >> j) for j in range(4)) & 1) << i for i in range(4))
            assert y == gf_mul(F16, c, x)


def test_synth_examples():
    assert synthesize_multiplier(F16, 1).gate_count == 0
    assert synthesize_multiplier(F16, 0).gate_count == 0
    assert synthesize_multiplier(F16, 2).gate_count == 1 == naive_gate_count(F16, 2)


def _min_gates_bruteforce(m, targets, limit):
    """Iterative deepening over gate sequences; independent of the BFS in galois."""
    units = [1 << i for i in range(m)]
    need = {t for t in targets if bin(t).count("1") >= 2}

    def search(have, depth):
        if need <= have:
            return True
        if depth == 0:
            return False
        hv = sorted(have)
        for i, a in enumerate(hv):
            for b in hv[i + 1:]:
                v = a ^ b
                if v not in have and search(have | {v}, depth - 1):
                    return True
        return False

    for d in range(limit + 1):
        if search(frozenset(units), d):
            return d
    return None


@pytest.mark.parametrize("poly,m", [(0b111, 2), (0b1011, 3), (0b1101, 3)])
def test_synth_minimal_small_fields(poly, m):
    spec = FieldSpec(m, poly)
    for c in range(spec.order):
        rows = [sum(b << j for j, b in enumerate(r)) for r in mul_by_const_matrix(spec, c)]
        net = synthesize_multiplier(spec, c)
        assert net.gate_count == _min_gates_bruteforce(m, rows, naive_gate_count(spec, c))


def test_synth_minimal_gf16():
    # slower brute force, so only the constants where CSE could matter
    for c in (3, 5, 7, 10, 14, 15):
        rows = [sum(b << j for j, b in enumerate(r)) for r in mul_by_const_matrix(F16, c)]
        assert synthesize_multiplier(F16, c).gate_count == _min_gates_bruteforce(4, rows, 6)


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6, 8])
def test_synth_equivalence_exhaustive(m):
    spec = default_field(m)
    for c in range(spec.order):
        net = synthesize_multiplier(spec, c)
        assert net.gate_count <= naive_gate_count(spec, c)
        for x in range(spec.order):
            assert eval_xor_network(net, x) == gf_mul(spec, c, x)


@given(st.integers(9, 16).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, (1 << m) - 1))))
def test_synth_equivalence_wide(args):
    m, c = args
    spec = default_field(m)
    net = synthesize_multiplier(spec, c)
    assert net.gate_count <= naive_gate_count(spec, c)
    for i in range(m):
        assert eval_xor_network(net, 1 << i) == gf_mul(spec, c, 1 << i)
    x = (0x5A5A5A5A >> 3) & spec.mask
    assert eval_xor_network(net, x) == gf_mul(spec, c, x)


def test_netlist_roundtrip_and_format():
    net = synthesize_multiplier(F16, 2)
    text = net.to_netlist()
    assert text.splitlines()[0] == "t0 = x0 ^ x3"
    assert all(line.startswith(("t", "y")) for line in text.splitlines())
    back = parse_netlist(text, 4)
    assert back.gates == net.gates and back.outputs == net.outputs
    for c in range(16):
        net = synthesize_multiplier(F16, c)
        back = parse_netlist(net.to_netlist(), 4)
        assert [eval_xor_network(back, x) for x in range(16)] == [gf_mul(F16, c, x) for x in range(16)]


@pytest.mark.parametrize("text", [
    "t0 = x0 ^ t1\ny0 = t0\ny1 = x1\n",        # forward reference
    "t0 = x0 ^ x9\ny0 = t0\ny1 = x1\n",        # unknown input
    "t0 = x0 ^ 1\ny0 = t0\ny1 = x1\n",         # constant operand
    "t0 = x0 ^ x1\ny0 = t0\n",                 # missing output
])
def test_netlist_rejects(text):
    with pytest.raises(ValueError):
        parse_netlist(text, 2)


def test_network_must_be_acyclic():
    with pytest.raises(ValueError):
        XorNetwork(2, [(0, 2)], [0, 1])
