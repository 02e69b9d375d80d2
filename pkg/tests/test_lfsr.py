import itertools

import pytest

import oracles
from prtlab.galois import BIT, FieldSpec, gf_inv, gf_mul
from prtlab.lfsr import (BOM_LFSR, LfsrDef, expected_final, lfsr_advance, lfsr_from_generator,
                         lfsr_period, lfsr_sequence, lfsr_step)

F16 = FieldSpec(4, 0b10011)
WOM = lfsr_from_generator(F16, (1, 2, 2))


def test_from_generator_bom():
    lfsr = lfsr_from_generator(BIT, (1, 1, 1))
    assert lfsr.taps == (1, 1)
    assert lfsr.origin == (1, 1, 1)


def test_from_generator_wom_normalises_by_leading_inverse():
    inv = oracles.inverse_by_search(2, F16.poly, 4)
    assert inv == 9
    assert WOM.taps == (gf_mul(F16, inv, 1), gf_mul(F16, inv, 2)) == (9, 1)
    lead = gf_inv(F16, WOM.origin[-1])
    assert WOM.taps == tuple(gf_mul(F16, lead, a) for a in WOM.origin[:-1])


@pytest.mark.parametrize("coeffs", [(1, 0), (0, 1, 1), (1,), (1, 1, 0)])
def test_from_generator_degenerate(coeffs):
    with pytest.raises(ValueError):
        lfsr_from_generator(BIT, coeffs)


def test_lfsrdef_rejects_zero_first_tap():
    with pytest.raises(ValueError):
        LfsrDef(BIT, (0, 1))
    with pytest.raises(ValueError):
        LfsrDef(BIT, ())


@pytest.mark.parametrize("state,new,out", [((0, 1), (1, 1), 1), ((0, 0), (0, 0), 0), ((1, 0), (0, 1), 1)])
def test_step_examples(state, new, out):
    assert lfsr_step(BOM_LFSR, state) == (new, out)


@pytest.mark.parametrize("n,fin", [(2, (0, 1)), (6, (1, 1)), (8, (0, 1))])
def test_expected_final_examples(n, fin):
    assert expected_final(BOM_LFSR, (0, 1), n) == fin


def test_expected_final_needs_k_cells():
    with pytest.raises(ValueError):
        expected_final(BOM_LFSR, (0, 1), 1)


def test_period_bom():
    assert lfsr_period(BOM_LFSR, (0, 1)) == 3
    assert lfsr_period(BOM_LFSR, (1, 0)) == 3
    with pytest.raises(ValueError):
        lfsr_period(BOM_LFSR, (0, 0))


def test_period_wom_generator():
    # g(x) = 1 + 2x + 2x^2 over GF(16) mod 1+z+z^4; brute force gives 255 for every nonzero init
    for init in [(0, 1), (1, 0), (1, 2), (15, 15), (7, 0)]:
        assert oracles.brute_period(WOM.taps, init, F16.poly, 4) == 255
        assert lfsr_period(WOM, init) == 255


def test_sequence_matches_brute_force():
    assert lfsr_sequence(BOM_LFSR, (0, 1), 6) == [0, 1, 1, 0, 1, 1]
    assert lfsr_sequence(WOM, (3, 11), 40) == oracles.brute_sequence(WOM.taps, (3, 11), 40, F16.poly, 4)


def _small_lfsrs():
    yield BOM_LFSR
    yield LfsrDef(BIT, (1, 0, 1))
    yield LfsrDef(FieldSpec(2, 0b111), (1, 2))
    yield LfsrDef(FieldSpec(2, 0b111), (3, 0, 1))
    yield WOM
    yield LfsrDef(F16, (5, 0))


def _states(lfsr):
    return itertools.product(range(lfsr.spec.order), repeat=lfsr.k)


@pytest.mark.parametrize("lfsr", list(_small_lfsrs()), ids=str)
def test_step_is_bijection(lfsr):
    images = {lfsr_step(lfsr, s)[0] for s in _states(lfsr)}
    assert len(images) == lfsr.spec.order ** lfsr.k


@pytest.mark.parametrize("lfsr", list(_small_lfsrs()), ids=str)
def test_return_to_init_after_period(lfsr):
    for s in itertools.islice(_states(lfsr), 1, None, 7):
        t = lfsr_period(lfsr, s)
        assert expected_final(lfsr, s, lfsr.k + t) == s


@pytest.mark.parametrize("lfsr", list(_small_lfsrs())[:4], ids=str)
def test_superposition(lfsr):
    n = 11
    states = list(_states(lfsr))
    for a, b in itertools.product(states, repeat=2):
        xor = tuple(x ^ y for x, y in zip(a, b))
        fa, fb = expected_final(lfsr, a, n), expected_final(lfsr, b, n)
        assert expected_final(lfsr, xor, n) == tuple(x ^ y for x, y in zip(fa, fb))


@pytest.mark.parametrize("lfsr", list(_small_lfsrs())[:4], ids=str)
def test_single_stage_perturbation_reaches_final_state(lfsr):
    steps = 9
    for s in _states(lfsr):
        clean = lfsr_advance(lfsr, s, steps)
        for at in range(steps + 1):
            mid = lfsr_advance(lfsr, s, at)
            for stage in range(lfsr.k):
                for e in range(1, lfsr.spec.order):
                    bad = list(mid)
                    bad[stage] ^= e
                    assert lfsr_advance(lfsr, bad, steps - at) != clean
