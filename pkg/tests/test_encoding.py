import pytest

from dasoda.errors import InputError
from dasoda.reductions.encoding import (
    ALPHA,
    block_alignment_audit,
    code_exclusivity,
    codes_well_formed,
    decode_blocks,
    encode_scs_to_soda,
    encoded_superstring,
    encoded_to_ham_path,
    fact1,
    fact2,
    fact3,
    flip,
    g,
    matches_at,
    phi,
)
from dasoda.reductions.scs import ham_path_to_superstring, rdhp_to_scs, sample_rdhp
from dasoda.soda import WILDCARD, SodaInstance, dumps_instance, loads_instance, occurs

FIXTURES = [(4, s, True) for s in range(4)] + [(n, s, False) for n in (4, 5, 6) for s in range(3)]


def build(n, seed, relax):
    graph, path = sample_rdhp(n, seed, relax=relax)
    scs = rdhp_to_scs(graph, relax=relax)
    return graph, path, scs, encode_scs_to_soda(scs)


def test_morphisms():
    assert phi((0, 1, 1)) == (0, 1, 1, 0, 1, 0)
    assert flip((0, 1)) == (1, 0)
    assert g(7, (1, 0, 1)) == (7, WILDCARD, 7)
    assert ALPHA == (0, 1, 0, 0, 0, 0, 1, 1)


@pytest.mark.parametrize("n,seed,relax", FIXTURES)
def test_facts_hold(n, seed, relax):
    _, _, scs, enc = build(n, seed, relax)
    letters = sum(r[:2] in ("v:", "w:") for r in scs.roles.values())
    assert letters == 2 * n - 2
    assert enc.width == max(1, (letters - 1).bit_length())
    assert enc.lp == 8 + 2 * enc.width and enc.ell == 9 * enc.lp
    assert codes_well_formed(enc)
    assert fact1(enc) and fact2(enc) and fact3(enc) and code_exclusivity(enc)
    assert len(enc.strings) == len(scs.strings) + 4 * n - 4
    assert len({s for s in enc.strings}) == len(enc.strings)
    ids = {x for s in enc.strings for x in s} - {WILDCARD}
    assert ids == set(range(1, len(enc.strings) + 1))


@pytest.mark.parametrize("n,seed,relax", FIXTURES)
def test_encoded_superstring(n, seed, relax):
    graph, path, scs, enc = build(n, seed, relax)
    q, offsets = encoded_superstring(enc, path)
    m, lp = graph.m, enc.lp
    assert len(q) == enc.target_length == (2 * m + 3 * n) * 3 * lp
    assert WILDCARD not in q
    solid = sum(x != WILDCARD for s in enc.strings for x in s)
    assert solid == 3 * lp * 2 * m + 5 * lp * (n - 2) + 7 * lp * 2 + lp * (4 * n - 4) == len(q)
    for s, o in zip(enc.strings, offsets):
        assert matches_at(q, s, o)
        # the only match of each string is the block-aligned one we placed
        assert occurs(s, q) == [o]
    assert block_alignment_audit(q, enc, offsets)
    assert decode_blocks(enc, q) == ham_path_to_superstring(scs, path)
    assert encoded_to_ham_path(enc, q) == path


def test_misaligned_placements():
    _, path, _, enc = build(4, 0, False)
    q, offsets = encoded_superstring(enc, path)
    shifted = list(offsets)
    shifted[0] += enc.lp
    with pytest.raises(InputError):
        block_alignment_audit(q, enc, shifted)
    # the same string with a vacant prefix: every match moves by l', none is aligned
    padded = (WILDCARD,) * enc.lp + q
    assert not block_alignment_audit(padded, enc, [o + enc.lp for o in offsets])
    with pytest.raises(InputError):
        block_alignment_audit(q, enc, offsets[:-1])


def test_soda_view_round_trips():
    _, _, _, enc = build(4, 1, True)
    inst = enc.to_soda()
    assert isinstance(inst, SodaInstance) and inst.sigma == enc.ell
    assert all(len(s) == enc.ell for s in inst.strings)
    text = dumps_instance(inst)
    assert loads_instance(text).strings == inst.strings and dumps_instance(loads_instance(text)) == text
