import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dasoda.double_array import greedy_build, validate
from dasoda.errors import CapacityError, InputError
from dasoda.soda import (
    WILDCARD as W,
    SodaInstance,
    SodaSolution,
    brute_force_soda,
    check_solution,
    compatible,
    dumps_instance,
    exact_build,
    k_soda_decide,
    loads_instance,
    materialize,
    occurs,
    solve_sigma2,
    solve_sigma3,
    solve_small_sigma,
    trie_to_soda,
    wildcard_merge,
)
from dasoda.trie import build_trie, chain_trie, enumerate_tries, random_trie


def instance(shapes, sigma):
    """Instance whose i-th string puts symbol i on the cells in ``shapes[i-1]``."""
    return SodaInstance(
        sigma, tuple(tuple(i if p in cells else W for p in range(sigma)) for i, cells in enumerate(shapes, 1))
    )


def naive_optimum(inst, open_end=False):
    """Smallest L admitting conflict-free offsets, by plain enumeration."""
    sigma = inst.sigma
    cells = [[p for p, x in enumerate(s) if x != W] for s in inst.strings]
    if not inst.strings:
        return 0
    lo = sum(map(len, cells)) if open_end else max(sigma, sum(map(len, cells)))
    for L in itertools.count(lo):
        ranges = []
        for c in cells:
            top = (L - 1 - max(c)) if (open_end and c) else (L - sigma if not open_end else L - 1)
            ranges.append(range(0, top + 1) if c else range(1))
        for offs in itertools.product(*ranges):
            used = [o + p for o, c in zip(offs, cells) for p in c]
            if len(used) == len(set(used)):
                return L


def test_merge_and_compatibility_examples():
    assert wildcard_merge((1, W), (W, 2)) == (1, 2)
    assert wildcard_merge((1, 1), (1, 1)) == (1, 1)
    assert wildcard_merge((1, 1), (2, 2)) == (1, 1, 2, 2)
    assert compatible((1, W), (W, 2))
    assert not compatible((1, W), (2, W))
    assert compatible((W, W), (5, 5))
    assert not compatible((1,), (1, 1))


sym_strings = st.lists(st.sampled_from([W, 1, 2]), min_size=1, max_size=5).map(tuple)


@given(sym_strings, sym_strings)
def test_merge_has_both_operands_at_its_ends(x, y):
    m = wildcard_merge(x, y)
    assert len(m) <= len(x) + len(y)
    assert 0 in occurs(x, m)
    assert len(m) - len(y) in occurs(y, m)
    assert 0 in occurs(x, x)


def test_trie_to_soda_examples():
    assert trie_to_soda(chain_trie(3)).strings == ((1,), (2,))
    assert trie_to_soda(build_trie([(1,), (3,)], 3)).strings == ((1, W, 1),)
    assert trie_to_soda(build_trie([(1, 2), (1, 3)], 3)).strings == ((1, W, W), (W, 2, 2))
    assert trie_to_soda(build_trie([()], 2)).n == 0


def test_instance_rejects_foreign_symbols():
    with pytest.raises(InputError):
        SodaInstance(2, ((2, W),))
    with pytest.raises(InputError):
        SodaInstance(2, ((1, W, W),))


def test_paper_examples():
    for sigma in (2, 3, 4, 6):
        alt = instance([range(0, sigma, 2), range(1, sigma, 2)], sigma)
        assert brute_force_soda(alt).length == sigma
        assert k_soda_decide(alt, 0)
    for n, sigma in [(2, 2), (3, 2), (2, 3), (3, 3)]:
        solid = instance([range(sigma)] * n, sigma)
        assert brute_force_soda(solid).length == n * sigma
    solid = instance([range(2)] * 2, 2)
    assert not k_soda_decide(solid, 1) and k_soda_decide(solid, 2)
    lone = SodaInstance(3, ((W, W, W),))
    assert brute_force_soda(lone).length == 3 and k_soda_decide(lone, 0)


def test_small_sigma_examples():
    assert solve_sigma2(instance([[0], [1]], 2)).length == 2
    assert solve_sigma2(instance([[0], [1], [0, 1]], 2)).length == 4
    assert solve_sigma2(SodaInstance(2, ((W, W),))).length == 2
    assert solve_sigma3(instance([[0, 2], [1]], 3)).string == (1, 2, 1)
    assert solve_sigma3(instance([[0, 1, 2]], 3)).length == 3
    with pytest.raises(InputError):
        solve_sigma2(instance([[0]], 3))
    with pytest.raises(InputError):
        solve_sigma3(instance([[0]], 2))


def test_oracle_guard():
    with pytest.raises(CapacityError):
        brute_force_soda(instance([[0]] * 9, 2))
    with pytest.raises(CapacityError):
        brute_force_soda(instance([[0]], 9))


@pytest.mark.parametrize("open_end", [False, True])
def test_oracle_matches_naive_enumeration(open_end):
    rng = np.random.default_rng(11)
    for _ in range(150):
        sigma = int(rng.integers(1, 4))
        n = int(rng.integers(0, 5))
        shapes = [[p for p in range(sigma) if rng.random() < 0.5] for _ in range(n)]
        inst = instance(shapes, sigma)
        sol = brute_force_soda(inst, open_end=open_end)
        assert check_solution(inst, sol, open_end)
        assert sol.length == naive_optimum(inst, open_end), shapes


@pytest.mark.parametrize("sigma,solver", [(2, solve_sigma2), (3, solve_sigma3)])
@pytest.mark.parametrize("open_end", [False, True])
def test_polynomial_solvers_match_the_oracle_on_every_multiset(sigma, solver, open_end):
    shapes = [c for r in range(sigma + 1) for c in itertools.combinations(range(sigma), r)]
    for n in range(0, 5):
        for combo in itertools.combinations_with_replacement(shapes, n):
            inst = instance(combo, sigma)
            sol = solver(inst, open_end=open_end)
            assert check_solution(inst, sol, open_end), combo
            assert sol.length == brute_force_soda(inst, open_end=open_end).length, combo


def test_solve_small_sigma_dispatch():
    assert solve_small_sigma(SodaInstance(1, ((1,), (2,)))).length == 2
    with pytest.raises(InputError):
        solve_small_sigma(instance([[0]], 4))


def test_check_solution_rejects_bad_offsets():
    inst = instance([[0], [1]], 2)
    assert check_solution(inst, SodaSolution((1, 2), (0, 0)))
    assert not check_solution(inst, SodaSolution((1, 2), (0, 1)))
    assert not check_solution(inst, SodaSolution((1, 2, W), (0, 1)))


def test_exact_build_examples():
    for m in range(1, 8):
        assert exact_build(chain_trie(m)).N == m
    assert exact_build(build_trie([()], 3)).N == 1


def test_exact_build_beats_or_ties_greedy_and_materializes_validly():
    rng = np.random.default_rng(3)
    for _ in range(120):
        t = random_trie(int(rng.integers(1, 8)), int(rng.integers(1, 5)), rng)
        da = exact_build(t)
        assert validate(da, t).ok
        assert da.N <= min(greedy_build(t).N, greedy_build(t, "bfs").N)
        inst = trie_to_soda(t)
        sol = brute_force_soda(inst, open_end=True)
        assert materialize(t, sol).N == sol.length + 1 == da.N
        assert all(t.is_internal(v) for v in inst.nodes)


def test_closed_optimum_materializes_too():
    for t in enumerate_tries(5, 2):
        inst = trie_to_soda(t)
        da = materialize(t, brute_force_soda(inst))
        assert validate(da, t).ok


def test_text_round_trip():
    inst = instance([[0, 2], [1], []], 3)
    text = dumps_instance(inst)
    assert text.splitlines()[0] == "soda 3 3"
    assert loads_instance(text).strings == inst.strings
    assert dumps_instance(loads_instance(text)) == text
    with pytest.raises(InputError):
        loads_instance("soda 2 3\n1 * *\n")
