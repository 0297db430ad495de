import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dasoda.double_array import greedy_build, validate
from dasoda.errors import DecodeError, InputError, SolverEnvironmentError
from dasoda.maxsat import (
    OPTIMAL,
    SEMI_OPTIMAL,
    UNKNOWN,
    WcnfFormula,
    clause_estimate,
    decode,
    emit_wcnf,
    encode,
    optimize_size,
    parse_wcnf,
    solve_wcnf,
)
from dasoda.sat import SAT, UNSAT, check_model, solve_cnf
from dasoda.soda import exact_build
from dasoda.trie import build_trie, chain_trie, enumerate_tries, random_trie


def improvable_tries(limit=6):
    """Small tries on which greedy first-fit is not optimal."""
    out = []
    for m in range(4, 7):
        for t in enumerate_tries(m, 3):
            if greedy_build(t).N > exact_build(t).N:
                out.append(t)
                if len(out) == limit:
                    return out
    return out


HARD = improvable_tries()


def brute_min_cost(f):
    best = None
    for bits in itertools.product([False, True], repeat=f.var_count):
        val = lambda x: bits[abs(x) - 1] == (x > 0)  # noqa: E731
        if all(any(val(x) for x in c) for c in f.hard):
            cost = sum(not any(val(x) for x in c) for c in f.soft)
            best = cost if best is None else min(best, cost)
    return best


def test_there_are_fixtures_where_greedy_loses():
    assert len(HARD) >= 3


@pytest.mark.parametrize("amo", ["pairwise", "sequential"])
def test_clause_estimate_is_exact(amo):
    rng = np.random.default_rng(1)
    for _ in range(40):
        t = random_trie(int(rng.integers(1, 15)), int(rng.integers(1, 6)), rng)
        for N in (t.node_count, t.node_count + 3):
            f, _ = encode(t, N, amo)
            assert len(f.hard) == clause_estimate(t, N, amo)


def test_group_one_count_and_variable_ranges():
    t = build_trie([(1, 2), (1, 3), (3,)], 3)
    N = 9
    f, vm = encode(t, N)
    expected = sum(len(t.label_set(i)) * (N - max(t.label_set(i))) for i in t.internal_nodes())
    base_vars = set(vm.of_kind("base"))
    group1 = [c for c in f.hard if len(c) == 2 and -c[0] in base_vars and c[1] > 0 and vm.tag(c[1])[0] == "check"]
    assert len(group1) == expected
    for i in t.internal_nodes():
        assert vm.get(("base", i, N - max(t.label_set(i)))) is not None
        assert vm.get(("base", i, N - max(t.label_set(i)) + 1)) is None
    assert len(f.soft) == N and all(vm.tag(-c[0])[0] == "pad" for c in f.soft)
    with pytest.raises(InputError):
        encode(t, 0)


def test_single_node_trie_has_only_padding():
    f, vm = encode(build_trie([()], 2), 3)
    assert not vm.of_kind("base") and not vm.of_kind("check")
    out = solve_wcnf(f)
    assert out.status == SAT and out.cost == 0


@pytest.mark.parametrize("amo", ["pairwise", "sequential"])
def test_feasibility_threshold_is_the_exact_size(amo):
    rng = np.random.default_rng(9)
    tries = HARD + [random_trie(int(rng.integers(2, 8)), int(rng.integers(1, 5)), rng) for _ in range(40)]
    for t in tries:
        n_opt = exact_build(t).N
        for N in range(t.node_count, n_opt + 3):
            f, vm = encode(t, N, amo)
            out = solve_cnf(f.hard_cnf())
            assert out.status == (SAT if N >= n_opt else UNSAT), (t, N)
            if out.status == SAT:
                da, padded = decode(out, vm, t)
                assert validate(da, t).ok and da.N <= N and padded <= N


def test_maxsat_optimum_equals_exact_size():
    for t in HARD + [chain_trie(5)]:
        n_opt = exact_build(t).N
        f, vm = encode(t, greedy_build(t).N)
        out = solve_wcnf(f)
        assert out.stats["optimal"]
        da, padded = decode(out, vm, t)
        assert da.N == n_opt == padded
        assert out.cost == padded  # each padded slot falsifies one soft clause


def test_decode_hand_model_for_a_chain():
    t = chain_trie(3)
    f, vm = encode(t, 4)
    true = {vm.base(1, 1), vm.base(2, 2), vm.check(1, 2), vm.check(2, 3), vm.pad(1), vm.pad(2), vm.pad(3)}
    true.add(vm.check(1, 1))  # spurious, nothing forces it
    model = [v if v in true else -v for v in range(1, f.var_count + 1)]
    da, padded = decode(model, vm, t)
    assert da.N == 3 == exact_build(t).N and padded == 3
    model[vm.base(1, 2) - 1] = vm.base(1, 2)
    with pytest.raises(DecodeError):
        decode(model, vm, t)


def test_wcnf_format_examples():
    assert emit_wcnf(WcnfFormula(0)) == "p wcnf 0 0 1\n"
    assert emit_wcnf(WcnfFormula(2, [(1, -2)], [(-1,)])) == "p wcnf 2 2 2\n2 1 -2 0\n1 -1 0\n"
    with pytest.raises(InputError):
        WcnfFormula(1, [()])
    with pytest.raises(InputError):
        parse_wcnf("p wcnf 1 1 5\n3 1 0\n")


lits = st.integers(1, 5).flatmap(lambda v: st.sampled_from([v, -v]))
clauses = st.lists(st.lists(lits, min_size=1, max_size=3).map(tuple), max_size=10)


@given(clauses, clauses)
def test_wcnf_round_trip_is_bit_exact(hard, soft):
    f = WcnfFormula(5, hard, soft)
    text = emit_wcnf(f)
    g = parse_wcnf(text)
    assert (g.var_count, g.hard, g.soft) == (5, f.hard, f.soft)
    assert emit_wcnf(g) == text


def test_solve_wcnf_matches_brute_force():
    rng = np.random.default_rng(17)
    for _ in range(150):
        n = int(rng.integers(1, 9))
        mk = lambda: tuple(  # noqa: E731
            int(v) if rng.random() < 0.5 else -int(v)
            for v in rng.choice(np.arange(1, n + 1), size=int(rng.integers(1, min(3, n) + 1)), replace=False)
        )
        f = WcnfFormula(n, [mk() for _ in range(int(rng.integers(0, 2 * n)))], [mk() for _ in range(int(rng.integers(0, 6)))])
        want = brute_min_cost(f)
        out = solve_wcnf(f)
        if want is None:
            assert out.status == UNSAT
            continue
        assert out.status == SAT and out.stats["optimal"] and out.cost == want
        assert check_model(f.hard_cnf(), out.model)


@pytest.mark.parametrize("strategy", ["full", "binsearch", "decision"])
def test_strategies_reach_the_optimum(strategy):
    for t in HARD:
        res = optimize_size(t, strategy)
        assert validate(res.da, t).ok
        assert res.greedy_size == greedy_build(t).N
        if strategy == "decision":
            # one query at greedy - 1 proves optimality only when nothing smaller exists below it
            assert res.size <= res.greedy_size - 1
        else:
            assert res.status == OPTIMAL and res.size == exact_build(t).N


def test_decision_at_a_chosen_target():
    t = HARD[0]
    n_opt = exact_build(t).N
    res = optimize_size(t, "decision", n_target=n_opt)
    assert res.size == n_opt
    res = optimize_size(t, "decision", n_target=n_opt - 1)
    assert res.size == res.greedy_size and res.status == SEMI_OPTIMAL


def test_trivial_cases_skip_the_solver():
    res = optimize_size(chain_trie(5))
    assert res.status == OPTIMAL and res.size == 5 and res.calls == []


def test_zero_timeout_falls_back_to_greedy():
    for strategy in ("binsearch", "full", "decision"):
        res = optimize_size(HARD[0], strategy, timeout=0.0)
        assert res.status == SEMI_OPTIMAL and res.size == res.greedy_size


def test_budget_marks_over_budget():
    res = optimize_size(HARD[0], total_budget=0.0)
    assert res.over_budget and res.size == res.greedy_size


def test_capacity_guard_keeps_greedy():
    res = optimize_size(HARD[0], max_clauses=5)
    assert res.status == UNKNOWN and res.size == res.greedy_size


def test_bad_arguments():
    with pytest.raises(InputError):
        optimize_size(HARD[0], "anneal")
    with pytest.raises(SolverEnvironmentError):
        optimize_size(HARD[0], solver="external")


STUB = """
import sys
from dasoda.maxsat import parse_wcnf, solve_wcnf
from dasoda.sat import SAT, UNSAT, loads_cnf, solve_cnf

text = open(sys.argv[1]).read()
if "p wcnf" in text:
    out = solve_wcnf(parse_wcnf(text))
    if out.status == SAT:
        print(f"o {out.cost}")
        print("s OPTIMUM FOUND")
else:
    out = solve_cnf(loads_cnf(text))
    print("s SATISFIABLE" if out.status == SAT else "s UNSATISFIABLE")
if out.status == SAT:
    print("v " + " ".join(str(x) for x in out.model if x > 0) + " 0")
elif "p wcnf" in text:
    print("s UNSATISFIABLE")
"""


@pytest.mark.parametrize("strategy", ["full", "binsearch"])
def test_external_solver_path(strategy, make_script, tmp_path):
    cmd = make_script("stub_solver.py", STUB)
    for t in HARD[:3]:
        res = optimize_size(t, strategy, solver="external", solver_command=cmd, workdir=str(tmp_path))
        assert res.status == OPTIMAL and res.size == exact_build(t).N
    assert list(tmp_path.glob("*.cnf")) == [] and list(tmp_path.glob("*.wcnf")) == []
