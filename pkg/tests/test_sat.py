import itertools
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dasoda.errors import InputError, SolverEnvironmentError
from dasoda.sat import (
    SAT,
    TIMEOUT,
    UNSAT,
    CnfFormula,
    Solver,
    _luby,
    check_model,
    dumps_cnf,
    loads_cnf,
    parse_solver_output,
    run_external,
    solve_cnf,
)


def truth_table_sat(f, fixed=()):
    """Whether any of the 2^n assignments satisfies ``f`` (and the literals in ``fixed``)."""
    n = f.var_count
    rows = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(bool)
    ok = np.ones(1 << n, dtype=bool)
    for c in list(f.clauses) + [(x,) for x in fixed]:
        sat = np.zeros(1 << n, dtype=bool)
        for x in c:
            sat |= rows[:, abs(x) - 1] if x > 0 else ~rows[:, abs(x) - 1]
        ok &= sat
    return bool(ok.any())


def random_cnf(rng, max_vars=12):
    n = int(rng.integers(1, max_vars + 1))
    m = int(rng.integers(1, 5 * n + 2))
    clauses = []
    for _ in range(m):
        k = int(rng.integers(1, 4))
        vs = rng.choice(np.arange(1, n + 1), size=min(k, n), replace=False)
        clauses.append(tuple(int(v) if rng.random() < 0.5 else -int(v) for v in vs))
    return CnfFormula(n, clauses)


def pigeonhole(holes):
    p = holes + 1
    var = lambda i, j: i * holes + j + 1  # noqa: E731
    cl = [tuple(var(i, j) for j in range(holes)) for i in range(p)]
    for j in range(holes):
        for a, b in itertools.combinations(range(p), 2):
            cl.append((-var(a, j), -var(b, j)))
    return CnfFormula(p * holes, cl)


def test_luby_sequence():
    assert [_luby(i) for i in range(15)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


@pytest.mark.parametrize("heuristic", ["index", "vsids"])
def test_random_formulas_agree_with_truth_table(heuristic):
    rng = np.random.default_rng(2024)
    for _ in range(300):
        f = random_cnf(rng)
        out = solve_cnf(f, heuristic=heuristic)
        assert out.status == (SAT if truth_table_sat(f) else UNSAT)
        if out.status == SAT:
            assert check_model(f, out.model)


def test_assumptions_agree_with_truth_table_and_reuse_learnts():
    rng = np.random.default_rng(5)
    for _ in range(120):
        f = random_cnf(rng, 10)
        s = Solver(f.var_count, f.clauses)
        for _ in range(4):
            k = int(rng.integers(0, 3))
            vs = rng.choice(np.arange(1, f.var_count + 1), size=min(k, f.var_count), replace=False)
            assume = [int(v) if rng.random() < 0.5 else -int(v) for v in vs]
            out = s.solve(assume)
            assert out.status == (SAT if truth_table_sat(f, assume) else UNSAT)
            if out.status == SAT:
                assert check_model(f, out.model)
                assert all(out.value(abs(a)) == (a > 0) for a in assume)


def test_incremental_clauses():
    s = Solver(3, [(1, 2, 3)])
    assert s.solve().status == SAT
    for c in [(-1,), (-2,)]:
        s.add_clause(c)
    out = s.solve()
    assert out.status == SAT and out.true_vars() == [3]
    s.add_clause((-3,))
    assert s.solve().status == UNSAT
    assert s.solve().status == UNSAT


@pytest.mark.parametrize("heuristic", ["index", "vsids"])
def test_pigeonhole_is_unsat(heuristic):
    assert solve_cnf(pigeonhole(5), heuristic=heuristic).status == UNSAT


def test_limits_give_timeout():
    f = pigeonhole(8)
    assert Solver(f.var_count, f.clauses).solve(conflict_limit=5).status == TIMEOUT
    assert Solver(f.var_count, f.clauses).solve(deadline=time.monotonic() - 1).status == TIMEOUT
    assert solve_cnf(f, budget=0.0).status == TIMEOUT


def test_phase_hint_is_followed_when_free():
    out = Solver(3, [(1, 2, 3)], phase={1: False, 2: False, 3: True}).solve()
    assert out.model == (-1, -2, 3)


def test_formula_validation():
    with pytest.raises(InputError):
        CnfFormula(2, [()])
    with pytest.raises(InputError):
        CnfFormula(2, [(3,)])
    f = CnfFormula(2)
    with pytest.raises(InputError):
        f.add((0,))
    with pytest.raises(InputError):
        check_model(CnfFormula(2, [(1,)]), (1,))
    with pytest.raises(InputError):
        Solver(2).solve([5])


clause = st.lists(st.integers(1, 6).flatmap(lambda v: st.sampled_from([v, -v])), min_size=1, max_size=4)


@given(st.lists(clause.map(tuple), max_size=20))
def test_dimacs_round_trip_is_bit_exact(clauses):
    f = CnfFormula(6, clauses)
    text = dumps_cnf(f)
    g = loads_cnf(text)
    assert g.var_count == 6 and g.clauses == f.clauses
    assert dumps_cnf(g) == text


def test_dimacs_errors_and_comments():
    f = loads_cnf("c hello\np cnf 2 2\n1 -2\n0 2 0\n")
    assert f.clauses == [(1, -2), (2,)]
    for bad in ["1 0\n", "p cnf 2 1\n1 2\n", "p cnf 2 2\n1 0\n", "p wcnf 2 1\n1 0\n", "p cnf 2 1\nx 0\n"]:
        with pytest.raises(InputError):
            loads_cnf(bad)


def test_parse_solver_output():
    out = parse_solver_output("c x\ns SATISFIABLE\nv 1 -2\nv 0\n", 3)
    assert out.status == SAT and out.model == (1, -2, -3)
    assert parse_solver_output("s UNSATISFIABLE\n", 3).status == UNSAT
    assert parse_solver_output("s UNKNOWN\n", 3).status == TIMEOUT
    out = parse_solver_output("o 4\no 2\ns OPTIMUM FOUND\nv -1 2 0\n", 2)
    assert out.cost == 2 and out.model == (-1, 2)
    for bad in ["v 1 0\n", "s MAYBE\n", "s SATISFIABLE\nv 9 0\n"]:
        with pytest.raises(SolverEnvironmentError):
            parse_solver_output(bad, 3)


STUB_SAT = """
import sys
text = open(sys.argv[1]).read()
print("c stub solver")
print("s SATISFIABLE")
print("v 1 -2 0")
sys.exit(10)
"""


def test_external_adapter(tmp_path, make_script):
    path = tmp_path / "f.cnf"
    path.write_text(dumps_cnf(CnfFormula(2, [(1,), (-2,)])))
    out = run_external(str(path), make_script("sat.py", STUB_SAT))
    assert out.status == SAT and out.model == (1, -2)

    unsat = make_script("unsat.py", "import sys\nprint('s UNSATISFIABLE')\nsys.exit(20)\n")
    assert run_external(str(path), unsat).status == UNSAT

    slow = make_script("slow.py", "import time\ntime.sleep(30)\n")
    t0 = time.monotonic()
    assert run_external(str(path), slow, budget=0.5).status == TIMEOUT
    assert time.monotonic() - t0 < 10

    crash = make_script("crash.py", "import sys\nprint('boom', file=sys.stderr)\nsys.exit(3)\n")
    with pytest.raises(SolverEnvironmentError, match="code 3"):
        run_external(str(path), crash)
    silent = make_script("silent.py", "print('nothing')\n")
    with pytest.raises(SolverEnvironmentError, match="status"):
        run_external(str(path), silent)
    with pytest.raises(SolverEnvironmentError, match="not found"):
        run_external(str(path), str(tmp_path / "missing-solver"))
    with pytest.raises(SolverEnvironmentError):
        run_external(str(path), "")
