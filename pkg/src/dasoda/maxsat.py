"""MAX-SAT model of double-array minimization and the strategies that solve it.

Variables (for a size bound ``N``):

* ``Base(i, j)``: internal node ``i`` has base ``j``, ``1 <= j <= N - max L_i``;
* ``Check(i, j)``: slot ``j`` holds a child of internal node ``i``;
* ``Pad(j)``: some slot ``>= j`` holds a child.

Hard clauses tie base to check, keep bases unique per node and checks unique
per slot, and make ``Pad`` a down-closed prefix covering every used slot.  The
soft clauses ``not Pad(j)`` then count the unused tail, so maximizing them
minimizes the array length.
"""

from __future__ import annotations

import logging
import os
import tempfile
import time
from collections.abc import Sequence
from dataclasses import dataclass, field

from .double_array import ROOT_SLOT, DoubleArray, from_slots, greedy_build, validate
from .errors import CapacityError, DecodeError, InputError, LayoutError, SolverEnvironmentError
from .sat import SAT, TIMEOUT, UNSAT, CnfFormula, SolveOutcome, Solver, dumps_cnf, run_external
from .trie import ROOT, Trie

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
SEMI_OPTIMAL = "semi-optimal"
UNKNOWN = "unknown"

STRATEGIES = ("full", "decision", "binsearch")


class VarMap:
    """Bijection between variable indices and ``("base", i, j)``,
    ``("check", i, j)``, ``("pad", j)`` and ``("aux", k)`` tags."""

    def __init__(self, N: int):
        self.N = N
        self._index: dict[tuple, int] = {}
        self._tags: list[tuple] = [()]

    def new(self, tag: tuple) -> int:
        if tag in self._index:
            raise InputError(f"variable {tag} declared twice")
        self._tags.append(tag)
        self._index[tag] = len(self._tags) - 1
        return self._index[tag]

    def aux(self) -> int:
        return self.new(("aux", len(self._tags)))

    def get(self, tag: tuple) -> int | None:
        return self._index.get(tag)

    def base(self, i: int, j: int) -> int:
        return self._index[("base", i, j)]

    def check(self, i: int, j: int) -> int:
        return self._index[("check", i, j)]

    def pad(self, j: int) -> int:
        return self._index[("pad", j)]

    def tag(self, var: int) -> tuple:
        return self._tags[var]

    def __len__(self) -> int:
        return len(self._tags) - 1

    def of_kind(self, kind: str) -> list[int]:
        return [v for v in range(1, len(self._tags)) if self._tags[v][0] == kind]


@dataclass
class WcnfFormula:
    var_count: int
    hard: list[tuple[int, ...]] = field(default_factory=list)
    soft: list[tuple[int, ...]] = field(default_factory=list)  # weight 1 each

    def __post_init__(self):
        for kind in ("hard", "soft"):
            clauses = [tuple(int(x) for x in c) for c in getattr(self, kind)]
            for k, c in enumerate(clauses):
                if not c:
                    raise InputError(f"{kind} clause {k} is empty")
                if any(x == 0 or abs(x) > self.var_count for x in c):
                    raise InputError(f"{kind} clause {k} has a literal outside [1..{self.var_count}]")
            setattr(self, kind, clauses)

    def hard_cnf(self) -> CnfFormula:
        """The hard part alone, as used by the decision strategies."""
        return CnfFormula(self.var_count, list(self.hard))


def _exactly_one(vm: VarMap, xs: Sequence[int], out: list, amo: str) -> None:
    out.append(tuple(xs))
    _at_most_one(vm, xs, out, amo)


def _at_most_one(vm: VarMap, xs: Sequence[int], out: list, amo: str) -> None:
    k = len(xs)
    if k < 2:
        return
    if amo == "pairwise" or k <= 4:
        for a in range(k):
            for b in range(a + 1, k):
                out.append((-xs[a], -xs[b]))
        return
    # sequential counter: s_a says "some x_b with b <= a is true"
    s = [vm.aux() for _ in range(k - 1)]
    out.append((-xs[0], s[0]))
    for a in range(1, k - 1):
        out.append((-xs[a], s[a]))
        out.append((-s[a - 1], s[a]))
        out.append((-xs[a], -s[a - 1]))
    out.append((-xs[k - 1], -s[k - 2]))


def clause_estimate(trie: Trie, N: int, amo: str = "pairwise") -> int:
    """Number of hard clauses :func:`encode` will emit, computed without encoding."""
    internal = trie.internal_nodes()
    n = len(internal)

    def amo_count(k):
        if k < 2:
            return 0
        if amo == "pairwise" or k <= 4:
            return k * (k - 1) // 2
        return 3 * k - 4

    total = 0
    for i in internal:
        labels = trie.label_set(i)
        r = max(0, N - labels[-1])
        total += len(labels) * r + (1 + amo_count(r) if r else 2)
    total += N * amo_count(n) + n * N + max(0, N - 1)
    return total


def encode(trie: Trie, N: int, amo: str = "pairwise") -> tuple[WcnfFormula, VarMap]:
    """Clauses for "a double-array of ``trie`` fits in ``N`` slots".

    ``amo`` picks the at-most-one encoding: ``"pairwise"`` (default) or
    ``"sequential"`` (Sinz counter, linear size).  A node whose base range is
    empty gets a contradictory pair of unit clauses on a fresh variable, so the
    formula stays free of empty clauses and is simply unsatisfiable.
    """
    if N < 1:
        raise InputError(f"size bound must be positive, got {N}")
    if amo not in ("pairwise", "sequential"):
        raise InputError(f"unknown at-most-one encoding {amo!r}")
    internal = trie.internal_nodes()
    vm = VarMap(N)
    ranges = {}
    for i in internal:
        ranges[i] = range(1, N - trie.label_set(i)[-1] + 1)
        for j in ranges[i]:
            vm.new(("base", i, j))
    for i in internal:
        for j in range(1, N + 1):
            vm.new(("check", i, j))
    for j in range(1, N + 1):
        vm.new(("pad", j))

    hard: list[tuple[int, ...]] = []
    # (1) base -> check of every child slot
    for i in internal:
        for j in ranges[i]:
            b = vm.base(i, j)
            for a in trie.label_set(i):
                hard.append((-b, vm.check(i, j + a)))
    # (2) one base per internal node
    for i in internal:
        xs = [vm.base(i, j) for j in ranges[i]]
        if xs:
            _exactly_one(vm, xs, hard, amo)
        else:
            x = vm.aux()
            hard += [(x,), (-x,)]
    # (3) at most one parent per slot
    for j in range(1, N + 1):
        _at_most_one(vm, [vm.check(i, j) for i in internal], hard, amo)
    # (4) a used slot is padded, (5) padding is a prefix
    for i in internal:
        for j in range(1, N + 1):
            hard.append((-vm.check(i, j), vm.pad(j)))
    for j in range(2, N + 1):
        hard.append((-vm.pad(j), vm.pad(j - 1)))
    # (6) soft: prefer short padding
    soft = [(-vm.pad(j),) for j in range(1, N + 1)]
    return WcnfFormula(len(vm), hard, soft), vm


def decode(model: Sequence[int] | SolveOutcome, vm: VarMap, trie: Trie) -> tuple[DoubleArray, int]:
    """Rebuild the layout from the ``Base`` variables of a model.

    Returns the double-array and the number of padded slots (largest true
    ``Pad`` index, 0 if none).  ``Check`` values are ignored.
    """
    if isinstance(model, SolveOutcome):
        model = model.model
    if model is None:
        raise DecodeError("no model to decode")
    truth = {abs(x): x > 0 for x in model}

    def is_true(v):
        return truth.get(v, False)

    base: dict[int, int] = {}
    for i in trie.internal_nodes():
        js = []
        j = 1
        while (v := vm.get(("base", i, j))) is not None:
            if is_true(v):
                js.append(j)
            j += 1
        if len(js) != 1:
            raise DecodeError(f"node {i} has {len(js)} true base variables {js}")
        base[i] = js[0]
    node_of = [0] * (trie.node_count + 1)
    node_of[ROOT] = ROOT_SLOT
    for i, b in base.items():
        for label, child in trie.children(i).items():
            node_of[child] = b + label
    da = from_slots(trie, node_of, base)
    report = validate(da, trie)
    if not report.ok:
        raise LayoutError("decoded layout is invalid: " + "; ".join(map(str, report.violations)))
    padded = max((j for j in range(1, vm.N + 1) if is_true(vm.pad(j))), default=0)
    return da, padded


# --- WCNF text -------------------------------------------------------------------


def emit_wcnf(f: WcnfFormula) -> str:
    top = len(f.soft) + 1
    lines = [f"p wcnf {f.var_count} {len(f.hard) + len(f.soft)} {top}"]
    lines += [f"{top} " + " ".join(map(str, c)) + " 0" for c in f.hard]
    lines += ["1 " + " ".join(map(str, c)) + " 0" for c in f.soft]
    return "\n".join(lines) + "\n"


def parse_wcnf(text: str) -> WcnfFormula:
    head = None
    clauses: list[list[int]] = []
    cur: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            head = line.split()
            if len(head) != 5 or head[1] != "wcnf":
                raise InputError(f"line {lineno}: expected 'p wcnf <vars> <clauses> <top>'")
            continue
        if head is None:
            raise InputError(f"line {lineno}: clause before the problem line")
        try:
            toks = [int(t) for t in line.split()]
        except ValueError:
            raise InputError(f"line {lineno}: non-integer token") from None
        for t in toks:
            cur.append(t)
            if t == 0 and len(cur) > 1:
                clauses.append(cur[:-1])
                cur = []
            elif t == 0:
                raise InputError(f"line {lineno}: clause without weight")
    if head is None:
        raise InputError("no 'p wcnf' line")
    if cur:
        raise InputError("last clause is not terminated by 0")
    nvars, ncl, top = int(head[2]), int(head[3]), int(head[4])
    if len(clauses) != ncl:
        raise InputError(f"header announces {ncl} clauses, found {len(clauses)}")
    hard, soft = [], []
    for c in clauses:
        w, lits = c[0], tuple(c[1:])
        if not lits:
            raise InputError("empty clause in WCNF")
        if w == top:
            hard.append(lits)
        elif w == 1:
            soft.append(lits)
        else:
            raise InputError(f"unsupported weight {w} (only 1 and top={top})")
    return WcnfFormula(nvars, hard, soft)


# --- strategies ------------------------------------------------------------------


@dataclass
class OptimizeResult:
    da: DoubleArray
    status: str
    greedy_size: int
    calls: list[tuple[int, str, float]] = field(default_factory=list)  # (N, status, seconds)
    over_budget: bool = False

    @property
    def size(self) -> int:
        return self.da.N


class _Backend:
    """Runs decision and MAX-SAT queries on the internal or an external solver."""

    def __init__(self, solver: str, command: str | None, heuristic: str, workdir: str | None):
        if solver not in ("internal", "external"):
            raise InputError(f"unknown solver {solver!r}")
        if solver == "external" and not command:
            raise SolverEnvironmentError("external solver selected but no command configured")
        self.solver = solver
        self.command = command
        self.heuristic = heuristic
        self.workdir = workdir

    def _run_file(self, text: str, suffix: str, budget: float | None, var_count: int) -> SolveOutcome:
        fd, path = tempfile.mkstemp(suffix=suffix, dir=self.workdir)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            return run_external(path, self.command, budget, var_count)
        finally:
            os.unlink(path)

    def decide(self, f: WcnfFormula, budget: float | None) -> SolveOutcome:
        if self.solver == "external":
            return self._run_file(dumps_cnf(f.hard_cnf()), ".cnf", budget, f.var_count)
        deadline = None if budget is None else time.monotonic() + budget
        return Solver(f.var_count, f.hard, heuristic=self.heuristic).solve(deadline=deadline)


def _remaining(deadline: float | None, per_call: float | None) -> float | None:
    if deadline is None:
        return per_call
    left = max(0.0, deadline - time.monotonic())
    return left if per_call is None else min(left, per_call)


def optimize_size(
    trie: Trie,
    strategy: str = "binsearch",
    timeout: float | None = None,
    *,
    solver: str = "internal",
    solver_command: str | None = None,
    amo: str = "pairwise",
    heuristic: str = "index",
    n_target: int | None = None,
    total_budget: float | None = None,
    max_clauses: int = 3_000_000,
    workdir: str | None = None,
) -> OptimizeResult:
    """Smallest double-array found by the MAX-SAT model.

    ``timeout`` bounds every solver call; ``total_budget`` bounds the whole
    run.  Strategies:

    * ``"full"``: MAX-SAT at ``N`` = greedy size.  The internal solver
      descends, adding ``not Pad(k)`` as an assumption after each model of
      size ``k``, until unsatisfiable.
    * ``"decision"``: a single satisfiability query at ``n_target``
      (default: one below the greedy size).
    * ``"binsearch"``: bisection over ``[M, greedy]``; a timed-out call
      counts as infeasible and makes the result semi-optimal.
    """
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    backend = _Backend(solver, solver_command, heuristic, workdir)
    greedy = greedy_build(trie)
    M = trie.node_count
    result = OptimizeResult(greedy, OPTIMAL, greedy.N)
    if M == 1 or greedy.N == M:
        return result  # nothing to improve: N >= M always
    deadline = None if total_budget is None else time.monotonic() + total_budget

    def query(N: int) -> tuple[str, DoubleArray | None]:
        budget = _remaining(deadline, timeout)
        if budget is not None and budget <= 0:
            result.calls.append((N, TIMEOUT, 0.0))
            return TIMEOUT, None
        if clause_estimate(trie, N, amo) > max_clauses:
            raise CapacityError(f"encoding at N={N} exceeds {max_clauses} clauses")
        f, vm = encode(trie, N, amo)
        t0 = time.monotonic()
        out = backend.decide(f, budget)
        result.calls.append((N, out.status, time.monotonic() - t0))
        log.debug("N=%d -> %s in %.2fs", N, out.status, result.calls[-1][2])
        if out.status == SAT:
            return SAT, decode(out, vm, trie)[0]
        return out.status, None

    try:
        if strategy == "binsearch":
            _binsearch(result, query, M)
        elif strategy == "decision":
            target = greedy.N - 1 if n_target is None else n_target
            if target < M:
                result.status = OPTIMAL if target == greedy.N - 1 else SEMI_OPTIMAL
                return result
            status, da = query(target)
            if status == SAT:
                result.da = da
                result.status = OPTIMAL if da.N == M else SEMI_OPTIMAL
            elif status == UNSAT and target >= greedy.N - 1:
                result.status = OPTIMAL
            else:
                result.status = SEMI_OPTIMAL
        else:
            _full(result, trie, backend, amo, deadline, timeout, max_clauses)
    except CapacityError as err:
        log.warning("%s; keeping the greedy layout", err)
        result.da, result.status = greedy, UNKNOWN
    result.over_budget = deadline is not None and time.monotonic() >= deadline
    return result


def _binsearch(result: OptimizeResult, query, M: int) -> None:
    lo, hi = M, result.da.N
    timed_out = False
    while lo < hi:
        mid = (lo + hi) // 2
        status, da = query(mid)
        if status == SAT:
            result.da = da
            hi = da.N
        else:
            timed_out |= status == TIMEOUT
            lo = mid + 1
    result.status = SEMI_OPTIMAL if timed_out else OPTIMAL


def _full(result, trie, backend, amo, deadline, timeout, max_clauses) -> None:
    N = result.da.N
    if clause_estimate(trie, N, amo) > max_clauses:
        raise CapacityError(f"encoding at N={N} exceeds {max_clauses} clauses")
    f, vm = encode(trie, N, amo)
    if backend.solver == "external":
        budget = _remaining(deadline, timeout)
        t0 = time.monotonic()
        out = backend._run_file(emit_wcnf(f), ".wcnf", budget, f.var_count)
        result.calls.append((N, out.status, time.monotonic() - t0))
        if out.status == SAT:
            result.da = decode(out, vm, trie)[0]
            result.status = OPTIMAL if out.cost is not None else SEMI_OPTIMAL
        else:
            result.status = SEMI_OPTIMAL if out.status == TIMEOUT else UNKNOWN
        return
    solver = Solver(f.var_count, f.hard, heuristic=backend.heuristic)
    bound = N  # the greedy layout already fits in N slots
    while bound > trie.node_count:
        budget = _remaining(deadline, timeout)
        if budget is not None and budget <= 0:
            result.status = SEMI_OPTIMAL
            return
        t0 = time.monotonic()
        out = solver.solve([-vm.pad(bound)], deadline=None if budget is None else time.monotonic() + budget)
        result.calls.append((bound - 1, out.status, time.monotonic() - t0))
        if out.status == TIMEOUT:
            result.status = SEMI_OPTIMAL
            return
        if out.status == UNSAT:
            break
        result.da = decode(out, vm, trie)[0]
        bound = result.da.N
    result.status = OPTIMAL


def solve_wcnf(f: WcnfFormula, budget: float | None = None, heuristic: str = "index") -> SolveOutcome:
    """Minimize falsified soft units of ``f`` with the internal solver.

    Each soft clause gets a relaxation literal; a unary counter over those
    literals is capped by an assumption that is tightened after each model.
    Returns the best model and its cost; ``stats["optimal"]`` says whether
    the cap was proven tight before the budget ran out.
    """
    deadline = None if budget is None else time.monotonic() + budget
    vm = VarMap(0)
    for v in range(1, f.var_count + 1):
        vm.new(("x", v))
    relax = []
    hard = list(f.hard)
    for c in f.soft:
        r = vm.aux()
        relax.append(r)
        hard.append(tuple(c) + (r,))
    # counter over relax literals: out[k] true when at least k+1 are true
    k = len(relax)
    out: list[int] = []
    if k:
        prev: list[int] = []
        for idx, r in enumerate(relax):
            row = [vm.aux() for _ in range(idx + 1)]
            hard.append((-r, row[0]))
            for t in range(len(prev)):
                hard.append((-prev[t], row[t]))
                hard.append((-prev[t], -r, row[t + 1]))
            prev = row
        out = prev
    solver = Solver(len(vm), hard, heuristic=heuristic)
    best: SolveOutcome | None = None
    cap = k
    while True:
        assumptions = [-out[cap]] if cap < k else []
        res = solver.solve(assumptions, deadline=deadline)
        if res.status != SAT:
            if best is None:
                return SolveOutcome(res.status)
            # unsat under the cap proves the last model optimal
            return SolveOutcome(SAT, best.model, cost=best.cost, stats={"optimal": res.status == UNSAT})
        model = res.model[: f.var_count]
        cost = sum(1 for c in f.soft if not any((x > 0) == (model[abs(x) - 1] > 0) for x in c))
        best = SolveOutcome(SAT, model, cost=cost)
        if cost == 0:
            return SolveOutcome(SAT, model, cost=0, stats={"optimal": True})
        cap = cost - 1

