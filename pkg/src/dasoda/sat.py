"""A small CDCL SAT solver, DIMACS CNF I/O, and an adapter for external solvers.

Literals are DIMACS-style signed integers at the interface.  Internally a
literal ``+v`` is ``2v`` and ``-v`` is ``2v + 1`` so that negation is ``x ^ 1``.
"""

from __future__ import annotations

import heapq
import re
import shlex
import subprocess
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .errors import InputError, SolverEnvironmentError

SAT = "sat"
UNSAT = "unsat"
TIMEOUT = "timeout"


@dataclass
class CnfFormula:
    var_count: int
    clauses: list[tuple[int, ...]] = field(default_factory=list)

    def __post_init__(self):
        if self.var_count < 0:
            raise InputError(f"negative variable count {self.var_count}")
        self.clauses = [tuple(int(x) for x in c) for c in self.clauses]
        for k, c in enumerate(self.clauses):
            _check_clause(c, self.var_count, k)

    def add(self, clause: Iterable[int]) -> None:
        c = tuple(int(x) for x in clause)
        _check_clause(c, self.var_count, len(self.clauses))
        self.clauses.append(c)


def _check_clause(c: Sequence[int], var_count: int, k: int) -> None:
    if not c:
        raise InputError(f"clause {k} is empty")
    for x in c:
        if x == 0 or abs(x) > var_count:
            raise InputError(f"clause {k}: literal {x} outside [1..{var_count}]")


@dataclass(frozen=True)
class SolveOutcome:
    status: str
    model: tuple[int, ...] | None = None  # signed literal for every variable
    cost: int | None = None  # optimum reported by an external MaxSAT solver
    stats: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if (self.model is not None) != (self.status == SAT):
            raise ValueError("a model is present exactly when the status is sat")

    def value(self, var: int) -> bool:
        if self.model is None:
            raise InputError("no model: outcome is not sat")
        return self.model[var - 1] > 0

    def true_vars(self) -> list[int]:
        return [x for x in self.model or () if x > 0]


def check_model(f: CnfFormula, model: Sequence[int]) -> bool:
    """True iff ``model`` (one signed literal per variable) satisfies ``f``."""
    assign = _total_assignment(model, f.var_count)
    return all(any(assign[abs(x)] == (x > 0) for x in c) for c in f.clauses)


def _total_assignment(model: Sequence[int], var_count: int) -> list[bool]:
    assign: list[bool | None] = [None] * (var_count + 1)
    for x in model:
        v = abs(int(x))
        if x == 0 or v > var_count:
            raise InputError(f"model literal {x} outside [1..{var_count}]")
        if assign[v] is not None and assign[v] != (x > 0):
            raise InputError(f"model assigns variable {v} both ways")
        assign[v] = x > 0
    missing = [v for v in range(1, var_count + 1) if assign[v] is None]
    if missing:
        raise InputError(f"partial model: {len(missing)} variables unassigned (first: {missing[0]})")
    return assign  # type: ignore[return-value]


def _luby(x: int) -> int:
    """``x``-th term (0-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x %= size
    return 1 << seq


class Solver:
    """Incremental CDCL solver.

    ``heuristic="index"`` branches on the lowest unassigned variable (the
    reproducible default); ``"vsids"`` uses conflict activity.  Phases start
    positive unless ``phase`` gives a preferred sign per variable, and are
    saved across backtracks.  Learned clauses persist between ``solve`` calls,
    so a sequence of calls under different assumptions shares work.
    """

    def __init__(
        self,
        var_count: int,
        clauses: Iterable[Sequence[int]] = (),
        *,
        heuristic: str = "index",
        phase: dict[int, bool] | None = None,
        restart_base: int = 100,
    ):
        if heuristic not in ("index", "vsids"):
            raise InputError(f"unknown heuristic {heuristic!r}")
        self.n = var_count
        self.heuristic = heuristic
        self.restart_base = restart_base
        size = 2 * (var_count + 1)
        self.val = [0] * size  # per literal: 1 true, -1 false, 0 open
        self.level = [0] * (var_count + 1)
        self.reason = [-1] * (var_count + 1)
        self.saved = [True] * (var_count + 1)
        if phase:
            for v, s in phase.items():
                self.saved[v] = bool(s)
        self.activity = [0.0] * (var_count + 1)
        self.bump = 1.0
        self.heap = [(0.0, v) for v in range(1, var_count + 1)]
        self.next_var = 1
        self.clauses: list[list[int] | None] = []
        self.learnt: set[int] = set()
        self.lbd: dict[int, int] = {}
        self.watches: list[list[int]] = [[] for _ in range(size)]
        self.bin: list[list[tuple[int, int]]] = [[] for _ in range(size)]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.seen = bytearray(var_count + 1)
        self.inconsistent = False
        self.max_learnts = 0.0
        self.stats = {"conflicts": 0, "decisions": 0, "propagations": 0, "restarts": 0}
        for c in clauses:
            self.add_clause(c)

    # -- clause database ----------------------------------------------------------

    def add_clause(self, clause: Sequence[int]) -> None:
        """Add a clause at decision level 0."""
        if self.trail_lim:
            self._cancel_until(0)
        lits = []
        for x in clause:
            x = int(x)
            if x == 0 or abs(x) > self.n:
                raise InputError(f"literal {x} outside [1..{self.n}]")
            lit = 2 * x if x > 0 else -2 * x + 1
            if lit ^ 1 in lits:
                return  # tautology
            if lit not in lits:
                lits.append(lit)
        if self.inconsistent:
            return
        lits = [l for l in lits if self.val[l] != -1]
        if any(self.val[l] == 1 for l in lits):
            return
        if not lits:
            self.inconsistent = True
        elif len(lits) == 1:
            self._enqueue(lits[0], -1)
            if self._propagate() is not None:
                self.inconsistent = True
        else:
            self._attach(lits)

    def _attach(self, lits: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        if len(lits) == 2:
            a, b = lits
            self.bin[a ^ 1].append((b, ci))
            self.bin[b ^ 1].append((a, ci))
        else:
            self.watches[lits[0] ^ 1].append(ci)
            self.watches[lits[1] ^ 1].append(ci)
        return ci

    # -- assignment -----------------------------------------------------------------

    def _enqueue(self, lit: int, reason: int) -> None:
        self.val[lit] = 1
        self.val[lit ^ 1] = -1
        v = lit >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> int | None:
        """Unit propagation; returns a conflicting clause index or ``None``."""
        val = self.val
        trail = self.trail
        clauses = self.clauses
        watches = self.watches
        binw = self.bin
        level = self.level
        reason = self.reason
        nlev = len(self.trail_lim)
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.stats["propagations"] += 1
            for other, ci in binw[p]:
                vo = val[other]
                if vo == 1:
                    continue
                if vo == -1:
                    return ci
                val[other] = 1
                val[other ^ 1] = -1
                v = other >> 1
                level[v] = nlev
                reason[v] = ci
                trail.append(other)
            false_lit = p ^ 1
            ws = watches[p]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c is None:
                    continue  # deleted clause: drop the watch
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk ^ 1].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if val[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return ci
                    val[first] = 1
                    val[first ^ 1] = -1
                    v = first >> 1
                    level[v] = nlev
                    reason[v] = ci
                    trail.append(first)
            del ws[j:]
        return None

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        val = self.val
        vsids = self.heuristic == "vsids"
        for lit in self.trail[start:]:
            v = lit >> 1
            val[lit] = 0
            val[lit ^ 1] = 0
            self.reason[v] = -1
            self.saved[v] = not (lit & 1)
            if vsids:
                heapq.heappush(self.heap, (-self.activity[v], v))
            elif v < self.next_var:
                self.next_var = v
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    # -- conflict analysis -------------------------------------------------------------

    def _bump(self, v: int) -> None:
        a = self.activity[v] + self.bump
        self.activity[v] = a
        if a > 1e100:
            self.activity = [x * 1e-100 for x in self.activity]
            self.bump *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.n + 1) if self.val[2 * u] == 0]
            heapq.heapify(self.heap)
        elif self.val[2 * v] == 0:
            heapq.heappush(self.heap, (-a, v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = self.seen
        level = self.level
        trail = self.trail
        cur = len(self.trail_lim)
        vsids = self.heuristic == "vsids"
        learnt = [0]
        counter = 0
        p = -1
        idx = len(trail) - 1
        while True:
            for q in self.clauses[confl]:
                v = q >> 1
                if v == p >> 1 or seen[v] or level[v] == 0:
                    continue
                seen[v] = 1
                if vsids:
                    self._bump(v)
                if level[v] >= cur:
                    counter += 1
                else:
                    learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = self.reason[p >> 1]
            seen[p >> 1] = 0
            counter -= 1
            if counter == 0:
                break
        learnt[0] = p ^ 1

        # drop literals implied by the rest of the clause (local minimization)
        kept = [learnt[0]]
        for q in learnt[1:]:
            r = self.reason[q >> 1]
            if r < 0 or any(
                not seen[x >> 1] and level[x >> 1] > 0
                for x in self.clauses[r] if x >> 1 != q >> 1
            ):
                kept.append(q)
        for q in learnt[1:]:
            seen[q >> 1] = 0
        learnt = kept

        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: level[learnt[k] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _reduce_db(self) -> None:
        locked = {self.reason[lit >> 1] for lit in self.trail}
        cands = sorted(
            (ci for ci in self.learnt if ci not in locked and len(self.clauses[ci]) > 2),
            key=lambda ci: (self.lbd[ci], len(self.clauses[ci])),
        )
        for ci in cands[len(cands) // 2:]:
            if self.lbd[ci] <= 2:
                continue
            self.clauses[ci] = None
            self.learnt.discard(ci)
            del self.lbd[ci]

    # -- search ---------------------------------------------------------------------

    def _pick(self) -> int:
        val = self.val
        if self.heuristic == "index":
            v = self.next_var
            while v <= self.n and val[2 * v] != 0:
                v += 1
            self.next_var = v
            return v if v <= self.n else 0
        heap = self.heap
        while heap:
            a, v = heapq.heappop(heap)
            if val[2 * v] == 0 and -a == self.activity[v]:
                return v
        for v in range(1, self.n + 1):  # stale heap: fall back to a scan
            if val[2 * v] == 0:
                return v
        return 0

    def solve(
        self,
        assumptions: Sequence[int] = (),
        *,
        deadline: float | None = None,
        conflict_limit: int | None = None,
    ) -> SolveOutcome:
        """Search for a model extending ``assumptions``.

        ``deadline`` is an absolute :func:`time.monotonic` value; it is checked
        before every decision.
        """
        self._cancel_until(0)
        if self.inconsistent:
            return SolveOutcome(UNSAT, stats=dict(self.stats))
        assume = []
        for x in assumptions:
            x = int(x)
            if x == 0 or abs(x) > self.n:
                raise InputError(f"assumption {x} outside [1..{self.n}]")
            assume.append(2 * x if x > 0 else -2 * x + 1)
        if self._propagate() is not None:
            self.inconsistent = True
            return SolveOutcome(UNSAT, stats=dict(self.stats))
        if not self.max_learnts:
            self.max_learnts = max(2000.0, len(self.clauses) / 3)

        restarts = 0
        budget = self.restart_base * _luby(restarts)
        since_restart = 0
        conflicts = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    self.inconsistent = True
                    return SolveOutcome(UNSAT, stats=dict(self.stats))
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = self._attach(learnt)
                    self.learnt.add(ci)
                    self.lbd[ci] = len({self.level[x >> 1] for x in learnt})
                    self._enqueue(learnt[0], ci)
                self.bump *= 1.0 / 0.95
                if conflict_limit is not None and conflicts >= conflict_limit:
                    self._cancel_until(0)
                    return SolveOutcome(TIMEOUT, stats=dict(self.stats))
                continue

            if since_restart >= budget:
                restarts += 1
                self.stats["restarts"] += 1
                since_restart = 0
                budget = self.restart_base * _luby(restarts)
                self._cancel_until(0)
                continue
            if len(self.learnt) >= self.max_learnts + len(self.trail):
                self._reduce_db()
                self.max_learnts *= 1.1

            lvl = len(self.trail_lim)
            if lvl < len(assume):
                a = assume[lvl]
                if self.val[a] == -1:
                    self._cancel_until(0)
                    return SolveOutcome(UNSAT, stats=dict(self.stats))
                self.trail_lim.append(len(self.trail))
                if self.val[a] == 0:
                    self._enqueue(a, -1)
                continue

            if deadline is not None and time.monotonic() >= deadline:
                self._cancel_until(0)
                return SolveOutcome(TIMEOUT, stats=dict(self.stats))
            v = self._pick()
            if v == 0:
                model = tuple(v if self.val[2 * v] == 1 else -v for v in range(1, self.n + 1))
                self._cancel_until(0)
                return SolveOutcome(SAT, model, stats=dict(self.stats))
            self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(2 * v if self.saved[v] else 2 * v + 1, -1)


def solve_cnf(
    f: CnfFormula,
    assumptions: Sequence[int] = (),
    budget: float | None = None,
    **options,
) -> SolveOutcome:
    """Decide ``f`` under ``assumptions`` within ``budget`` seconds (``None``: no limit)."""
    deadline = None if budget is None else time.monotonic() + budget
    return Solver(f.var_count, f.clauses, **options).solve(assumptions, deadline=deadline)


# --- DIMACS ------------------------------------------------------------------------


def dumps_cnf(f: CnfFormula) -> str:
    lines = [f"p cnf {f.var_count} {len(f.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


def _clause_tokens(text: str, header: str) -> tuple[list[str], list[int]]:
    head: list[str] | None = None
    body: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if head is not None:
                raise InputError(f"line {lineno}: second problem line")
            head = line.split()
            if len(head) < 2 or head[1] != header:
                raise InputError(f"line {lineno}: expected 'p {header} ...', got {line!r}")
            continue
        if head is None:
            raise InputError(f"line {lineno}: clause before the problem line")
        try:
            body.extend(int(t) for t in line.split())
        except ValueError:
            raise InputError(f"line {lineno}: non-integer token in {line!r}") from None
    if head is None:
        raise InputError(f"no 'p {header}' line")
    return head, body


def _split_zero(tokens: list[int]) -> list[list[int]]:
    out, cur = [], []
    for t in tokens:
        if t == 0:
            out.append(cur)
            cur = []
        else:
            cur.append(t)
    if cur:
        raise InputError("last clause is not terminated by 0")
    return out


def loads_cnf(text: str) -> CnfFormula:
    head, body = _clause_tokens(text, "cnf")
    if len(head) != 4:
        raise InputError(f"bad problem line {' '.join(head)!r}")
    nvars, ncl = int(head[2]), int(head[3])
    clauses = _split_zero(body)
    if len(clauses) != ncl:
        raise InputError(f"header announces {ncl} clauses, found {len(clauses)}")
    return CnfFormula(nvars, [tuple(c) for c in clauses])


# --- external solvers ----------------------------------------------------------------

_STATUS = {
    "SATISFIABLE": SAT,
    "OPTIMUM FOUND": SAT,
    "UNSATISFIABLE": UNSAT,
    "UNKNOWN": TIMEOUT,
}


def parse_solver_output(text: str, var_count: int) -> SolveOutcome:
    """Read ``s``/``v``/``o`` lines as printed by SAT and MaxSAT solvers."""
    status = None
    lits: list[int] = []
    cost = None
    for line in text.splitlines():
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word not in _STATUS:
                raise SolverEnvironmentError(f"unknown status line {line!r}")
            status = _STATUS[word]
        elif line.startswith("v "):
            for tok in line[2:].split():
                try:
                    x = int(tok)
                except ValueError:
                    raise SolverEnvironmentError(f"bad value line {line!r}") from None
                if x != 0:
                    lits.append(x)
        elif line.startswith("o "):
            try:
                cost = int(line[2:].split()[0])
            except (ValueError, IndexError):
                raise SolverEnvironmentError(f"bad cost line {line!r}") from None
    if status is None:
        raise SolverEnvironmentError("solver output has no status line:\n" + _excerpt(text))
    if status != SAT:
        return SolveOutcome(status, cost=cost)
    assign: dict[int, bool] = {}
    for x in lits:
        if abs(x) > var_count:
            raise SolverEnvironmentError(f"model literal {x} outside [1..{var_count}]")
        assign[abs(x)] = x > 0
    # solvers may omit variables that do not matter; those default to false
    model = tuple(v if assign.get(v, False) else -v for v in range(1, var_count + 1))
    return SolveOutcome(SAT, model, cost=cost)


def _excerpt(text: str, limit: int = 800) -> str:
    return text if len(text) <= limit else text[:limit] + "\n..."


_HEADER = re.compile(r"^p\s+(cnf|wcnf)\s+(\d+)", re.M)


def run_external(path: str, command: str, budget: float | None = None, var_count: int | None = None) -> SolveOutcome:
    """Run ``command <path>`` and parse its result stream.

    The process is killed once ``budget`` seconds pass, which yields a
    ``timeout`` outcome.  A missing binary, an abnormal exit code, or output
    without a status line raise :class:`SolverEnvironmentError`.
    """
    if not command:
        raise SolverEnvironmentError("no external solver command configured")
    if var_count is None:
        with open(path, encoding="utf-8") as fh:
            m = _HEADER.search(fh.read())
        if m is None:
            raise InputError(f"{path}: no problem line")
        var_count = int(m.group(2))
    argv = shlex.split(command) + [str(path)]
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=budget)
    except FileNotFoundError:
        raise SolverEnvironmentError(f"solver binary not found: {argv[0]!r}") from None
    except subprocess.TimeoutExpired:
        return SolveOutcome(TIMEOUT)
    # SAT-competition exit codes: 10 sat, 20 unsat, 30 optimum, 0 also common
    if proc.returncode not in (0, 10, 20, 30):
        raise SolverEnvironmentError(
            f"solver exited with code {proc.returncode}:\n" + _excerpt(proc.stdout + proc.stderr)
        )
    try:
        return parse_solver_output(proc.stdout, var_count)
    except SolverEnvironmentError as err:
        raise SolverEnvironmentError(f"{err}\n--- output ---\n" + _excerpt(proc.stdout)) from None
