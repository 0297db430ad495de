"""Restricted directed Hamiltonian path (RDHP) to shortest common superstring.

For a digraph with source ``s`` and sink ``t`` the reduction emits length-3
strings over the letters ``v_u`` (``u != s``), ``w_u`` (``u != t``) and the
three separators:

* ``A[u, j] = w_u v_c(u,j) w_u`` and ``B[u, j] = v_c(u,j) w_u v_c(u,j+1)``
  for every vertex ``u != t`` and ``j = 1..deg(u)``;
* ``C[s] = ‡ # w_s``, ``C[u] = v_u # w_u``, ``C[t] = v_t # $``.

The graph has a Hamiltonian ``s -> t`` path iff these ``2m + n`` strings have
a common superstring of length ``2m + 3n``.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ..errors import CapacityError, InputError, StructuralError

DAGGER, HASH, DOLLAR = 1, 2, 3
SPECIAL_ROLES = {DAGGER: "dagger", HASH: "hash", DOLLAR: "dollar"}


@dataclass(frozen=True)
class RdhpInstance:
    n: int
    edges: tuple[tuple[int, int], ...]
    s: int = 1
    t: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted({(int(a), int(b)) for a, b in self.edges})))
        if self.t is None:
            object.__setattr__(self, "t", self.n)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def children(self, u: int) -> list[int]:
        return [b for a, b in self.edges if a == u]

    def c(self, u: int, j: int) -> int:
        """Target of the ``((j mod deg) + 1)``-th out-edge of ``u`` (ascending ids)."""
        kids = self.children(u)
        return kids[j % len(kids)]

    def validate(self, relax: bool = False) -> None:
        """Raise :class:`InputError` unless the graph is a restricted instance.

        ``relax`` allows out-degree 1 (not only >= 2) outside ``t``.
        """
        if self.n < 2:
            raise InputError(f"need at least 2 vertices, got {self.n}")
        if self.s == self.t or not (1 <= self.s <= self.n and 1 <= self.t <= self.n):
            raise InputError(f"bad endpoints s={self.s}, t={self.t}")
        for a, b in self.edges:
            if not (1 <= a <= self.n and 1 <= b <= self.n) or a == b:
                raise InputError(f"bad edge ({a}, {b})")
            if b == self.s:
                raise InputError(f"source {self.s} has an incoming edge from {a}")
            if a == self.t:
                raise InputError(f"sink {self.t} has an outgoing edge to {b}")
        need = 1 if relax else 2
        for u in self.vertices:
            if u != self.t and len(self.children(u)) < need:
                raise InputError(
                    f"vertex {u} has out-degree {len(self.children(u))}, needs at least {need}"
                )

    def is_hamiltonian_path(self, path: Sequence[int]) -> bool:
        es = set(self.edges)
        return (
            len(path) == self.n
            and sorted(path) == list(self.vertices)
            and path[0] == self.s
            and path[-1] == self.t
            and all((a, b) in es for a, b in zip(path, path[1:]))
        )

    def hamiltonian_paths(self) -> list[tuple[int, ...]]:
        """All Hamiltonian ``s -> t`` paths, by depth-first search."""
        succ = {u: self.children(u) for u in self.vertices}
        out = []

        def walk(path, seen):
            u = path[-1]
            if len(path) == self.n:
                if u == self.t:
                    out.append(tuple(path))
                return
            for v in succ[u]:
                if v not in seen and (v != self.t or len(path) == self.n - 1):
                    seen.add(v)
                    path.append(v)
                    walk(path, seen)
                    path.pop()
                    seen.discard(v)

        walk([self.s], {self.s})
        return out


@dataclass(frozen=True)
class ScsInstance:
    graph: RdhpInstance
    roles: dict[int, str]  # symbol id -> "dagger" | "hash" | "dollar" | "v:u" | "w:u"
    strings: tuple[tuple[int, ...], ...]
    labels: tuple[tuple, ...] = field(default=())  # ("C", u) / ("A", u, j) / ("B", u, j)

    @property
    def target_length(self) -> int:
        return 2 * self.graph.m + 3 * self.graph.n

    def symbol(self, role: str) -> int:
        for k, r in self.roles.items():
            if r == role:
                return k
        raise KeyError(role)

    def v(self, u: int) -> int:
        return self.symbol(f"v:{u}")

    def w(self, u: int) -> int:
        return self.symbol(f"w:{u}")

    def string(self, label: tuple) -> tuple[int, ...]:
        return self.strings[self.labels.index(label)]


def overlap_merge(x: Sequence, y: Sequence) -> tuple:
    """``x`` followed by ``y`` minus the longest prefix of ``y`` that is a suffix of ``x``."""
    x, y = tuple(x), tuple(y)
    return x + y[_overlap(x, y):]


def _overlap(x: Sequence, y: Sequence) -> int:
    for k in range(min(len(x), len(y)), 0, -1):
        if tuple(x[len(x) - k:]) == tuple(y[:k]):
            return k
    return 0


def rdhp_to_scs(g: RdhpInstance, relax: bool = False) -> ScsInstance:
    g.validate(relax)
    roles = dict(SPECIAL_ROLES)
    nxt = 4
    for u in g.vertices:
        if u != g.s:
            roles[nxt] = f"v:{u}"
            nxt += 1
    for u in g.vertices:
        if u != g.t:
            roles[nxt] = f"w:{u}"
            nxt += 1
    sym = {r: k for k, r in roles.items()}

    def v(u):
        return sym[f"v:{u}"]

    def w(u):
        return sym[f"w:{u}"]

    strings, labels = [], []
    for u in g.vertices:
        if u == g.s:
            s = (DAGGER, HASH, w(u))
        elif u == g.t:
            s = (v(u), HASH, DOLLAR)
        else:
            s = (v(u), HASH, w(u))
        strings.append(s)
        labels.append(("C", u))
    for u in g.vertices:
        if u == g.t:
            continue
        for j in range(1, len(g.children(u)) + 1):
            strings.append((w(u), v(g.c(u, j)), w(u)))
            labels.append(("A", u, j))
            strings.append((v(g.c(u, j)), w(u), v(g.c(u, j + 1))))
            labels.append(("B", u, j))
    if len(set(strings)) != len(strings):
        raise InputError("generated strings are not distinct")
    return ScsInstance(g, roles, tuple(strings), tuple(labels))


def _segment(inst: ScsInstance, u: int, nxt: int) -> tuple[int, ...]:
    g = inst.graph
    deg = len(g.children(u))
    j = next(j for j in range(1, deg + 1) if g.c(u, j) == nxt)
    seg = inst.string(("A", u, j))
    for k in range(j, j + deg):
        kk = (k - 1) % deg + 1
        if k != j:
            seg = overlap_merge(seg, inst.string(("A", u, kk)))
        seg = overlap_merge(seg, inst.string(("B", u, kk)))
    return seg


def ham_path_to_superstring(inst: ScsInstance, path: Sequence[int]) -> tuple[int, ...]:
    """The length ``2m + 3n`` superstring that walks ``path``."""
    g = inst.graph
    path = tuple(path)
    if not g.is_hamiltonian_path(path):
        raise InputError(f"{list(path)} is not a Hamiltonian {g.s}->{g.t} path")
    out = inst.string(("C", g.s))
    for u, nxt in zip(path, path[1:]):
        for piece in (_segment(inst, u, nxt), inst.string(("C", nxt))):
            if _overlap(out, piece) != 1:
                raise AssertionError("consecutive pieces must overlap in exactly one symbol")
            out = overlap_merge(out, piece)
    assert len(out) == inst.target_length
    return out


def occurs_in(text: Sequence[int], pattern: Sequence[int]) -> bool:
    k = len(pattern)
    pattern = tuple(pattern)
    return any(tuple(text[p:p + k]) == pattern for p in range(len(text) - k + 1))


def superstring_to_ham_path(inst: ScsInstance, q: Sequence[int]) -> tuple[int, ...]:
    """Read the Hamiltonian path off a superstring of length ``2m + 3n``.

    Each stretch between consecutive ``#`` starts with ``w`` of the current
    vertex and ends with ``v`` of the next one.
    """
    g = inst.graph
    q = tuple(q)
    if len(q) != inst.target_length:
        raise StructuralError(f"length {len(q)} differs from the target {inst.target_length}")
    missing = [lab for lab, s in zip(inst.labels, inst.strings) if not occurs_in(q, s)]
    if missing:
        raise StructuralError(f"not a superstring: {len(missing)} strings missing, e.g. {missing[0]}")
    if q[:2] != (DAGGER, HASH) or q[-2:] != (HASH, DOLLAR):
        raise StructuralError("superstring must start with '‡#' and end with '#$'")
    hashes = [p for p, x in enumerate(q) if x == HASH]
    if len(hashes) != g.n:
        raise StructuralError(f"expected {g.n} '#' symbols, found {len(hashes)}")
    role = inst.roles
    path = [g.s]
    for a, b in zip(hashes, hashes[1:]):
        stretch = q[a + 1:b]
        if len(stretch) < 2:
            raise StructuralError(f"stretch between positions {a} and {b} is too short")
        first, last = role.get(stretch[0], ""), role.get(stretch[-1], "")
        if first != f"w:{path[-1]}":
            raise StructuralError(f"stretch at {a + 1} starts with {first!r}, expected w:{path[-1]}")
        if not last.startswith("v:"):
            raise StructuralError(f"stretch at {a + 1} ends with {last!r}, not a vertex letter")
        path.append(int(last[2:]))
    if not g.is_hamiltonian_path(path):
        raise StructuralError(f"extracted walk {path} is not a Hamiltonian path")
    return tuple(path)


# --- exact SCS ------------------------------------------------------------------


@dataclass(frozen=True)
class ScsSolution:
    length: int
    order: tuple[int, ...]
    superstring: tuple


def exact_scs(strings: Sequence[Sequence], cap: int = 18) -> ScsSolution:
    """Shortest common superstring by dynamic programming over subsets.

    Maximizes the total overlap of a permutation, which is exact when no input
    is a substring of another.  Layers of equal popcount are relaxed together
    with numpy.
    """
    strs = [tuple(s) for s in strings]
    n = len(strs)
    if n == 0:
        return ScsSolution(0, (), ())
    if n > cap:
        raise CapacityError(f"{n} strings exceed the subset-DP cap of {cap}")
    if len(set(strs)) != n:
        raise InputError("strings must be distinct")
    for a, b in itertools.permutations(range(n), 2):
        if occurs_in(strs[b], strs[a]):
            raise InputError(f"string {a} is a substring of string {b}")
    ov = np.array([[_overlap(strs[a], strs[b]) if a != b else 0 for b in range(n)] for a in range(n)], dtype=np.int32)

    full = (1 << n) - 1
    neg = np.int32(-(1 << 20))
    dp = np.full((1 << n, n), neg, dtype=np.int32)
    for a in range(n):
        dp[1 << a, a] = 0
    masks = np.arange(1 << n, dtype=np.int64)
    popcount = np.zeros(1 << n, dtype=np.int8)
    for a in range(n):
        popcount += ((masks >> a) & 1).astype(np.int8)
    for k in range(1, n):
        layer = masks[popcount == k]
        # best[x, b] = max_a dp[x, a] + ov[a, b]
        best = (dp[layer][:, :, None] + ov[None, :, :]).max(axis=1)
        for b in range(n):
            free = (layer >> b) & 1 == 0
            tgt = layer[free] | (1 << b)
            np.maximum.at(dp[:, b], tgt, best[free, b])

    last = int(np.argmax(dp[full]))
    total = int(dp[full, last])
    order = [last]
    mask = full
    while mask != 1 << last:
        prev_mask = mask ^ (1 << last)
        cand = dp[prev_mask] + ov[:, last]
        prev = next(a for a in range(n) if (prev_mask >> a) & 1 and cand[a] == dp[mask, last])
        order.append(prev)
        mask, last = prev_mask, prev
    order.reverse()
    sup = strs[order[0]]
    for a in order[1:]:
        sup = overlap_merge(sup, strs[a])
    length = sum(len(s) for s in strs) - total
    assert len(sup) == length
    return ScsSolution(length, tuple(order), sup)


# --- instance generation -----------------------------------------------------------


def sample_rdhp(
    n: int,
    seed: int = 0,
    *,
    planted: bool = True,
    relax: bool = False,
    extra_edges: int = 0,
) -> tuple[RdhpInstance, tuple[int, ...] | None]:
    """Random restricted instance on ``1..n`` with ``s = 1`` and ``t = n``.

    With ``planted`` a random Hamiltonian path is laid first and returned.
    Otherwise the returned path is the first one found by exhaustive search,
    or ``None`` when the graph has none.  Each vertex other than ``t`` then
    gets random extra out-edges until it reaches out-degree 2 (1 or 2 at random
    under ``relax``), plus ``extra_edges`` more edges overall.
    """
    if n < 2 or (not relax and n < 4):
        raise InputError(f"n={n} is too small for out-degree >= 2 (needs n >= 4, or n >= 2 relaxed)")
    rng = np.random.default_rng(seed)
    s, t = 1, n
    edges: set[tuple[int, int]] = set()
    if planted:
        middle = [int(x) for x in rng.permutation(np.arange(2, n))]
        walk = [s] + middle + [t]
        edges.update(zip(walk, walk[1:]))

    def options(u):
        return [v for v in range(2, n + 1) if v != u and (u, v) not in edges]

    for u in range(1, n):
        need = int(rng.integers(1, 3)) if relax else 2
        while sum(1 for a, _ in edges if a == u) < need:
            opts = options(u)
            edges.add((u, opts[int(rng.integers(len(opts)))]))
    for _ in range(extra_edges):
        u = int(rng.integers(1, n))
        opts = options(u)
        if opts:
            edges.add((u, opts[int(rng.integers(len(opts)))]))
    g = RdhpInstance(n, tuple(edges), s, t)
    g.validate(relax)
    paths = g.hamiltonian_paths()
    if planted:
        return g, tuple(walk)
    return g, (paths[0] if paths else None)


# --- text formats -------------------------------------------------------------------


def dumps_rdhp(g: RdhpInstance) -> str:
    lines = [f"rdhp {g.n} {g.m} {g.s} {g.t}"] + [f"{a} {b}" for a, b in g.edges]
    return "\n".join(lines) + "\n"


def loads_rdhp(text: str) -> RdhpInstance:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty RDHP file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "rdhp":
        raise InputError(f"bad RDHP header {lines[0]!r}")
    n, m, s, t = map(int, head[1:])
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected 'u v'")
        edges.append((int(parts[0]), int(parts[1])))
    if len(edges) != m:
        raise InputError(f"header announces {m} edges, found {len(edges)}")
    return RdhpInstance(n, tuple(edges), s, t)


def dumps_scs(inst: ScsInstance) -> str:
    lines = [f"scs {len(inst.roles)} {len(inst.strings)} {inst.target_length}"]
    lines += [f"{k} : {r}" for k, r in sorted(inst.roles.items())]
    lines += [" ".join(map(str, s)) for s in inst.strings]
    return "\n".join(lines) + "\n"


def loads_scs_strings(text: str) -> tuple[dict[int, str], list[tuple[int, ...]], int]:
    """Parse an SCS file into (roles, strings, target length)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty SCS file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "scs":
        raise InputError(f"bad SCS header {lines[0]!r}")
    nsym, nstr, target = map(int, head[1:])
    if len(lines) != 1 + nsym + nstr:
        raise InputError(f"expected {nsym} symbol lines and {nstr} strings")
    roles = {}
    for line in lines[1:1 + nsym]:
        k, sep, r = line.partition(":")
        if not sep:
            raise InputError(f"bad symbol line {line!r}")
        roles[int(k)] = r.strip()
    strings = [tuple(int(x) for x in line.split()) for line in lines[1 + nsym:]]
    for s in strings:
        if any(x not in roles for x in s):
            raise InputError(f"string {s} uses an undeclared symbol")
    return roles, strings, target
