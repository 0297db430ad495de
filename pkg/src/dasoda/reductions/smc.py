"""Graph 3-coloring to sparse matrix compression (SR13).

An SMC instance is a 0/1 matrix and a shift bound ``k``.  A witness assigns
each row ``i`` a shift ``s(i)`` in ``1..k`` and builds a sequence ``b`` with
``b[s(i) + j - 1] = i`` exactly where ``a[i][j] = 1``; two rows may not claim
the same cell.

Rows stand for vertices and every column block of width 3 carries a single
1 in its first column, so shifting a row by 1, 2 or 3 picks a color.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from ..errors import CapacityError, InputError

COLORS = {1: "red", 2: "green", 3: "blue"}
GADGETS = ("incidence", "adjacency")


@dataclass(frozen=True)
class SmcInstance:
    matrix: np.ndarray  # rows x cols, 0/1
    k: int
    n_vertices: int = 0
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=np.uint8)
        if a.ndim != 2:
            raise InputError("matrix must be two-dimensional")
        if not np.isin(a, (0, 1)).all():
            raise InputError("matrix entries must be 0 or 1")
        if self.k < 1:
            raise InputError(f"shift bound must be positive, got {self.k}")
        object.__setattr__(self, "matrix", a)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class SmcWitness:
    shifts: tuple[int, ...]  # 1-based shift per row
    sequence: tuple[int, ...]  # b_1 .. b_{cols + k - 1}; 0 = unclaimed, else 1-based row


def _normalize_edges(n: int, edges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out = set()
    for a, b in edges:
        if not (1 <= a <= n and 1 <= b <= n):
            raise InputError(f"edge ({a}, {b}) outside vertices 1..{n}")
        if a == b:
            raise InputError(f"self-loop at {a}: graph must be simple")
        out.add((min(a, b), max(a, b)))
    return tuple(sorted(out))


def coloring_to_smc(n: int, edges: Iterable[tuple[int, int]], gadget: str = "incidence") -> SmcInstance:
    """SMC instance with ``k = 3`` that is solvable iff the graph is 3-colorable.

    ``gadget="incidence"`` (default) gives every vertex a private block (its
    self-loop) and every edge one shared block, so two rows collide under the
    same shift exactly when their vertices are adjacent.

    ``gadget="adjacency"`` is the ``n x 3n`` matrix with a 1 in block ``j`` of
    row ``i`` iff ``j`` is ``i`` or a neighbour.  There two rows also collide
    when they only share a neighbour, so e.g. a star with three leaves, which
    is 2-colorable, has no witness.  It is kept for comparison.
    """
    es = _normalize_edges(n, edges)
    if gadget == "incidence":
        blocks = [(v,) for v in range(1, n + 1)] + list(es)
        a = np.zeros((n, 3 * len(blocks)), dtype=np.uint8)
        for col, members in enumerate(blocks):
            for v in members:
                a[v - 1, 3 * col] = 1
    elif gadget == "adjacency":
        a = np.zeros((n, 3 * n), dtype=np.uint8)
        for v in range(1, n + 1):
            a[v - 1, 3 * (v - 1)] = 1
        for u, v in es:
            a[u - 1, 3 * (v - 1)] = 1
            a[v - 1, 3 * (u - 1)] = 1
    else:
        raise InputError(f"unknown gadget {gadget!r}; expected one of {GADGETS}")
    return SmcInstance(a, 3, n, es)


def check_witness(inst: SmcInstance, shifts: Sequence[int]) -> tuple[int, ...] | None:
    """The sequence ``b`` realised by ``shifts``, or ``None`` if rows collide."""
    if len(shifts) != inst.rows:
        raise InputError(f"{len(shifts)} shifts for {inst.rows} rows")
    b = [0] * (inst.cols + inst.k - 1)
    for i, s in enumerate(shifts, start=1):
        if not 1 <= s <= inst.k:
            raise InputError(f"shift {s} of row {i} outside 1..{inst.k}")
        for j in np.flatnonzero(inst.matrix[i - 1]):
            pos = s + int(j) - 1  # 0-based index of b_{s(i) + j - 1}, j counted from 1
            if b[pos] != 0:
                return None
            b[pos] = i
    return tuple(b)


def brute_force_smc(inst: SmcInstance, max_rows: int = 12) -> SmcWitness | None:
    """Exhaustive search over shifts with early collision cut-off."""
    if inst.rows > max_rows:
        raise CapacityError(f"{inst.rows} rows exceed the limit of {max_rows}")
    ones = [np.flatnonzero(inst.matrix[i]).tolist() for i in range(inst.rows)]
    taken: set[int] = set()
    shifts = [0] * inst.rows

    def place(i: int) -> bool:
        if i == inst.rows:
            return True
        for s in range(1, inst.k + 1):
            cells = [s + j - 1 for j in ones[i]]
            if any(c in taken for c in cells):
                continue
            taken.update(cells)
            shifts[i] = s
            if place(i + 1):
                return True
            taken.difference_update(cells)
        return False

    if not place(0):
        return None
    seq = check_witness(inst, shifts)
    assert seq is not None
    return SmcWitness(tuple(shifts), seq)


def shifts_to_coloring(inst: SmcInstance, shifts: Sequence[int]) -> dict[int, str]:
    """Vertex -> color for a valid witness; raises :class:`InputError` otherwise."""
    if inst.k != 3 or inst.rows != inst.n_vertices:
        raise InputError("instance was not produced from a graph with k = 3")
    if check_witness(inst, shifts) is None:
        raise InputError("shifts are not a valid witness: rows collide")
    coloring = {v: COLORS[s] for v, s in enumerate(shifts, start=1)}
    for u, v in inst.edges:
        if coloring[u] == coloring[v]:
            raise InputError(f"edge ({u}, {v}) is monochromatic")
    return coloring


def all_graphs(n: int):
    """Every simple graph on vertices ``1..n`` as an edge tuple."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    for mask in range(1 << len(pairs)):
        yield tuple(p for b, p in enumerate(pairs) if (mask >> b) & 1)


# --- text format -----------------------------------------------------------------


def dumps_smc(inst: SmcInstance) -> str:
    lines = [f"smc {inst.rows} {inst.cols} {inst.k}"]
    lines += [" ".join(str(int(x)) for x in row) for row in inst.matrix]
    return "\n".join(lines) + "\n"


def loads_smc(text: str) -> SmcInstance:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty SMC file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "smc":
        raise InputError(f"bad SMC header {lines[0]!r}")
    m, n, k = map(int, head[1:])
    rows = [[int(x) for x in ln.split()] for ln in lines[1:]]
    if len(rows) != m or any(len(r) != n for r in rows):
        raise InputError(f"expected {m} rows of {n} entries")
    return SmcInstance(np.array(rows, dtype=np.uint8).reshape(m, n), k)
