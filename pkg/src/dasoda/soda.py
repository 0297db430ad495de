"""Wildcard strings and the space-optimal double-array (SODA) problem.

A wildcard string is a tuple of ints where :data:`WILDCARD` (0) matches any
symbol.  An instance holds one string per internal trie node; string ``i``
only uses symbol ``i``.

Two length objectives are supported throughout:

* closed (default): every string must occur as a full window inside ``S``,
  so ``|S| >= sigma`` whenever the instance is non-empty;
* ``open_end=True``: a window may run past the end of ``S`` as long as the
  overhanging part is all wildcards.  This is the objective that matches a
  double-array, whose length ends at the last occupied slot.
"""

from __future__ import annotations

import functools
import itertools
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .double_array import ROOT_SLOT, DoubleArray, from_slots, validate
from .errors import CapacityError, InputError, LayoutError
from .trie import ROOT, Trie

WILDCARD = 0
WILDCARD_CHAR = "*"

WildcardString = tuple[int, ...]


@dataclass(frozen=True)
class SodaInstance:
    sigma: int
    strings: tuple[WildcardString, ...]
    nodes: tuple[int, ...] | None = None  # trie node behind each string

    def __post_init__(self):
        object.__setattr__(self, "strings", tuple(tuple(int(x) for x in s) for s in self.strings))
        for i, s in enumerate(self.strings, start=1):
            if len(s) != self.sigma:
                raise InputError(f"string {i} has length {len(s)}, expected {self.sigma}")
            if any(x not in (WILDCARD, i) for x in s):
                raise InputError(f"string {i} may only use symbol {i} and the wildcard")

    @property
    def n(self) -> int:
        return len(self.strings)


@dataclass(frozen=True)
class SodaSolution:
    string: WildcardString
    offsets: tuple[int, ...]  # 0-based start of each input string's window

    @property
    def length(self) -> int:
        return len(self.string)


def to_text(s: Sequence[int]) -> str:
    return " ".join(WILDCARD_CHAR if x == WILDCARD else str(x) for x in s)


def cells(s: Sequence[int]) -> tuple[int, ...]:
    """0-based positions of the non-wildcard symbols."""
    return tuple(p for p, x in enumerate(s) if x != WILDCARD)


def occurs(pattern: Sequence[int], text: Sequence[int]) -> list[int]:
    """Offsets where ``pattern`` matches a window of ``text``."""
    k, n = len(pattern), len(text)
    if k == 0 or k > n:
        return [] if k > n else list(range(n + 1))
    p = np.asarray(pattern, dtype=np.int64)
    w = np.lib.stride_tricks.sliding_window_view(np.asarray(text, dtype=np.int64), k)
    ok = ((p == WILDCARD) | (w == WILDCARD) | (w == p)).all(axis=1)
    return np.flatnonzero(ok).tolist()


def _overlap_ok(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x == WILDCARD or y == WILDCARD or x == y for x, y in zip(a, b))


def wildcard_merge(x: Sequence[int], y: Sequence[int]) -> WildcardString:
    """Shortest string with ``x`` matching a prefix and ``y`` a suffix.

    Picks the largest compatible overlap and resolves each overlapped position
    to the non-wildcard side.
    """
    x, y = tuple(x), tuple(y)
    for o in range(min(len(x), len(y)), -1, -1):
        head, tail = x[len(x) - o:], y[:o]
        if _overlap_ok(head, tail):
            mid = tuple(a if a != WILDCARD else b for a, b in zip(head, tail))
            return x[: len(x) - o] + mid + y[o:]
    raise AssertionError("overlap 0 is always compatible")


def compatible(x: Sequence[int], y: Sequence[int]) -> bool:
    return len(x) == len(y) and len(wildcard_merge(x, y)) == len(x)


def trie_to_soda(trie: Trie) -> SodaInstance:
    """One string per internal node: position ``c`` holds the node's id iff
    ``c`` labels one of its edges.  Ids are renumbered densely, breadth-first.
    """
    nodes = tuple(trie.internal_nodes())
    strings = []
    for i, node in enumerate(nodes, start=1):
        labels = set(trie.label_set(node))
        strings.append(tuple(i if c in labels else WILDCARD for c in range(1, trie.sigma + 1)))
    return SodaInstance(trie.sigma, tuple(strings), nodes)


def _extent(s: Sequence[int], sigma: int, open_end: bool) -> int:
    if not open_end:
        return sigma
    c = cells(s)
    return c[-1] + 1 if c else 0


def _assemble(inst: SodaInstance, offsets: Sequence[int], open_end: bool) -> SodaSolution:
    length = 0
    for s, o in zip(inst.strings, offsets):
        length = max(length, o + _extent(s, inst.sigma, open_end))
    if not open_end and inst.n:
        length = max(length, inst.sigma)
    out = [WILDCARD] * length
    for i, (s, o) in enumerate(zip(inst.strings, offsets), start=1):
        for p in cells(s):
            if out[o + p] != WILDCARD:
                raise LayoutError(f"strings {out[o + p]} and {i} collide at position {o + p}")
            out[o + p] = i
    return SodaSolution(tuple(out), tuple(offsets))


def check_solution(inst: SodaInstance, sol: SodaSolution, open_end: bool = False) -> bool:
    """True iff every string occurs in ``sol.string`` at its recorded offset.

    A wildcard in the solution is a vacant cell: it matches a wildcard of the
    pattern but not a symbol.
    """
    if len(sol.offsets) != inst.n:
        return False
    text = sol.string
    if not open_end and inst.n and len(text) < inst.sigma:
        return False
    for s, o in zip(inst.strings, sol.offsets):
        if o < 0:
            return False
        end = o + (_extent(s, inst.sigma, True) if open_end else len(s))
        if end > len(text):
            return False
        if any(text[o + p] != s[p] for p in cells(s)):
            return False
    return True


def brute_force_soda(
    inst: SodaInstance, limit: int = 8, *, open_end: bool = False, max_sigma: int = 8
) -> SodaSolution:
    """Exact SODA optimum by branch-and-bound over per-string offsets.

    Strings are placed in order of decreasing symbol count, offsets tried
    ascending, and a branch is cut once its current end (or the total symbol
    count) reaches the incumbent length.  Interchangeable strings are forced
    into increasing offsets.
    """
    if inst.n > limit or inst.sigma > max_sigma:
        raise CapacityError(
            f"instance with n={inst.n}, sigma={inst.sigma} exceeds the oracle limit "
            f"(n <= {limit}, sigma <= {max_sigma})"
        )
    sigma = inst.sigma
    masks = [sum(1 << p for p in cells(s)) for s in inst.strings]
    ext = [_extent(s, sigma, open_end) for s in inst.strings]
    order = sorted(
        (i for i in range(inst.n) if masks[i]),
        key=lambda i: (-bin(masks[i]).count("1"), masks[i], i),
    )
    total_cells = sum(bin(m).count("1") for m in masks)
    floor = sigma if (inst.n and not open_end) else 0

    # incumbent: windows laid side by side
    best = [0] * inst.n
    for k, i in enumerate(order):
        best[i] = k * sigma
    best_len = max([floor] + [k * sigma + ext[i] for k, i in enumerate(order)])
    lower = max(floor, total_cells)

    cur = [0] * inst.n

    def search(k: int, occ: int, end: int) -> bool:
        nonlocal best_len, best
        if k == len(order):
            if end < best_len:
                best_len = max(end, floor)
                best = list(cur)
            return best_len <= lower
        i = order[k]
        start = 0
        if k and masks[order[k - 1]] == masks[i]:
            start = cur[order[k - 1]] + 1
        m, e = masks[i], ext[i]
        o = start
        while o + e < best_len:
            if not (m << o) & occ:
                cur[i] = o
                if search(k + 1, occ | (m << o), max(end, o + e)):
                    return True
            o += 1
        return False

    if best_len > lower:
        search(0, 0, floor)
    return _assemble(inst, best, open_end)


def soda_optimum(inst: SodaInstance, limit: int = 8, *, open_end: bool = False) -> int:
    return brute_force_soda(inst, limit, open_end=open_end).length


def k_soda_decide(inst: SodaInstance, k: int, limit: int = 8) -> bool:
    """Whether the shortest common string has length at most ``sigma + k``."""
    return soda_optimum(inst, limit) <= inst.sigma + k


# --- polynomial solvers for sigma = 2 and sigma = 3 -------------------------------


def _by_shape(inst: SodaInstance) -> dict[tuple[int, ...], list[int]]:
    groups: dict[tuple[int, ...], list[int]] = {}
    for i, s in enumerate(inst.strings):
        groups.setdefault(cells(s), []).append(i)
    return groups


def solve_sigma2(inst: SodaInstance, *, open_end: bool = False) -> SodaSolution:
    """Left-to-right greedy for ``sigma = 2``.

    Strings ``i*`` go first, then ``ii``, then ``*i``; each new string is put
    at the leftmost offset where it fits, which fills the single wildcard left
    open by its predecessor.
    """
    if inst.sigma != 2:
        raise InputError(f"solve_sigma2 needs sigma = 2, got {inst.sigma}")
    groups = _by_shape(inst)
    sequence = groups.get((0,), []) + groups.get((0, 1), []) + groups.get((1,), [])
    return _first_fit(inst, sequence, open_end)


def _first_fit(inst: SodaInstance, sequence: Iterable[int], open_end: bool) -> SodaSolution:
    occ: set[int] = set()
    offsets = [0] * inst.n
    for i in sequence:
        pos = cells(inst.strings[i])
        o = 0
        while any(o + p in occ for p in pos):
            o += 1
        offsets[i] = o
        occ.update(o + p for p in pos)
    return _assemble(inst, offsets, open_end)


# A unit is a hole-free (or deliberately holed) run of positions built from
# one or two strings.  ``cells`` lists the pattern index (1-based) found at each
# position, ``None`` for a hole; ``members`` gives (shape, window start relative
# to the unit start) for every string consumed.
@dataclass(frozen=True)
class _Unit:
    cells: tuple[int | None, ...]
    members: tuple[tuple[tuple[int, ...], int], ...]

    @property
    def holes(self) -> int:
        return sum(c is None for c in self.cells)

    @property
    def usage(self) -> Counter:
        return Counter(shape for shape, _ in self.members)


_GAP = (0, 2)


def _units_sigma3() -> list[_Unit]:
    units = []
    for shape in [(0, 1, 2), (0, 1), (1, 2), (0,), (1,), (2,)]:
        units.append(_Unit(tuple(p + 1 for p in shape), ((shape, -shape[0]),)))
    units.append(_Unit((1, 1, 3, 3), ((_GAP, 0), (_GAP, 1))))
    for p in range(3):
        units.append(_Unit((1, p + 1, 3), ((_GAP, 0), ((p,), 1 - p))))
    units.append(_Unit((1, None, 3), ((_GAP, 0),)))
    units.append(_Unit((None,), ()))
    return units


_UNITS3 = _units_sigma3()
_SINGLES3 = [(0,), (1,), (2,)]


def _fits(seq: Sequence[_Unit], start: int, length: int | None, sigma: int) -> bool:
    """Check window bounds for every cell of ``seq`` laid out from ``start``.

    ``length`` is ``None`` when the right end is unconstrained.
    """
    pos = start
    for unit in seq:
        for q in unit.cells:
            if q is not None:
                if pos < q:
                    return False
                if length is not None and pos + sigma - q > length:
                    return False
            pos += 1
    return True


def _span(seq: Sequence[_Unit]) -> int:
    return sum(len(u.cells) for u in seq)


def _usage(seq: Sequence[_Unit]) -> Counter:
    total: Counter = Counter()
    for u in seq:
        total.update(u.usage)
    return total


def _middle_units(remaining: Counter) -> list[_Unit]:
    """Cheapest arrangement of strings away from both ends.

    Gap strings ``x*x`` pair up into ``xyxy``; an odd one out swallows a
    single-symbol string, or keeps its hole when none is left.
    """
    rem = Counter(remaining)
    out = []
    gaps = rem.pop(_GAP, 0)
    out += [_UNITS3[6]] * (gaps // 2)
    if gaps % 2:
        single = next((s for s in _SINGLES3 if rem[s]), None)
        if single is None:
            out.append(_UNITS3[10])
        else:
            rem[single] -= 1
            out.append(_UNITS3[7 + single[0]])
    for shape in [(0, 1, 2), (0, 1), (1, 2), (0,), (1,), (2,)]:
        unit = next(u for u in _UNITS3[:6] if u.members[0][0] == shape)
        out += [unit] * rem[shape]
    return out


def _middle_cost(remaining: Counter) -> int:
    return int(remaining[_GAP] % 2 == 1 and not any(remaining[s] for s in _SINGLES3))


def _usage_key(usage: Counter) -> tuple:
    return tuple(sorted((k, v) for k, v in usage.items() if v))


@functools.cache
def _short_table(open_end: bool) -> dict[tuple, tuple[int, list[_Unit]]]:
    """Best hole count for every arrangement short enough that each unit
    touches a constrained end, keyed by the strings it consumes."""
    table: dict[tuple, tuple[int, list[_Unit]]] = {}
    for k in range(1, 3 if open_end else 5):
        for seq in itertools.product(_UNITS3, repeat=k):
            if not _fits(seq, 1, None if open_end else _span(seq), 3):
                continue
            key = _usage_key(_usage(seq))
            holes = sum(u.holes for u in seq)
            if key not in table or holes < table[key][0]:
                table[key] = (holes, list(seq))
    return table


@functools.cache
def _edge_pairs(side: str) -> list[tuple[Counter, int, tuple[_Unit, ...]]]:
    """Two-unit runs that respect the window bounds at the left or right end."""
    out = []
    for seq in itertools.product(_UNITS3, repeat=2):
        span = _span(seq)
        ok = _fits(seq, 1, None, 3) if side == "head" else _fits(seq, 101 - span, 100, 3)
        if ok:
            out.append((_usage(seq), sum(u.holes for u in seq), seq))
    return out


def solve_sigma3(inst: SodaInstance, *, open_end: bool = False) -> SodaSolution:
    """Optimal layout for ``sigma = 3`` in time linear in ``n``.

    Every arrangement splits into units (see :class:`_Unit`).  Window bounds
    only bite on the first two and, in the closed objective, the last two
    positions, so it suffices to enumerate the two leading and two trailing
    units; whatever lies between is packed by :func:`_middle_units`, where
    strings with a hole in the middle are paired with each other or with a
    single-symbol string.
    """
    if inst.sigma != 3:
        raise InputError(f"solve_sigma3 needs sigma = 3, got {inst.sigma}")
    groups = _by_shape(inst)
    groups.pop((), None)
    have = Counter({shape: len(idx) for shape, idx in groups.items()})
    n_strings = sum(have.values())
    if n_strings == 0:
        return _assemble(inst, [0] * inst.n, open_end)

    key = _usage_key(have)
    best = _short_table(open_end).get(key)
    for h_use, h_holes, head in _edge_pairs("head"):
        if h_use - have:
            continue
        for t_use, t_holes, tail in ([(Counter(), 0, ())] if open_end else _edge_pairs("tail")):
            used = h_use + t_use
            if used - have:
                continue
            rest = have - used
            if not rest:
                continue
            holes = h_holes + t_holes + _middle_cost(rest)
            if best is None or holes < best[0]:
                best = (holes, list(head) + _middle_units(rest) + list(tail))

    assert best is not None
    pools = {shape: list(idx) for shape, idx in groups.items()}
    offsets = [0] * inst.n
    pos = 0
    for unit in best[1]:
        for shape, rel in unit.members:
            offsets[pools[shape].pop(0)] = pos + rel
        pos += len(unit.cells)
    return _assemble(inst, offsets, open_end)


def solve_small_sigma(inst: SodaInstance, *, open_end: bool = False) -> SodaSolution:
    if inst.sigma == 1:
        return _assemble(inst, list(range(inst.n)), open_end)
    if inst.sigma == 2:
        return solve_sigma2(inst, open_end=open_end)
    if inst.sigma == 3:
        return solve_sigma3(inst, open_end=open_end)
    raise InputError(f"no polynomial solver for sigma = {inst.sigma}")


# --- back to double-arrays ---------------------------------------------------------


def materialize(trie: Trie, sol: SodaSolution) -> DoubleArray:
    """Turn a SODA solution for ``trie_to_soda(trie)`` into a double-array.

    String ``k`` at offset ``o`` becomes base ``o + 1`` for its node, so the
    child under label ``c`` lands in slot ``o + c + 1``.
    """
    inst = trie_to_soda(trie)
    if len(sol.offsets) != inst.n:
        raise LayoutError(f"solution has {len(sol.offsets)} offsets, instance has {inst.n} strings")
    base = {node: o + 1 for node, o in zip(inst.nodes, sol.offsets)}
    node_of = [0] * (trie.node_count + 1)
    node_of[ROOT] = ROOT_SLOT
    for node in trie.bfs_order():
        for label, child in trie.children(node).items():
            node_of[child] = base[node] + label
    da = from_slots(trie, node_of, base)
    report = validate(da, trie)
    if not report.ok:
        raise LayoutError("solution does not give a valid double-array: " + "; ".join(map(str, report.violations)))
    return da


def exact_build(trie: Trie, limit: int = 8) -> DoubleArray:
    """Smallest double-array, found with the exhaustive oracle."""
    inst = trie_to_soda(trie)
    return materialize(trie, brute_force_soda(inst, limit, open_end=True))


# --- text format --------------------------------------------------------------------


def dumps_instance(inst: SodaInstance) -> str:
    lines = [f"soda {inst.n} {inst.sigma}"]
    lines += [to_text(s) for s in inst.strings]
    return "\n".join(lines) + "\n"


def loads_instance(text: str) -> SodaInstance:
    lines = text.splitlines()
    if not lines:
        raise InputError("empty SODA file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "soda":
        raise InputError(f"bad SODA header {lines[0]!r}")
    n, sigma = int(head[1]), int(head[2])
    body = lines[1:]
    if len(body) != n:
        raise InputError(f"header announces {n} strings, found {len(body)}")
    strings = []
    for lineno, line in enumerate(body, start=2):
        toks = line.split()
        if len(toks) != sigma:
            raise InputError(f"line {lineno}: expected {sigma} tokens, got {len(toks)}")
        strings.append(tuple(WILDCARD if t == WILDCARD_CHAR else int(t) for t in toks))
    return SodaInstance(sigma, tuple(strings))
