"""Double-array layouts of a trie: validity, traversal, and simple builders.

Slots are numbered ``1..N``.  The root always sits in slot 1 and base values
are at least 1, so every child slot is at least 2.  ``base`` and ``check`` are
stored as integer arrays of length ``N`` (index ``slot - 1``) with
:data:`VACANT` marking empty entries; leaves carry no base value.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .trie import ROOT, Trie

VACANT = 0
ROOT_SLOT = 1


@dataclass(frozen=True, eq=False)
class DoubleArray:
    base: np.ndarray
    check: np.ndarray
    node_of: np.ndarray  # node_of[v] = slot of trie node v; index 0 unused
    terminal: np.ndarray = field(default=None)  # per-slot flag

    def __post_init__(self):
        if self.terminal is None:
            object.__setattr__(self, "terminal", np.zeros(len(self.base), dtype=bool))

    @property
    def N(self) -> int:
        return len(self.base)

    @property
    def node_count(self) -> int:
        return len(self.node_of) - 1

    def slot(self, node: int) -> int:
        return int(self.node_of[node])

    def base_at(self, slot: int) -> int | None:
        v = int(self.base[slot - 1])
        return None if v == VACANT else v

    def check_at(self, slot: int) -> int | None:
        v = int(self.check[slot - 1])
        return None if v == VACANT else v

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DoubleArray):
            return NotImplemented
        return (
            np.array_equal(self.base, other.base)
            and np.array_equal(self.check, other.check)
            and np.array_equal(self.node_of, other.node_of)
            and np.array_equal(self.terminal, other.terminal)
        )

    def __repr__(self) -> str:
        return f"DoubleArray(N={self.N}, M={self.node_count})"


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def kinds(self) -> list[str]:
        return [v.kind for v in self.violations]


def from_slots(trie: Trie, node_of: Sequence[int], base: dict[int, int]) -> DoubleArray:
    """Assemble the arrays from a node->slot map and node->base map.

    ``node_of`` is indexed by node id (entry 0 ignored); ``base`` only needs
    entries for internal nodes.  No validity check is made here.
    """
    node_of = np.asarray(node_of, dtype=np.int64).copy()
    node_of[0] = 0
    n = int(node_of[1:].max())
    base_arr = np.zeros(n, dtype=np.int64)
    check_arr = np.zeros(n, dtype=np.int64)
    terminal = np.zeros(n, dtype=bool)
    for node, b in base.items():
        base_arr[node_of[node] - 1] = b
    for parent, _label, child in trie.edges:
        check_arr[node_of[child] - 1] = node_of[parent]
    for node in trie.terminal:
        terminal[node_of[node] - 1] = True
    return DoubleArray(base_arr, check_arr, node_of, terminal)


def validate(da: DoubleArray, trie: Trie) -> ValidationReport:
    """Check both double-array conditions and the bookkeeping invariants."""
    out: list[Violation] = []
    n = da.N
    m = trie.node_count
    if len(da.check) != n or len(da.terminal) != n:
        out.append(Violation("shape", f"base/check/terminal lengths differ (N={n})"))
        return ValidationReport(out)
    if da.node_count != m:
        out.append(Violation("shape", f"node_of covers {da.node_count} nodes, trie has {m}"))
        return ValidationReport(out)

    slots = [int(s) for s in da.node_of[1:]]
    for node, s in enumerate(slots, start=1):
        if not 1 <= s <= n:
            out.append(Violation("range", f"node {node} mapped to slot {s} outside [1..{n}]"))
    if out:
        return ValidationReport(out)
    owner: dict[int, int] = {}
    for node, s in enumerate(slots, start=1):
        if s in owner:
            out.append(Violation("injective", f"nodes {owner[s]} and {node} share slot {s}"))
        else:
            owner[s] = node
    if max(slots) != n:
        out.append(Violation("length", f"N={n} but the largest node slot is {max(slots)}"))
    root_slot = slots[ROOT - 1]
    if da.check[root_slot - 1] != VACANT:
        out.append(Violation("root", f"check at root slot {root_slot} is not vacant"))

    for parent, label, child in trie.edges:
        ps, cs = slots[parent - 1], slots[child - 1]
        b = int(da.base[ps - 1])
        if b == VACANT or b + label != cs:
            out.append(Violation(
                "condition-1",
                f"edge ({parent},{label},{child}): base[{ps}]+{label}="
                f"{'None' if b == VACANT else b + label}, child slot is {cs}",
            ))
        if int(da.check[cs - 1]) != ps:
            out.append(Violation(
                "condition-2",
                f"edge ({parent},{label},{child}): check[{cs}]={int(da.check[cs - 1])}, "
                f"parent slot is {ps}",
            ))

    for s in np.flatnonzero(da.check != VACANT) + 1:
        node = owner.get(int(s))
        if node is None or node == ROOT:
            out.append(Violation("stray-check", f"slot {s} has check {int(da.check[s - 1])} but holds no child node"))
    return ValidationReport(out)


def traverse(da: DoubleArray, symbols: Sequence[int], sigma: int | None = None) -> int | None:
    """Follow ``symbols`` from the root slot; return the final slot or ``None``.

    ``sigma`` bounds the accepted symbols; when omitted only positivity is
    enforced.
    """
    cur = int(da.node_of[ROOT])
    n = da.N
    for pos, c in enumerate(symbols):
        if c < 1 or (sigma is not None and c > sigma):
            raise InputError(f"symbol {c} at position {pos} out of range")
        b = int(da.base[cur - 1])
        if b == VACANT:
            return None
        nxt = b + c
        if nxt > n or int(da.check[nxt - 1]) != cur:
            return None
        cur = nxt
    return cur


def contains(da: DoubleArray, symbols: Sequence[int]) -> bool:
    slot = traverse(da, symbols)
    return slot is not None and bool(da.terminal[slot - 1])


def trivial_layout(trie: Trie) -> DoubleArray:
    """Reserve a private window of ``sigma`` slots for every internal node.

    The k-th internal node (breadth-first) gets base ``1 + (k-1)*sigma``, so its
    children land in ``[2 + (k-1)*sigma, 1 + k*sigma]``.
    """
    sigma = trie.sigma
    node_of = [0] * (trie.node_count + 1)
    node_of[ROOT] = ROOT_SLOT
    base: dict[int, int] = {}
    k = 0
    for node in trie.bfs_order():
        children = trie.children(node)
        if not children:
            continue
        base[node] = 1 + k * sigma
        k += 1
        for label, child in children.items():
            node_of[child] = base[node] + label
    return from_slots(trie, node_of, base)


def greedy_build(trie: Trie, order: str = "dfs") -> DoubleArray:
    """First-fit layout: each visited node takes the smallest feasible base.

    Nodes are visited in pre-order (``"dfs"``) or level order (``"bfs"``); when a
    node is visited, all of its children are placed at once.
    """
    if order == "dfs":
        visit = trie.dfs_order()
    elif order == "bfs":
        visit = trie.bfs_order()
    else:
        raise InputError(f"unknown order {order!r}; expected 'dfs' or 'bfs'")

    occupied = bytearray(2 * trie.node_count * trie.sigma + 2 * trie.sigma + 4)
    occupied[ROOT_SLOT] = 1
    first_free = 2  # every slot below this is occupied
    node_of = [0] * (trie.node_count + 1)
    node_of[ROOT] = ROOT_SLOT
    base: dict[int, int] = {}
    for node in visit:
        children = trie.children(node)
        if not children:
            continue
        labels = list(children)
        lo = labels[0]
        b = max(1, first_free - lo)
        while any(occupied[b + c] for c in labels):
            b += 1
        base[node] = b
        for label, child in children.items():
            occupied[b + label] = 1
            node_of[child] = b + label
        while occupied[first_free]:
            first_free += 1
    return from_slots(trie, node_of, base)


def size_and_density(da: DoubleArray, trie: Trie | None = None) -> tuple[int, float]:
    """Array length ``N`` and the fraction ``M / N`` of slots holding nodes."""
    m = trie.node_count if trie is not None else da.node_count
    return da.N, m / da.N
