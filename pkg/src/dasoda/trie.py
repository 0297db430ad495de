"""Edge-labelled tries over the integer alphabet ``1..sigma``.

Nodes are numbered ``1..M`` in breadth-first discovery order with the root
as node 1; children are discovered in ascending label order.  A trie is
immutable once built.
"""

from __future__ import annotations

import operator
from collections import deque
from collections.abc import Iterable, Sequence

from .errors import InputError

ROOT = 1


class Trie:
    """Rooted, edge-labelled tree storing a set of symbol sequences."""

    __slots__ = ("sigma", "_children", "_parent", "_depth", "terminal")

    def __init__(
        self,
        sigma: int,
        children: list[dict[int, int]],
        terminal: Iterable[int] = (),
    ):
        # children[0] is a placeholder so node ids index directly
        if sigma < 1:
            raise InputError(f"sigma must be positive, got {sigma}")
        self.sigma = sigma
        self._children = [dict(sorted(c.items())) for c in children]
        m = len(children) - 1
        if m < 1:
            raise InputError("a trie needs at least the root node")
        parent: list[tuple[int, int] | None] = [None] * (m + 1)
        for node in range(1, m + 1):
            for label, child in self._children[node].items():
                if not 1 <= label <= sigma:
                    raise InputError(f"label {label} of node {node} outside [1..{sigma}]")
                if not 1 <= child <= m or child == ROOT:
                    raise InputError(f"edge {node}-{label}->{child} has a bad target")
                if parent[child] is not None:
                    raise InputError(f"node {child} has two parents")
                parent[child] = (node, label)
        depth = [0] * (m + 1)
        seen = 1
        queue = deque([ROOT])
        while queue:
            node = queue.popleft()
            for child in self._children[node].values():
                depth[child] = depth[node] + 1
                seen += 1
                queue.append(child)
        if seen != m:
            raise InputError("edges do not form a single tree rooted at node 1")
        self._parent = parent
        self._depth = depth
        self.terminal = frozenset(terminal)
        for node in self.terminal:
            if not 1 <= node <= m:
                raise InputError(f"terminal node {node} out of range")

    @classmethod
    def from_edges(
        cls,
        sigma: int,
        edges: Iterable[tuple[int, int, int]],
        terminal: Iterable[int] = (),
    ) -> Trie:
        """Build from explicit ``(parent, label, child)`` triples.

        Node ids are taken as given (root must be 1); use :func:`build_trie`
        for canonical breadth-first numbering.
        """
        edges = list(edges)
        m = 1 + len(edges)
        children: list[dict[int, int]] = [{} for _ in range(m + 1)]
        for parent, label, child in edges:
            if not 1 <= parent <= m:
                raise InputError(f"parent {parent} out of range")
            if label in children[parent]:
                raise InputError(f"node {parent} has two edges labelled {label}")
            children[parent][label] = child
        return cls(sigma, children, terminal)

    @property
    def node_count(self) -> int:
        return len(self._children) - 1

    @property
    def root(self) -> int:
        return ROOT

    def _check(self, node: int) -> None:
        if not 1 <= node <= self.node_count:
            raise InputError(f"node {node} outside [1..{self.node_count}]")

    def children(self, node: int) -> dict[int, int]:
        """Map label -> child id for the outgoing edges of ``node``."""
        self._check(node)
        return dict(self._children[node])

    def label_set(self, node: int) -> list[int]:
        """Sorted outgoing labels of ``node`` (empty for leaves)."""
        self._check(node)
        return list(self._children[node])

    def parent(self, node: int) -> tuple[int, int] | None:
        """``(parent, label)`` of ``node``, or ``None`` for the root."""
        self._check(node)
        return self._parent[node]

    def depth(self, node: int) -> int:
        self._check(node)
        return self._depth[node]

    def is_internal(self, node: int) -> bool:
        self._check(node)
        return bool(self._children[node])

    def internal_nodes(self) -> list[int]:
        return [v for v in range(1, self.node_count + 1) if self._children[v]]

    @property
    def edges(self) -> list[tuple[int, int, int]]:
        return [
            (node, label, child)
            for node in range(1, self.node_count + 1)
            for label, child in self._children[node].items()
        ]

    def find(self, symbols: Sequence[int]) -> int | None:
        """Node reached by spelling ``symbols`` from the root, if any."""
        node = ROOT
        for c in symbols:
            node = self._children[node].get(c)
            if node is None:
                return None
        return node

    def contains(self, symbols: Sequence[int]) -> bool:
        node = self.find(symbols)
        return node is not None and node in self.terminal

    def spell(self, node: int) -> tuple[int, ...]:
        """Labels along the root-to-``node`` path."""
        self._check(node)
        out = []
        while self._parent[node] is not None:
            node, label = self._parent[node]
            out.append(label)
        return tuple(reversed(out))

    def dfs_order(self) -> list[int]:
        """Pre-order node list, siblings in ascending label order."""
        order = []
        stack = [ROOT]
        while stack:
            node = stack.pop()
            order.append(node)
            stack.extend(reversed(self._children[node].values()))
        return order

    def bfs_order(self) -> list[int]:
        # ids are assigned in BFS order by build_trie, but from_edges may not be
        order = []
        queue = deque([ROOT])
        while queue:
            node = queue.popleft()
            order.append(node)
            queue.extend(self._children[node].values())
        return order

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trie):
            return NotImplemented
        return (
            self.sigma == other.sigma
            and self._children == other._children
            and self.terminal == other.terminal
        )

    def __hash__(self) -> int:
        return hash((self.sigma, tuple(tuple(c.items()) for c in self._children)))

    def __repr__(self) -> str:
        return f"Trie(M={self.node_count}, sigma={self.sigma})"


def _is_symbol(c, sigma: int) -> bool:
    try:
        c = operator.index(c)
    except TypeError:
        return False
    return 1 <= c <= sigma


def build_trie(strings: Iterable[Sequence[int]], sigma: int) -> Trie:
    """Build the trie storing ``strings`` (duplicates collapse).

    Raises :class:`InputError` naming the first string and position holding a
    symbol outside ``1..sigma``.
    """
    if sigma < 1:
        raise InputError(f"sigma must be positive, got {sigma}")
    nested: dict = {}
    ends = object()
    for idx, s in enumerate(strings):
        cur = nested
        for pos, c in enumerate(s):
            if not _is_symbol(c, sigma):
                raise InputError(
                    f"string #{idx} {list(s)!r}: symbol {c!r} at position {pos} "
                    f"outside [1..{sigma}]"
                )
            cur = cur.setdefault(operator.index(c), {})
        cur[ends] = True

    children: list[dict[int, int]] = [{}]
    terminal = []
    queue = deque([nested])
    children.append({})
    next_id = 2
    node = 1
    while queue:
        cur = queue.popleft()
        if ends in cur:
            terminal.append(node)
        for label in sorted(k for k in cur if k is not ends):
            children[node][label] = next_id
            children.append({})
            next_id += 1
            queue.append(cur[label])
        node += 1
    return Trie(sigma, children, terminal)


def chain_trie(length: int, sigma: int = 1, label: int = 1) -> Trie:
    """Unary path of ``length`` nodes, every edge labelled ``label``."""
    return build_trie([[label] * (length - 1)], sigma)


def random_trie(node_count: int, sigma: int, rng) -> Trie:
    """Uniform-ish random trie: grow ``node_count - 1`` edges at random free slots."""
    strings: set[tuple[int, ...]] = {()}
    while len(strings) < node_count:
        pool = sorted(strings)
        base = pool[int(rng.integers(len(pool)))]
        strings.add(base + (int(rng.integers(1, sigma + 1)),))
    return build_trie(sorted(strings), sigma)


def enumerate_tries(node_count: int, sigma: int):
    """Yield every trie with exactly ``node_count`` nodes over ``1..sigma``.

    Each prefix-closed set of strings is produced once, by adding nodes in
    shortlex order.
    """
    def key(s):
        return (len(s), s)

    def grow(chosen: list[tuple[int, ...]], members: set):
        if len(chosen) == node_count:
            yield build_trie(chosen, sigma)
            return
        last = key(chosen[-1])
        cands = sorted(
            {p + (c,) for p in chosen for c in range(1, sigma + 1)} - members,
            key=key,
        )
        for cand in cands:
            if key(cand) <= last:
                continue
            chosen.append(cand)
            members.add(cand)
            yield from grow(chosen, members)
            chosen.pop()
            members.discard(cand)

    yield from grow([()], {()})
