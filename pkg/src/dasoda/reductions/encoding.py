"""Encoding an SCS instance from :mod:`.scs` as wildcard strings.

Every vertex letter ``u`` gets a bit code ``b(u) = alpha . phi(id(u))`` where
``phi`` maps 0 -> 01 and 1 -> 10 and ``alpha = 01000011``.  A string with id
``i`` writes its codes through ``g_i`` (0 -> wildcard, 1 -> ``i``).  Each
letter becomes a block of ``3 l'`` positions, so an SCS string ``xyz`` becomes
``f(xyz) = f_L(x) f_M(y) f_R(z)`` of length ``9 l'``, and the three roles of
one letter interlock into a wildcard-free block.  Patch strings (a lone
``f_M``/``f_L`` for every ``w`` letter, ``f_M``/``f_R`` for every ``v``
letter) fill the role missing wherever a block is covered by only two
strings.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..errors import InputError, LayoutError
from ..soda import WILDCARD, SodaInstance, compatible, wildcard_merge
from .scs import DAGGER, DOLLAR, HASH, ScsInstance, ham_path_to_superstring, superstring_to_ham_path

ALPHA = (0, 1, 0, 0, 0, 0, 1, 1)
ROLES = ("L", "M", "R")
SPECIAL_ROLE = {DAGGER: "L", HASH: "M", DOLLAR: "R"}


def phi(bits: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for b in bits:
        out += (0, 1) if b == 0 else (1, 0)
    return tuple(out)


def flip(bits: Sequence[int]) -> tuple[int, ...]:
    return tuple(1 - b for b in bits)


def g(i: int, bits: Sequence[int]) -> tuple[int, ...]:
    return tuple(i if b else WILDCARD for b in bits)


@dataclass(frozen=True)
class EncodedInstance:
    scs: ScsInstance
    width: int  # bits per letter id before phi
    codes: dict[int, tuple[int, ...]]  # letter symbol -> b(u)
    strings: tuple[tuple[int, ...], ...]  # the string with id k is strings[k - 1]
    kinds: tuple[tuple, ...]  # ("f", index into scs.strings) or ("patch", role, letter)

    @property
    def lp(self) -> int:
        """Code length ``l' = 8 + 2w``."""
        return len(ALPHA) + 2 * self.width

    @property
    def block(self) -> int:
        return 3 * self.lp

    @property
    def ell(self) -> int:
        return 9 * self.lp

    @property
    def target_length(self) -> int:
        return self.scs.target_length * self.block

    def patch_id(self, role: str, letter: int) -> int:
        return self.kinds.index(("patch", role, letter)) + 1

    def to_soda(self) -> SodaInstance:
        """Same strings as a SODA instance: patches get ``3 l'`` wildcards on each side."""
        pad = (WILDCARD,) * self.block
        out = [s if len(s) == self.ell else pad + s + pad for s in self.strings]
        return SodaInstance(self.ell, tuple(out))


def encode_scs_to_soda(scs: ScsInstance) -> EncodedInstance:
    letters = sorted(k for k, r in scs.roles.items() if r.startswith("v:")) + sorted(
        k for k, r in scs.roles.items() if r.startswith("w:")
    )
    width = max(1, math.ceil(math.log2(len(letters)))) if letters else 1
    codes = {}
    for idx, k in enumerate(letters):
        bits = tuple((idx >> (width - 1 - p)) & 1 for p in range(width))
        codes[k] = ALPHA + phi(bits)
    lp = len(ALPHA) + 2 * width

    def f_piece(i, role, sym):
        if sym in SPECIAL_ROLE:
            if SPECIAL_ROLE[sym] != role:
                raise InputError(f"separator {scs.roles[sym]} in position {role}")
            return (i,) * (3 * lp)
        return _piece(i, role, codes[sym])

    strings, kinds = [], []
    for idx, xyz in enumerate(scs.strings):
        i = len(strings) + 1
        strings.append(sum((f_piece(i, role, sym) for role, sym in zip(ROLES, xyz)), ()))
        kinds.append(("f", idx))
    patches = [("M", k) for k in letters if scs.roles[k].startswith("w:")]
    patches += [("L", k) for k in letters if scs.roles[k].startswith("w:")]
    patches += [("M", k) for k in letters if scs.roles[k].startswith("v:")]
    patches += [("R", k) for k in letters if scs.roles[k].startswith("v:")]
    for role, k in patches:
        i = len(strings) + 1
        strings.append(_piece(i, role, codes[k]))
        kinds.append(("patch", role, k))
    return EncodedInstance(scs, width, codes, tuple(strings), tuple(kinds))


def _piece(i: int, role: str, code: Sequence[int]) -> tuple[int, ...]:
    lp = len(code)
    gb, gn, hole = g(i, code), g(i, flip(code)), (WILDCARD,) * lp
    return {"L": gb + gn + hole, "M": gn + hole + gb, "R": hole + gb + gn}[role]


# --- structural facts ----------------------------------------------------------------


def fact1(enc: EncodedInstance) -> bool:
    """``g_i(b(c)) g_i(flip b(c))`` has exactly ``l'`` wildcards, for every letter."""
    return all(
        sum(x == WILDCARD for x in g(1, b) + g(1, flip(b))) == enc.lp for b in enc.codes.values()
    )


def fact2(enc: EncodedInstance, ids: tuple[int, int, int] = (1, 2, 3)) -> bool:
    """The three roles of one letter (distinct ids) merge into a full block."""
    for b in enc.codes.values():
        merged = _piece(ids[0], "L", b)
        merged = wildcard_merge(merged, _piece(ids[1], "M", b))
        merged = wildcard_merge(merged, _piece(ids[2], "R", b))
        if len(merged) != enc.block or WILDCARD in merged:
            return False
    return True


def fact3(enc: EncodedInstance) -> bool:
    """Separator blocks occur only as the L part of ``‡``, M of ``#``, R of ``$``."""
    blk = enc.block
    for k, (s, kind) in enumerate(zip(enc.strings, enc.kinds), start=1):
        full = [p for p in range(len(s) // blk) if all(x == k for x in s[p * blk:(p + 1) * blk])]
        if kind[0] == "patch":
            if full:
                return False
            continue
        xyz = enc.scs.strings[kind[1]]
        expected = [p for p, sym in enumerate(xyz) if sym in SPECIAL_ROLE]
        if full != expected:
            return False
        if any(SPECIAL_ROLE[xyz[p]] != ROLES[p] for p in expected):
            return False
    return True


def code_exclusivity(enc: EncodedInstance) -> bool:
    """``g(b(c))`` is compatible with ``g(flip b(d))`` iff ``c = d`` and never with ``g(b(d))``."""
    for c, bc in enc.codes.items():
        for d, bd in enc.codes.items():
            if compatible(g(1, bc), g(2, bd)):
                return False
            if compatible(g(1, bc), g(2, flip(bd))) != (c == d):
                return False
    return True


def codes_well_formed(enc: EncodedInstance) -> bool:
    """Shared prefix ``alpha``, balanced ``phi`` pairs, pairwise distinct codes."""
    vals = list(enc.codes.values())
    if len(set(vals)) != len(vals):
        return False
    for b in vals:
        if b[: len(ALPHA)] != ALPHA or len(b) != enc.lp:
            return False
        tail = b[len(ALPHA):]
        if any(tail[p] + tail[p + 1] != 1 for p in range(0, len(tail), 2)):
            return False
    return True


# --- the superstring built from a path ------------------------------------------


def encoded_superstring(enc: EncodedInstance, path: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Wildcard-free superstring of the encoded strings along a Hamiltonian path.

    Every ``f(xyz)`` is laid over the three blocks where ``xyz`` sits in the
    plain superstring; each block then lacks at most one role, which a patch
    string of that letter fills.  Returns the string and each string's start.
    """
    scs = enc.scs
    plain = ham_path_to_superstring(scs, path)
    blk = enc.block
    q = np.zeros(len(plain) * blk, dtype=np.int64)
    offsets = [-1] * len(enc.strings)
    covered: list[set[str]] = [set() for _ in plain]

    def put(k: int, start: int):
        s = np.asarray(enc.strings[k - 1], dtype=np.int64)
        window = q[start:start + len(s)]
        clash = (s != WILDCARD) & (window != WILDCARD)
        if clash.any():
            raise LayoutError(f"string {k} collides at offset {start}")
        window[s != WILDCARD] = s[s != WILDCARD]
        offsets[k - 1] = start

    for k, kind in enumerate(enc.kinds, start=1):
        if kind[0] != "f":
            continue
        xyz = scs.strings[kind[1]]
        p = next(p for p in range(len(plain) - 2) if plain[p:p + 3] == xyz)
        put(k, p * blk)
        for role, pos in zip(ROLES, range(p, p + 3)):
            covered[pos].add(role)
    for pos, sym in enumerate(plain):
        if sym in SPECIAL_ROLE:
            continue
        for role in ROLES:
            if role not in covered[pos]:
                k = enc.patch_id(role, sym)
                if offsets[k - 1] >= 0:
                    raise LayoutError(f"patch {role} of letter {sym} needed twice")
                put(k, pos * blk)
    unused = [enc.kinds[k] for k in range(len(enc.strings)) if offsets[k] < 0]
    if unused:
        raise LayoutError(f"{len(unused)} patch strings left unplaced, e.g. {unused[0]}")
    if (q == WILDCARD).any():
        raise LayoutError("wildcards remain in the encoded superstring")
    return tuple(int(x) for x in q), tuple(offsets)


def matches_at(q: Sequence[int], s: Sequence[int], start: int) -> bool:
    if start < 0 or start + len(s) > len(q):
        return False
    return all(x == WILDCARD or y == WILDCARD or x == y for x, y in zip(s, q[start:start + len(s)]))


def block_alignment_audit(q: Sequence[int], enc: EncodedInstance, placement: Sequence[int]) -> bool:
    """True iff every placed string ends on a multiple of the block length.

    Raises :class:`InputError` if a placed string does not match ``q``.
    """
    if len(placement) != len(enc.strings):
        raise InputError(f"placement has {len(placement)} offsets for {len(enc.strings)} strings")
    for k, (s, start) in enumerate(zip(enc.strings, placement), start=1):
        if not matches_at(q, s, start):
            raise InputError(f"string {k} does not match at offset {start}")
    return all((start + len(s)) % enc.block == 0 for s, start in zip(enc.strings, placement))


def decode_blocks(enc: EncodedInstance, q: Sequence[int]) -> tuple[int, ...]:
    """Plain superstring behind a block-aligned, wildcard-free encoded one.

    A separator block is one repeated id; a letter block carries ``b(c)`` in
    its first ``l'`` cells as the positions of the id found at cell 1
    (``alpha`` starts with 0 then 1).
    """
    blk, lp = enc.block, enc.lp
    if len(q) % blk:
        raise LayoutError(f"length {len(q)} is not a multiple of the block length {blk}")
    by_code = {b: c for c, b in enc.codes.items()}
    plain = []
    for p in range(len(q) // blk):
        cells = q[p * blk:(p + 1) * blk]
        if len(set(cells)) == 1:
            kind = enc.kinds[cells[0] - 1]
            if kind[0] != "f":
                raise LayoutError(f"block {p} is a solid block of a patch string")
            xyz = enc.scs.strings[kind[1]]
            specials = [sym for sym in xyz if sym in SPECIAL_ROLE]
            # C_s = "‡#w" gives two solid blocks in a row; count back to pick one
            run = 0
            while p - run - 1 >= 0 and set(q[(p - run - 1) * blk:(p - run) * blk]) == {cells[0]}:
                run += 1
            if run >= len(specials):
                raise LayoutError(f"block {p}: too many solid blocks of string {cells[0]}")
            plain.append(specials[run])
            continue
        owner = cells[1]
        code = tuple(int(x == owner) for x in cells[:lp])
        if code not in by_code:
            raise LayoutError(f"block {p} does not carry a letter code")
        plain.append(by_code[code])
    return tuple(plain)


def encoded_to_ham_path(enc: EncodedInstance, q: Sequence[int]) -> tuple[int, ...]:
    """Recover the path from a block-aligned encoded superstring."""
    return superstring_to_ham_path(enc.scs, decode_blocks(enc, q))
