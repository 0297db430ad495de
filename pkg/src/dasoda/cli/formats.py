"""Flat-file formats for double-arrays, word lists and run configuration."""

from __future__ import annotations

import os
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..double_array import DoubleArray
from ..errors import InputError
from ..trie import Trie, build_trie


@dataclass(frozen=True)
class Alphabet:
    """Characters mapped to ``1..sigma`` in ascending code point order."""

    chars: tuple[str, ...]

    @classmethod
    def of(cls, words: Iterable[str]) -> Alphabet:
        return cls(tuple(sorted({c for w in words for c in w})))

    @property
    def sigma(self) -> int:
        return len(self.chars)

    def encode(self, word: str) -> tuple[int, ...] | None:
        """Symbols of ``word``, or ``None`` if it uses an unknown character."""
        index = self._index
        try:
            return tuple(index[c] for c in word)
        except KeyError:
            return None

    @property
    def _index(self) -> dict[str, int]:
        return {c: k for k, c in enumerate(self.chars, start=1)}


def read_words(path: str | os.PathLike) -> list[str]:
    """One word per line, UTF-8; blank lines are skipped."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise InputError(f"cannot read word list {path}: {err}") from None
    words = [ln.rstrip("\r\n") for ln in text.split("\n")]
    words = [w for w in words if w.strip()]
    if not words:
        raise InputError(f"word list {path} is empty")
    return words


def words_to_trie(words: Sequence[str], alphabet: Alphabet | None = None) -> tuple[Trie, Alphabet]:
    alphabet = alphabet or Alphabet.of(words)
    seqs = []
    for k, w in enumerate(words):
        s = alphabet.encode(w)
        if s is None:
            raise InputError(f"word #{k} {w!r} uses characters outside the alphabet")
        seqs.append(s)
    return build_trie(seqs, max(1, alphabet.sigma)), alphabet


# --- double-array files -------------------------------------------------------------


def dumps_da(da: DoubleArray, alphabet: Alphabet | None = None) -> str:
    """``da N M``, then base, check, node slots, per-slot terminal flags, and
    the alphabet as code points."""
    lines = [
        f"da {da.N} {da.node_count}",
        " ".join(map(str, da.base.tolist())),
        " ".join(map(str, da.check.tolist())),
        " ".join(map(str, da.node_of[1:].tolist())),
        " ".join("1" if t else "0" for t in da.terminal.tolist()),
    ]
    chars = alphabet.chars if alphabet else ()
    lines.append(" ".join(["alphabet", str(len(chars))] + [str(ord(c)) for c in chars]))
    return "\n".join(lines) + "\n"


def loads_da(text: str) -> tuple[DoubleArray, Alphabet]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != 6:
        raise InputError(f"double-array file needs 6 lines, found {len(lines)}")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "da":
        raise InputError(f"bad header {lines[0]!r}")
    try:
        n, m = int(head[1]), int(head[2])
        base, check, node_of, term = (
            [int(x) for x in lines[k].split()] for k in range(1, 5)
        )
        alpha = lines[5].split()
        if alpha[:1] != ["alphabet"]:
            raise InputError("missing alphabet line")
        sigma = int(alpha[1])
        chars = tuple(chr(int(x)) for x in alpha[2:])
    except (ValueError, IndexError) as err:
        raise InputError(f"malformed double-array file: {err}") from None
    if len(base) != n or len(check) != n or len(term) != n:
        raise InputError(f"base/check/terminal lines must hold N={n} values")
    if len(node_of) != m:
        raise InputError(f"node line must hold M={m} values")
    if len(chars) != sigma:
        raise InputError(f"alphabet announces {sigma} characters, lists {len(chars)}")
    if any(t not in (0, 1) for t in term):
        raise InputError("terminal flags must be 0 or 1")
    da = DoubleArray(
        np.array(base, dtype=np.int64),
        np.array(check, dtype=np.int64),
        np.array([0] + node_of, dtype=np.int64),
        np.array(term, dtype=bool),
    )
    return da, Alphabet(chars)


# --- durations and config ---------------------------------------------------------------

_DURATION = re.compile(r"^\s*(\d+(?:\.\d*)?)\s*(ms|s|m|min|h)?\s*$")
_UNIT = {None: 1.0, "s": 1.0, "ms": 1e-3, "m": 60.0, "min": 60.0, "h": 3600.0}


def parse_duration(text: str | float | int | None) -> float | None:
    """Seconds in ``text`` ("90", "1.5s", "2m", "1h"); ``none``/``inf`` mean no limit."""
    if text is None:
        return None
    if isinstance(text, (int, float)):
        return float(text)
    if text.strip().lower() in ("none", "inf", ""):
        return None
    m = _DURATION.match(text)
    if not m:
        raise InputError(f"bad duration {text!r}; use e.g. 30s, 2m, 1h")
    return float(m.group(1)) * _UNIT[m.group(2)]


CONFIG_KEYS = ("solver", "solver_command", "timeout", "budget", "strategy", "amo", "heuristic", "max_clauses")


def load_config(path: str | os.PathLike | None, environ=os.environ) -> dict[str, str]:
    """``key = value`` lines (``#`` comments); ``DASODA_<KEY>`` variables override."""
    cfg: dict[str, str] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as err:
            raise InputError(f"cannot read config {path}: {err}") from None
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in CONFIG_KEYS:
                raise InputError(f"{path}:{lineno}: expected one of {CONFIG_KEYS} as 'key = value'")
            cfg[key] = value.strip()
    for key in CONFIG_KEYS:
        env = environ.get("DASODA_" + key.upper())
        if env is not None:
            cfg[key] = env
    return cfg
