"""Synthetic word lists for benchmarks and demos."""

from __future__ import annotations

import string

import numpy as np

from ..errors import InputError

DEFAULT_ALPHABET = string.ascii_lowercase + string.ascii_uppercase


def generate_words(
    count: int,
    seed: int = 0,
    alphabet: str = DEFAULT_ALPHABET,
    min_len: int = 3,
    max_len: int = 8,
    zipf: bool = True,
) -> list[str]:
    """``count`` distinct random words, sorted.

    Letters are drawn with weights ``1/rank`` when ``zipf`` is set, which gives
    tries with a few busy and many sparse nodes, the case where first-fit
    leaves holes.
    """
    if count < 1:
        raise InputError(f"word count must be positive, got {count}")
    if not alphabet or min_len < 1 or max_len < min_len:
        raise InputError("need a non-empty alphabet and 1 <= min_len <= max_len")
    capacity = sum(len(alphabet) ** k for k in range(min_len, max_len + 1))
    if count > capacity:
        raise InputError(f"only {capacity} distinct words of that shape exist")
    rng = np.random.default_rng(seed)
    letters = np.array(list(alphabet))
    p = 1.0 / np.arange(1, len(letters) + 1) if zipf else np.ones(len(letters))
    p = p / p.sum()
    out: set[str] = set()
    while len(out) < count:
        n = int(rng.integers(min_len, max_len + 1))
        out.add("".join(rng.choice(letters, size=n, p=p)))
    return sorted(out)
