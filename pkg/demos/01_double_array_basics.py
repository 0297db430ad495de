# %% [markdown]
# # Tries and double-arrays
#
# A double-array stores a trie in two integer arrays: `base` and `check`.
# Following edge `c` out of the node in slot `s` lands in slot `base[s] + c`,
# and `check` of that slot must point back to `s`.  The size `N` is the
# largest slot in use, so holes left by the layout cost memory.

# %%
import numpy as np

from dasoda.cli.formats import words_to_trie
from dasoda.double_array import contains, greedy_build, size_and_density, trivial_layout, validate

words = ["aa", "ba", "bc"]
trie, alphabet = words_to_trie(words)
print("nodes:", trie.node_count, "sigma:", alphabet.sigma)

# %% [markdown]
# First-fit places each node's children at the smallest `base` that fits.
# The trivial layout gives every node its own block of `sigma` slots.

# %%
for name, da in [("trivial", trivial_layout(trie)), ("greedy", greedy_build(trie))]:
    size, dens = size_and_density(da, trie)
    print(f"{name:8s} N={size:3d} density={dens:.2f} valid={validate(da, trie).ok}")

da = greedy_build(trie)
print("base :", da.base.tolist())
print("check:", da.check.tolist())
print("'bc' stored:", contains(da, alphabet.encode("bc")), " 'ab' stored:", contains(da, alphabet.encode("ab")))

# %% [markdown]
# `validate` names every broken condition, which helps when editing arrays by hand.

# %%
broken = greedy_build(trie)
broken.check[np.flatnonzero(broken.check > 0)[0]] = 0
print(validate(broken, trie).violations[:3])
