# %% [markdown]
# # Optimal layouts as string packing
#
# Each internal node becomes a length-`sigma` string: its own id at the
# positions of its child labels and wildcards elsewhere.  Packing these
# strings into one text without two solid cells colliding is the same task
# as choosing `base` values, so the shortest packing gives the smallest
# double-array.

# %%
from dasoda.cli.formats import words_to_trie
from dasoda.double_array import greedy_build
from dasoda.soda import (
    WILDCARD,
    SodaInstance,
    brute_force_soda,
    exact_build,
    solve_small_sigma,
    to_text,
    trie_to_soda,
)

trie, _ = words_to_trie(["aa", "ba", "bc"])
inst = trie_to_soda(trie)
for s in inst.strings:
    print(to_text(s))

# %% [markdown]
# The exhaustive search caps out at eight strings, which is plenty for
# checking the greedy builder on small tries.

# %%
sol = brute_force_soda(inst, open_end=True)
print("packed text:", to_text(sol.string), "offsets:", sol.offsets)
print("greedy N:", greedy_build(trie).N, " exact N:", exact_build(trie).N)

# %% [markdown]
# For two or three letters a direct construction is optimal and runs in
# linear time, so it scales far past the exhaustive cap.

# %%
alt = SodaInstance(4, ((1, WILDCARD, 1, WILDCARD), (WILDCARD, 2, WILDCARD, 2)))
print("alternating pair fits in", brute_force_soda(alt).length)

many = SodaInstance(3, tuple(((i, WILDCARD, i), (WILDCARD, i, WILDCARD))[i % 2] for i in range(1, 41)))
print("40 strings over 3 letters:", solve_small_sigma(many).length)
