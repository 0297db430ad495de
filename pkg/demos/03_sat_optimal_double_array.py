# %% [markdown]
# # Shrinking a double-array with MAX-SAT
#
# The layout problem is written as weighted CNF: hard clauses keep the
# double-array well formed inside `N` slots, and one soft clause per slot
# prefers that slot (and all later ones) to stay empty.  The bundled CDCL
# solver answers the queries; any solver speaking DIMACS output can replace it.

# %%
from dasoda.cli.formats import words_to_trie
from dasoda.cli.words import generate_words
from dasoda.double_array import validate
from dasoda.maxsat import clause_estimate, emit_wcnf, encode, optimize_size

trie, _ = words_to_trie(["aa", "ba", "bc"])
wcnf, varmap = encode(trie, 7)
print(emit_wcnf(wcnf).splitlines()[0], "(header of the N=7 model)")
print("hard clauses estimated:", clause_estimate(trie, 7), "emitted:", len(wcnf.hard), "soft:", len(wcnf.soft))

# %% [markdown]
# Three strategies share the model: one MAX-SAT call, a downward walk of
# satisfiability calls, or a binary search between the trie size and the
# greedy size.

# %%
for strategy in ("full", "decision", "binsearch"):
    res = optimize_size(trie, strategy)
    print(f"{strategy:9s} greedy={res.greedy_size} sat={res.size} status={res.status} calls={len(res.calls)}")

# %% [markdown]
# A larger generated vocabulary.  Skewed letter frequencies leave holes in
# the first-fit layout that the solver can close.

# %%
trie, alphabet = words_to_trie(generate_words(60, seed=1))
res = optimize_size(trie, "binsearch", timeout=30, amo="sequential")
print(f"M={trie.node_count} sigma={alphabet.sigma} greedy={res.greedy_size} sat={res.size} valid={validate(res.da, trie).ok}")
