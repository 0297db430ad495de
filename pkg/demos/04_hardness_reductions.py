# %% [markdown]
# # Where the hardness comes from
#
# Three constructions, each runnable both ways:
#
# * restricted directed Hamiltonian path to shortest common superstring,
# * that superstring instance to wildcard string packing over a large alphabet,
# * graph 3-coloring to shift-matrix compaction.

# %%
from dasoda.reductions.encoding import block_alignment_audit, encode_scs_to_soda, encoded_superstring, fact1, fact2, fact3
from dasoda.reductions.scs import exact_scs, ham_path_to_superstring, rdhp_to_scs, sample_rdhp, superstring_to_ham_path
from dasoda.reductions.smc import brute_force_smc, coloring_to_smc, shifts_to_coloring

g, path = sample_rdhp(4, seed=3)
scs = rdhp_to_scs(g)
q = ham_path_to_superstring(scs, path)
print("edges:", g.edges)
print("planted path:", path, "-> superstring of length", len(q), "target", scs.target_length)
print("decoded back:", superstring_to_ham_path(scs, q))
print("exact optimum:", exact_scs(scs.strings).length)

# %% [markdown]
# Each superstring letter becomes a block of self-synchronising binary codes,
# so an optimal packing of the encoded strings has to line up with the blocks.

# %%
enc = encode_scs_to_soda(scs)
eq, offsets = encoded_superstring(enc, path)
print("encoded strings:", len(enc.strings), "sigma:", len(enc.strings[0]))
print("facts hold:", fact1(enc), fact2(enc), fact3(enc), " aligned:", block_alignment_audit(eq, enc, offsets))

# %% [markdown]
# A triangle needs three colors and gets them; the shifts of a compacted
# matrix read back as a coloring.

# %%
inst = coloring_to_smc(3, [(1, 2), (2, 3), (1, 3)])
w = brute_force_smc(inst)
print("matrix", inst.matrix.shape, "shifts", w.shifts, "->", shifts_to_coloring(inst, w.shifts))
print("K4 compactable:", brute_force_smc(coloring_to_smc(4, [(a, b) for a in range(1, 5) for b in range(a + 1, 5)])) is not None)
