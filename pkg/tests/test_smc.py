import itertools

import numpy as np
import pytest

from dasoda.errors import CapacityError, InputError
from dasoda.reductions.smc import (
    SmcInstance,
    all_graphs,
    brute_force_smc,
    check_witness,
    coloring_to_smc,
    dumps_smc,
    loads_smc,
    shifts_to_coloring,
)

K3 = ((1, 2), (1, 3), (2, 3))
K4 = tuple(itertools.combinations(range(1, 5), 2))


def three_colorable(n, edges):
    return any(all(c[a - 1] != c[b - 1] for a, b in edges) for c in itertools.product(range(3), repeat=n))


def test_adjacency_gadget_shape():
    a = coloring_to_smc(3, K3, gadget="adjacency").matrix
    assert a.shape == (3, 9)
    for row in a:
        assert np.flatnonzero(row).tolist() == [0, 3, 6]
    a = coloring_to_smc(4, (), gadget="adjacency").matrix
    assert [np.flatnonzero(r).tolist() for r in a] == [[0], [3], [6], [9]]
    a = coloring_to_smc(5, ((1, 2), (1, 3), (4, 5)), gadget="adjacency").matrix
    assert a.sum(axis=1).tolist() == [3, 2, 2, 2, 2]


def test_adjacency_gadget_rejects_a_two_colorable_star():
    star = ((1, 2), (1, 3), (1, 4))
    assert three_colorable(4, star)
    assert brute_force_smc(coloring_to_smc(4, star, gadget="adjacency")) is None
    assert brute_force_smc(coloring_to_smc(4, star)) is not None


def test_examples():
    w = brute_force_smc(coloring_to_smc(3, K3))
    assert w is not None and len(set(shifts_to_coloring(coloring_to_smc(3, K3), w.shifts).values())) == 3
    assert brute_force_smc(coloring_to_smc(4, K4)) is None
    one = coloring_to_smc(1, ())
    assert brute_force_smc(one).shifts == (1,)
    edgeless = coloring_to_smc(4, ())
    assert set(shifts_to_coloring(edgeless, (1, 1, 1, 1)).values()) == {"red"}


@pytest.mark.parametrize("n", range(1, 6))
def test_solvable_iff_three_colorable(n):
    for edges in all_graphs(n):
        inst = coloring_to_smc(n, edges)
        w = brute_force_smc(inst)
        assert (w is not None) == three_colorable(n, edges), edges
        if w is not None:
            col = shifts_to_coloring(inst, w.shifts)
            assert all(col[a] != col[b] for a, b in edges)
            assert check_witness(inst, w.shifts) == w.sequence


def test_witness_semantics():
    inst = SmcInstance(np.array([[1, 0, 1], [1, 0, 0]]), 2)
    assert check_witness(inst, (1, 1)) is None
    b = check_witness(inst, (1, 2))
    assert b == (1, 2, 1, 0)
    for i, s in enumerate((1, 2), start=1):
        for j in range(3):
            assert (inst.matrix[i - 1, j] == 1) == (b[s + j - 1] == i)
    with pytest.raises(InputError):
        check_witness(inst, (1, 3))
    with pytest.raises(InputError):
        shifts_to_coloring(coloring_to_smc(3, K3), (1, 1, 2))


def test_guards_and_format():
    with pytest.raises(CapacityError):
        brute_force_smc(coloring_to_smc(13, ()))
    with pytest.raises(InputError):
        coloring_to_smc(2, ((1, 1),))
    with pytest.raises(InputError):
        SmcInstance(np.array([[2]]), 1)
    inst = coloring_to_smc(4, ((1, 2), (3, 4)))
    text = dumps_smc(inst)
    back = loads_smc(text)
    assert np.array_equal(back.matrix, inst.matrix) and back.k == 3 and dumps_smc(back) == text
