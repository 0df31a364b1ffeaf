import numpy as np
import pytest

from apndesigns.errors import BudgetExceeded
from apndesigns.iso import find_isomorphism, isomorphisms, refine

FANO = np.array([[1 if p in line else 0 for p in range(7)] for line in
                 [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]],
                dtype=bool)


def permuted(inc, perm):
    out = np.zeros_like(inc)
    out[:, perm] = inc
    return out[::-1]


def is_iso(inc1, inc2, perm):
    img = {tuple(r) for r in permuted(inc1, perm)}
    return img == {tuple(r) for r in inc2}


def test_fano_automorphisms_count():
    assert sum(1 for _ in isomorphisms(FANO, FANO)) == 168


def test_relabelled_structure_found():
    rng = np.random.default_rng(0)
    perm = rng.permutation(7)
    other = permuted(FANO, perm)
    found = find_isomorphism(FANO, other)
    assert found is not None and is_iso(FANO, other, found)


def test_fixed_pairs_are_respected():
    perm = find_isomorphism(FANO, FANO, fixed=[(0, 1)])
    assert perm[0] == 1 and is_iso(FANO, FANO, perm)


def test_non_isomorphic():
    other = FANO.copy()
    other[0] = [1, 1, 0, 1, 0, 0, 0]
    assert find_isomorphism(FANO, other) is None


def test_shape_mismatch_yields_nothing():
    assert find_isomorphism(FANO, FANO[:6]) is None


def test_budget():
    with pytest.raises(BudgetExceeded):
        list(isomorphisms(FANO, FANO, node_budget=3))


def test_refinement_is_equitable_on_fano():
    z = np.zeros(7, dtype=np.int64)
    p1, p2, c1, c2 = refine(FANO.astype(np.float32), FANO.astype(np.float32), z, z)
    assert p1.max() == 0 and c1.max() == 0
