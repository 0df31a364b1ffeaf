import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apndesigns import boolfn
from apndesigns.blocks import Block, trace_one_set
from apndesigns.errors import PreconditionError
from apndesigns.gf2n import make_field


def random_fn(F, rng):
    return boolfn.from_table(F, rng.integers(0, 2, F.q))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_fast_equals_naive_exhaustive_small(n):
    F = make_field(n)
    rng = np.random.default_rng(n)
    for _ in range(10):
        f = random_fn(F, rng)
        assert boolfn.walsh_fast(f) == boolfn.walsh_naive(f)


def test_fast_equals_naive_every_function_n2():
    F = make_field(2)
    for bits in range(16):
        f = boolfn.from_table(F, [(bits >> x) & 1 for x in range(4)])
        assert boolfn.walsh_fast(f) == boolfn.walsh_naive(f)


def test_trace_spectrum():
    F = make_field(5)
    w = boolfn.walsh(boolfn.trace_fn(F, 1))
    assert w[1] == F.q
    assert np.count_nonzero(w.coeffs) == 1


def test_constant_zero_spectrum():
    F = make_field(4)
    w = boolfn.walsh(boolfn.from_table(F, np.zeros(F.q)))
    assert w[0] == F.q and np.count_nonzero(w.coeffs) == 1


def test_parseval_and_inverse():
    F = make_field(7)
    f = random_fn(F, np.random.default_rng(1))
    w = boolfn.walsh(f)
    assert int(np.sum(w.coeffs**2)) == F.q**2
    assert np.array_equal(boolfn.inverse_walsh(w), f.signs())


def test_trace_cubed_is_semibent():
    F = make_field(5)
    E = trace_one_set(F, 3)
    w = boolfn.walsh(boolfn.char_fn(E))
    assert boolfn.is_semibent(w)
    supp = boolfn.support(w)
    assert sorted(supp.tolist()) == sorted(np.flatnonzero(F.trace_vec(F.elements)).tolist())


def test_semibent_needs_odd_n():
    F = make_field(4)
    with pytest.raises(PreconditionError):
        boolfn.is_semibent(boolfn.walsh(boolfn.trace_fn(F)))


def test_hex_round_trip():
    F = make_field(5)
    f = random_fn(F, np.random.default_rng(2))
    assert boolfn.BooleanFn.from_hex(F, f.to_hex()) == f
    assert len(f.to_hex()) == 8


def test_char_fn_weight():
    F = make_field(5)
    B = Block.from_members(F, [1, 2, 3])
    f = boolfn.char_fn(B)
    assert f.weight() == 3
    assert boolfn.walsh(f)[0] == F.q - 6


@settings(max_examples=30, deadline=None)
@given(st.integers(7, 13), st.integers(0, 2**32 - 1))
def test_fast_equals_naive_random_large(n, seed):
    F = make_field(n)
    f = random_fn(F, np.random.default_rng(seed))
    fast = boolfn.walsh_fast(f)
    naive = boolfn.walsh_naive(f)
    assert fast == naive
