from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weylepi import linalg


def _matrix(draw_rows, draw_cols, p):
    return st.lists(st.lists(st.integers(0, p - 1), min_size=draw_cols, max_size=draw_cols),
                    min_size=draw_rows, max_size=draw_rows)


@st.composite
def matrices(draw, p=None):
    p = p or draw(st.sampled_from([2, 3, 5, 7]))
    r = draw(st.integers(1, 7))
    c = draw(st.integers(1, 7))
    return p, np.array(draw(_matrix(r, c, p)), dtype=np.int64)


def test_primes_and_roots():
    assert [q for q in range(20) if linalg.is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert linalg.primitive_root(3) == 2
    assert linalg.primitive_root(5) == 2
    assert linalg.primitive_root(7) == 3
    with pytest.raises(ZeroDivisionError):
        linalg.inv_mod(5, 5)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_flint_rref_matches_numpy_oracle(pm):
    p, a = pm
    red, piv = linalg.rref(a, a.shape[1], p)
    ref, rpiv = linalg.rref_numpy(a, p)
    assert piv == rpiv
    assert np.array_equal(red, ref)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_nullspace_is_kernel_of_full_dimension(pm):
    p, a = pm
    ker = linalg.nullspace(a, a.shape[1], p)
    assert not ((a @ ker.T) % p).any()
    assert ker.shape[0] + linalg.rank(a, a.shape[1], p) == a.shape[1]
    assert np.array_equal(ker, linalg.nullspace_numpy(a, a.shape[1], p))


@settings(max_examples=100, deadline=None)
@given(matrices(p=3), matrices(p=3))
def test_stacked_nullspace_equals_kernel_of_stack(m1, m2):
    (_, a), (_, b) = m1, m2
    n = min(a.shape[1], b.shape[1])
    a, b = a[:, :n], b[:, :n]
    got = linalg.stacked_nullspace([a, b], n, 3)
    want = linalg.nullspace(np.vstack([a, b]), n, 3)
    assert np.array_equal(got, want)


def test_stacked_nullspace_edge_cases():
    assert np.array_equal(linalg.stacked_nullspace([], 3, 5), np.eye(3, dtype=np.int64))
    assert linalg.stacked_nullspace([np.eye(3, dtype=np.int64)], 3, 5).shape == (0, 3)
    empty = np.zeros((0, 2), dtype=np.int64)
    assert np.array_equal(linalg.stacked_nullspace([empty, [[1, 1]]], 2, 3), [[1, 2]])


@settings(max_examples=100, deadline=None)
@given(matrices(p=5))
def test_span_builder_rank(pm):
    p, a = pm
    sb = linalg.SpanBuilder(p)
    for row in a:
        sb.add({j: int(c) for j, c in enumerate(row)})
    assert len(sb) == linalg.rank(a, a.shape[1], p)
    for row in a:
        assert sb.contains({j: int(c) for j, c in enumerate(row)})
