from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from pdc_ldpc import (
    SparseBitMatrix,
    StructureError,
    circulant_form,
    conv_window,
    rank_gf2,
    read_alist,
    syndrome_former,
    tail_biting_matrix,
    uniform_design,
    write_alist,
)
from pdc_ldpc.matrix import gf2_systematic

from conftest import DATA, cycle_free_designs, raw_designs


def dense_rank_gf2(m):
    """Plain dense Gaussian elimination, kept separate from the library's bitmask version."""
    m = np.array(m, dtype=np.uint8) % 2
    rank = 0
    for c in range(m.shape[1]):
        hits = np.flatnonzero(m[rank:, c])
        if not len(hits):
            continue
        p = rank + hits[0]
        m[[rank, p]] = m[[p, rank]]
        below = np.flatnonzero(m[:, c])
        below = below[below != rank]
        m[below] ^= m[rank]
        rank += 1
        if rank == m.shape[0]:
            break
    return rank


def golden_hs():
    lines = (DATA / "uniform_a4_w4_hs.txt").read_text().split()
    return np.array([[int(ch) for ch in line] for line in lines], dtype=np.uint8)


def test_uniform_a4_w4_syndrome_former_golden():
    hs = syndrome_former(uniform_design(4, 4)).hs
    expected = golden_hs()
    assert hs.shape == (4, 38)
    assert hs.sum() == 16
    np.testing.assert_array_equal(hs, expected)
    assert list(np.flatnonzero(hs[0]) + 1) == [1, 8, 10, 38]


@pytest.mark.parametrize("w,vs", [(3, 256), (4, 624)])
def test_constraint_length_a8(w, vs):
    sf = syndrome_former(uniform_design(8, w))
    assert sf.vs == vs
    assert sf.ms == sf.lh - 1


@given(raw_designs())
def test_syndrome_former_structure(design):
    sf = syndrome_former(design)
    assert sf.lh == 1 + max(sum(col) for col in design.diffs)
    assert sf.row_vector(0).tolist() == [1] * design.a
    assert (sf.hs.sum(axis=1) == design.w).all()
    for i in range(design.a):
        assert tuple(np.flatnonzero(sf.hs[i])) == design.positions(i)


def test_syndrome_former_is_read_only(short_w2):
    with pytest.raises(ValueError):
        syndrome_former(short_w2).hs[0, 0] = 0


def test_conv_window_small_cases(aliased_w3):
    one = conv_window(aliased_w3, 1)
    assert one.to_dense().tolist() == [[1, 1, 1]]
    sf = syndrome_former(aliased_w3)
    first_block = conv_window(aliased_w3, sf.lh).to_dense()[:, : aliased_w3.a]
    np.testing.assert_array_equal(first_block, sf.hs.T)
    with pytest.raises(ValueError):
        conv_window(aliased_w3, 0)


def test_conv_window_uniform_a4_w4_no_shared_row_pairs():
    h = conv_window(uniform_design(4, 4), 60)
    cols = [set(c) for c in h.columns]
    assert all(len(x & y) <= 1 for x, y in combinations(cols, 2))


@given(cycle_free_designs(max_a=6), st.integers(1, 80))
def test_conv_window_full_row_rank(design, n):
    assert rank_gf2(conv_window(design, n)) == n


@given(raw_designs(max_a=4, max_w=4, max_diff=9), st.integers(0, 30))
def test_tail_biting_weights(design, extra):
    n = design.lh + extra
    h = tail_biting_matrix(design, n)
    assert h.shape == (n, n * design.a)
    assert (h.column_weights() == design.w).all()
    assert h.nnz == n * design.a * design.w
    assert h.is_shift_invariant(1, design.a)


def test_tail_biting_rejects_short_length(short_w2):
    with pytest.raises(ValueError):
        tail_biting_matrix(short_w2, short_w2.lh - 1)


def test_circulant_form_uniform_a4_w2():
    design = uniform_design(4, 2)
    h = tail_biting_matrix(design, 16)
    assert h.shape == (16, 64)
    blocks, perm = circulant_form(h, 4)
    assert len(blocks) == 4
    for i, block in enumerate(blocks):
        assert block.shape == (16, 16)
        assert (block.sum(axis=0) == 2).all() and (block.sum(axis=1) == 2).all()
        for r in range(15):
            np.testing.assert_array_equal(block[r + 1], np.roll(block[r], 1))
        assert tuple(np.flatnonzero(block[:, 0])) == tuple(sorted(p % 16 for p in design.positions(i)))
    np.testing.assert_array_equal(np.hstack(blocks), h.to_dense()[:, perm])


@given(raw_designs(max_a=4, max_w=3, max_diff=9), st.integers(0, 10))
def test_circulant_form_round_trip(design, extra):
    h = tail_biting_matrix(design, design.lh + extra)
    blocks, perm = circulant_form(h, design.a)
    assert sorted(perm) == list(range(h.cols))
    inverse = np.argsort(perm)
    np.testing.assert_array_equal(np.hstack(blocks)[:, inverse], h.to_dense())


def test_circulant_form_rejects_windows(short_w2):
    with pytest.raises(StructureError):
        circulant_form(conv_window(short_w2, 8), 4)
    with pytest.raises(StructureError):
        circulant_form(tail_biting_matrix(short_w2, 8), 3)


def test_rank_trivial_cases():
    assert rank_gf2(np.zeros((4, 7), dtype=np.uint8)) == 0
    assert rank_gf2(np.eye(5, dtype=np.uint8)) == 5
    assert rank_gf2(SparseBitMatrix(3, 3, ((0, 1), (1, 2), (0, 2)))) == 2


@given(arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 70)), elements=st.integers(0, 1)))
def test_rank_matches_dense_oracle(m):
    assert rank_gf2(m) == dense_rank_gf2(m)
    assert rank_gf2(SparseBitMatrix.from_dense(m)) == dense_rank_gf2(m)


@given(arrays(np.uint8, st.tuples(st.integers(1, 10), st.integers(1, 20)), elements=st.integers(0, 1)))
def test_systematic_form_spans_null_space(m):
    reduced, pivots, info = gf2_systematic(m)
    assert len(pivots) + len(info) == m.shape[1]
    for j in info:
        word = np.zeros(m.shape[1], dtype=np.uint8)
        word[j] = 1
        for row, p in zip(reduced, pivots):
            word[p] = row >> j & 1
        assert not (m.astype(np.int64) @ word % 2).any()


def test_alist_round_trip(tmp_path, aliased_w3):
    h = tail_biting_matrix(aliased_w3, 20)
    path = tmp_path / "h.alist"
    write_alist(h, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "20 60"
    assert [int(x) - 1 for x in lines[1].split()] == list(h.ones[0])
    assert read_alist(path) == h


def test_alist_rejects_garbage(tmp_path):
    path = tmp_path / "bad.alist"
    path.write_text("two three\n")
    with pytest.raises(ValueError):
        read_alist(path)
    path.write_text("")
    with pytest.raises(ValueError):
        read_alist(path)


def test_sparse_matrix_basics():
    dense = np.array([[1, 0, 1, 0], [0, 1, 1, 1]], dtype=np.uint8)
    h = SparseBitMatrix.from_dense(dense)
    np.testing.assert_array_equal(h.to_dense(), dense)
    assert h.columns == ((0,), (1,), (0, 1), (1,))
    assert h.syndrome([1, 1, 0, 0]).tolist() == [1, 1]
    assert h.syndrome([1, 0, 1, 1]).tolist() == [0, 0]
    swapped = h.permute_columns([3, 2, 1, 0])
    np.testing.assert_array_equal(swapped.to_dense(), dense[:, ::-1])
    with pytest.raises(ValueError):
        h.permute_columns([0, 0, 1, 2])
    with pytest.raises(ValueError):
        h.syndrome([1, 0])
    with pytest.raises(ValueError):
        SparseBitMatrix(1, 2, ((0, 2),))
