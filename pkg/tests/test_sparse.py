import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirgnn.errors import ShapeMismatchError
from dirgnn.sparse import (SparseMatrix, read_coo_csv, spgemm, spmm,
                           write_coo_csv)


def random_sparse(rng, rows, cols, density=0.3):
    mask = rng.random((rows, cols)) < density
    r, c = np.nonzero(mask)
    vals = rng.standard_normal(len(r))
    return SparseMatrix.from_coo(r, c, vals, (rows, cols))


coo_strategy = st.tuples(
    st.integers(1, 8), st.integers(1, 8), st.integers(0, 20), st.integers(0, 2**31 - 1))


def build_case(case):
    rows, cols, nnz, seed = case
    rng = np.random.default_rng(seed)
    r = rng.integers(0, rows, nnz)
    c = rng.integers(0, cols, nnz)
    v = rng.standard_normal(nnz)
    return SparseMatrix.from_coo(r, c, v, (rows, cols)), r, c, v


def csr_invariants(m: SparseMatrix):
    assert m.indptr[0] == 0 and m.indptr[-1] == len(m.indices)
    assert np.all(np.diff(m.indptr) >= 0)
    for i in range(m.shape[0]):
        row = m.indices[m.indptr[i]:m.indptr[i + 1]]
        assert np.all(np.diff(row) > 0)  # sorted, no duplicates
    assert not np.any(m.data == 0.0)  # no explicit zeros stored


@given(coo_strategy)
def test_from_coo_canonical_and_dense_agree(case):
    m, r, c, v = build_case(case)
    csr_invariants(m)
    dense = np.zeros(m.shape)
    np.add.at(dense, (r, c), v)  # duplicate coordinates must sum
    assert np.allclose(m.to_dense(), dense, atol=1e-12)


@given(coo_strategy)
def test_transpose_matches_dense(case):
    m, *_ = build_case(case)
    t = m.transpose()
    csr_invariants(t)
    assert np.array_equal(t.to_dense(), m.to_dense().T)
    assert t.transpose() is m  # cached reciprocal


def test_from_coo_binary_collapses_duplicates():
    m = SparseMatrix.from_coo([0, 0, 1], [1, 1, 0], [2.0, 3.0, 4.0], (2, 2),
                              binary=True)
    assert np.array_equal(m.to_dense(), [[0.0, 1.0], [1.0, 0.0]])


def test_identity_zeros_nnz():
    eye = SparseMatrix.identity(4)
    assert np.array_equal(eye.to_dense(), np.eye(4))
    z = SparseMatrix.zeros((3, 2))
    assert z.nnz == 0 and z.to_dense().shape == (3, 2)


def test_row_ids_row_sums():
    m = SparseMatrix.from_coo([0, 0, 2], [1, 2, 0], [1.0, 2.0, -1.0], (3, 3))
    assert m.row_ids().tolist() == [0, 0, 2]
    assert m.row_sums().tolist() == [3.0, 0.0, -1.0]


def test_add_scale(rng):
    a = random_sparse(rng, 6, 5)
    b = random_sparse(rng, 6, 5)
    assert np.allclose(a.add(b).to_dense(), a.to_dense() + b.to_dense())
    assert np.allclose(a.scale(-2.0).to_dense(), -2.0 * a.to_dense())
    with pytest.raises(ShapeMismatchError):
        a.add(random_sparse(rng, 5, 5))


def test_add_cancellation_drops_zeros(rng):
    a = random_sparse(rng, 6, 5)
    s = a.add(a.scale(-1.0))
    assert s.nnz == 0


def test_matvec(rng):
    a = random_sparse(rng, 7, 4)
    x = rng.standard_normal(4)
    assert np.allclose(a.matvec(x), a.to_dense() @ x)


@settings(max_examples=60)
@given(st.integers(1, 16), st.integers(1, 16), st.integers(1, 16),
       st.integers(0, 2**31 - 1), st.floats(0.0, 0.6))
def test_spgemm_matches_dense(n, k, m, seed, density):
    rng = np.random.default_rng(seed)
    a = random_sparse(rng, n, k, density)
    b = random_sparse(rng, k, m, density)
    prod = spgemm(a, b)
    csr_invariants(prod)
    assert np.allclose(prod.to_dense(), a.to_dense() @ b.to_dense(), atol=1e-10)


def test_spgemm_chunked_path_matches_dense(rng, monkeypatch):
    # force the block splitter through several chunks
    import dirgnn.sparse as sp
    monkeypatch.setattr(sp, "_SPGEMM_BLOCK_BUDGET", 64)
    a = random_sparse(rng, 30, 30, 0.3)
    b = random_sparse(rng, 30, 30, 0.3)
    prod = sp.spgemm(a, b)
    csr_invariants(prod)
    assert np.allclose(prod.to_dense(), a.to_dense() @ b.to_dense(), atol=1e-10)


def test_spgemm_shape_mismatch(rng):
    with pytest.raises(ShapeMismatchError):
        spgemm(random_sparse(rng, 3, 4), random_sparse(rng, 3, 4))


def test_spmm_matches_dense(rng):
    a = random_sparse(rng, 9, 6)
    x = rng.standard_normal((6, 3))
    assert np.allclose(spmm(a, x), a.to_dense() @ x, atol=1e-12)


def test_matmul_operator_dispatch(rng):
    a = random_sparse(rng, 5, 5)
    b = random_sparse(rng, 5, 5)
    x = rng.standard_normal((5, 2))
    assert np.allclose((a @ b).to_dense(), a.to_dense() @ b.to_dense())
    assert np.allclose(a @ x, a.to_dense() @ x)


def test_allclose(rng):
    a = random_sparse(rng, 5, 5)
    assert a.allclose(a)
    assert not a.allclose(a.scale(1.0 + 1e-6))
    assert a.allclose(a.scale(1.0 + 1e-12), tol=1e-10)


def test_coo_csv_round_trip(tmp_path, rng):
    a = random_sparse(rng, 8, 5)
    p = tmp_path / "mat.csv"
    write_coo_csv(p, a)
    b = read_coo_csv(p, (8, 5))
    assert a.allclose(b)
    assert p.read_text().splitlines()[0] == "row,col,value"
