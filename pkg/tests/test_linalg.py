import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from mct.linalg import (
    PAULI_X,
    PAULI_Z,
    Isometry,
    MatrixTuple,
    ToleranceConfig,
    compress,
    complete_to_unitary,
    direct_sum,
    kron,
    op_norm,
    psd_sqrt,
    random_contraction,
    random_hermitian,
    residual_norm,
    unitary_residual,
)

from conftest import assert_close, seeds


@pytest.mark.parametrize("M, expected", [
    ([[0, 1], [0, 0]], 1.0),
    (np.eye(4), 1.0),
    ([[1, 1], [1, 1]], 2.0),
])
def test_op_norm_examples(M, expected):
    assert op_norm(np.array(M, dtype=complex)) == pytest.approx(expected, rel=1e-12)


def test_op_norm_sparse_matches_dense(rng):
    A = random_hermitian(40, rng)
    assert op_norm(sp.csr_matrix(A)) == pytest.approx(op_norm(A), rel=1e-10)


def test_residual_norm_is_exact_for_small_and_upper_bound_for_large(rng):
    A = random_hermitian(8, rng)
    assert residual_norm(A) == pytest.approx(op_norm(A))
    B = sp.random(600, 600, density=0.01, random_state=1, format="csr")
    assert residual_norm(B) >= op_norm(B.toarray()) - 1e-12


@pytest.mark.parametrize("M, R", [
    (np.diag([4.0, 9.0]), np.diag([2.0, 3.0])),
    (np.ones((2, 2)), np.ones((2, 2)) / np.sqrt(2)),
    (np.zeros((3, 3)), np.zeros((3, 3))),
])
def test_psd_sqrt_examples(M, R):
    assert_close(psd_sqrt(M), R, 1e-12)


def test_psd_sqrt_rejects_bad_input():
    with pytest.raises(ValueError):
        psd_sqrt(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        psd_sqrt(np.diag([1.0, -1.0]))


def test_psd_sqrt_clips_tiny_negative_eigenvalues():
    R = psd_sqrt(np.diag([1.0, -1e-9]))
    assert_close(R, np.diag([1.0, 0.0]), 1e-12)


@given(seeds, st.integers(1, 8))
def test_psd_sqrt_of_clipped_random_hermitian(seed, n):
    rng = np.random.default_rng(seed)
    M = random_hermitian(n, rng) * rng.uniform(0.1, 10)
    w, U = np.linalg.eigh(M)
    Mp = (U * np.clip(w, 0, None)) @ U.conj().T
    R = psd_sqrt(Mp)
    assert op_norm(R @ R - Mp) <= 1e-8 * (1 + op_norm(M))
    assert op_norm(R - R.conj().T) <= 1e-12


def test_kron_examples():
    K = kron(PAULI_Z, PAULI_X)
    assert_close(K[:2, :2], PAULI_X)
    assert_close(K[2:, 2:], -PAULI_X)
    B = np.arange(9.0).reshape(3, 3)
    assert_close(kron(np.eye(1), B), B)


@given(seeds)
def test_kron_entry_formula_and_norm(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    B = rng.normal(size=(3, 2))
    K = kron(A, B)
    i, j, k, l = rng.integers(2), rng.integers(3), rng.integers(3), rng.integers(2)
    assert K[i * 3 + k, j * 2 + l] == pytest.approx(A[i, j] * B[k, l])
    assert op_norm(K) == pytest.approx(op_norm(A) * op_norm(B), rel=1e-8)


def test_compress_examples():
    V = Isometry.first_block(2, 1)
    out = compress(V, MatrixTuple([np.array([[1, 2], [3, 4]])]))
    assert_close(out[0], [[1]])
    N = MatrixTuple([PAULI_X, PAULI_Z])
    same = compress(Isometry(np.eye(2)), N)
    for a, b in zip(same, N):
        assert_close(a, b)


@given(seeds, st.integers(1, 4), st.integers(0, 4))
def test_compress_is_contractive(seed, n, extra):
    rng = np.random.default_rng(seed)
    U = complete_to_unitary(np.linalg.qr(rng.normal(size=(n + extra, n)))[0])
    V = U[:, :n]
    M = rng.normal(size=(n + extra, n + extra)) + 1j * rng.normal(size=(n + extra, n + extra))
    out = compress(Isometry(V), MatrixTuple([M]))[0]
    assert op_norm(out) <= op_norm(M) + 1e-10


def test_isometry_rejects_non_isometry():
    with pytest.raises(ValueError):
        Isometry(np.array([[2.0], [0.0]]))


def test_matrix_tuple_validates_shapes():
    with pytest.raises(ValueError):
        MatrixTuple([np.eye(2), np.eye(3)])
    with pytest.raises(ValueError):
        MatrixTuple([np.array([[np.nan]])])


def test_complete_to_unitary_and_direct_sum(rng):
    V = np.linalg.qr(rng.normal(size=(5, 2)))[0]
    U = complete_to_unitary(V)
    assert unitary_residual(U) <= 1e-12
    assert_close(U[:, :2], V, 1e-12)
    D = direct_sum(np.eye(1), 2 * np.eye(2))
    assert_close(D, np.diag([1, 2, 2]))


def test_random_contraction_norm(rng):
    assert op_norm(random_contraction(4, rng, 0.7)) == pytest.approx(0.7)


def test_tolerance_config_defaults():
    t = ToleranceConfig()
    assert (t.abs_tol, t.rel_tol, t.eig_tol, t.seed) == (1e-9, 1e-9, 1e-7, 0)
    with pytest.raises(ValueError):
        ToleranceConfig(abs_tol=-1)
