import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from mct.anticommuting import (
    MAX_DIM,
    anticommuting_dilation,
    clifford_generators,
    cube_ball_certificate,
    symmetry_normalize,
    try_cube_ball,
    wmax_ball_sample,
)
from mct.bodies import ConvexBody as C
from mct.dilations import halmos_matrix
from mct.linalg import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    MatrixTuple,
    kron_power,
    max_anticommutator,
    op_norm,
    random_hermitian,
    residual_norm,
)
from mct.matrix_convex import wmax_membership

from conftest import assert_close, seeds


# generators ----------------------------------------------------------------------------

def test_clifford_examples():
    assert_close(clifford_generators(1).F[0], [[1]])
    F = clifford_generators(2).F
    assert_close(F[0], PAULI_Z)
    assert_close(F[1], PAULI_X)
    F = clifford_generators(3).F
    for M, E in zip(F, [np.kron(PAULI_Z, PAULI_Z), np.kron(PAULI_X, PAULI_Z),
                        np.kron(np.eye(2), PAULI_X)]):
        assert_close(M, E)
    assert max(clifford_generators(3).residuals().values()) <= 1e-14


@pytest.mark.parametrize("d", [0, 15])
def test_clifford_range(d):
    with pytest.raises(ValueError):
        clifford_generators(d)


def test_clifford_sparse_beyond_dense_cap():
    F = clifford_generators(12).F
    assert F.is_sparse and F.n == 2 ** 11
    assert max(clifford_generators(12).residuals().values()) == 0.0


# anticommuting dilation ------------------------------------------------------------------

def test_d1_is_unchanged(rng):
    X = random_hermitian(3, rng, 0.7)
    cert = anticommuting_dilation([X], [1])
    assert_close(cert.dilation[0], X)


def test_d2_scalar_example():
    cert = anticommuting_dilation([np.eye(1), np.eye(1)], [np.sqrt(2)] * 2)
    I = np.eye(2)
    A1 = np.block([[PAULI_Z, I], [I, -PAULI_Z]])
    A2 = np.block([[PAULI_Z, -I], [-I, -PAULI_Z]])
    assert_close(cert.dilation[0], A1, 1e-12)
    assert_close(cert.dilation[1], A2, 1e-12)
    for A in cert.dilation:
        assert op_norm(A) == pytest.approx(np.sqrt(2))
        assert A[0, 0] == pytest.approx(1)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_norm_bound_is_tight_on_scalar_ones(d):
    cert = anticommuting_dilation([np.eye(1)] * d, [np.sqrt(d)] * d)
    assert max(op_norm(A) for A in cert.dilation) == pytest.approx(np.sqrt(d), abs=1e-10)


def test_d3_random_pairs(rng):
    X = [random_hermitian(2, rng, rng.uniform(0, 1)) for _ in range(3)]
    cert = anticommuting_dilation(X, [np.sqrt(3)] * 3)
    assert cert.dilation.n == 32
    assert cert.verified(1e-8)


def test_witness_propagation_for_pauli_pair():
    W = PAULI_Y
    cert = anticommuting_dilation([PAULI_Z, PAULI_X], [np.sqrt(2)] * 2, witnesses=[W])
    lifted = np.kron(kron_power(PAULI_Z, 2), W)
    for A in cert.dilation:
        assert op_norm(lifted @ A + A @ lifted) <= 1e-12
    assert cert.claim("witness_anticommutes").holds


def test_bad_witness_is_rejected():
    with pytest.raises(ValueError):
        anticommuting_dilation([PAULI_Z, PAULI_X], [2, 2], witnesses=[PAULI_Z])


def test_anticommuting_premises():
    with pytest.raises(ValueError):
        anticommuting_dilation([np.eye(1), np.eye(1)], [1.2, 1.2])
    with pytest.raises(ValueError):
        anticommuting_dilation([2 * np.eye(1), np.eye(1)], [2, 2])
    with pytest.raises(ValueError):
        anticommuting_dilation([np.array([[0, 1], [0, 0]])] * 2, [2, 2])
    with pytest.raises(ValueError):
        anticommuting_dilation([0.1 * np.eye(2)] * 7, [3] * 7)


def _word_span(Y):
    I = np.eye(Y[0].shape[0])
    words = [I] + list(Y) + [a @ b for a in Y for b in Y]
    return np.array([w.ravel() for w in words]).T


@given(seeds, st.integers(1, 3))
def test_block_entries_are_short_words_in_halmos_blocks(seed, n):
    rng = np.random.default_rng(seed)
    X = [random_hermitian(n, rng, rng.uniform(0.1, 1)) for _ in range(2)]
    cert = anticommuting_dilation(X, [np.sqrt(2)] * 2)
    Y = [halmos_matrix(x) for x in X]
    B = _word_span(Y)
    Bri = np.vstack([B.real, B.imag])
    m = 2 * n
    for A in cert.dilation:
        for i in range(2):
            for j in range(2):
                blk = A[i * m:(i + 1) * m, j * m:(j + 1) * m].ravel()
                target = np.concatenate([blk.real, blk.imag])
                coef = np.linalg.lstsq(Bri, target, rcond=None)[0]
                assert np.abs(Bri @ coef - target).max() <= 1e-10


@given(seeds, st.integers(2, 4), st.integers(1, 2))
def test_random_anticommuting_dilation_claims(seed, d, n):
    rng = np.random.default_rng(seed)
    X = [random_hermitian(n, rng, rng.uniform(0, 1)) for _ in range(d)]
    w = rng.dirichlet(np.ones(d))
    a = 1 / np.sqrt(w * rng.uniform(0.5, 1))
    cert = anticommuting_dilation(X, a)
    assert cert.dilation.n == n * 4 ** (d - 1)
    assert cert.verified(1e-8)


# symmetrization -------------------------------------------------------------------------

def test_symmetrize_d1_example():
    cert = symmetry_normalize([np.zeros((1, 1))], [1])
    assert_close(cert.dilation[0].toarray(), [[0, 1], [1, 0]])


def test_symmetrize_keeps_symmetries():
    cert = symmetry_normalize([PAULI_Z, PAULI_X], [1, 1])
    M = [m.toarray() for m in cert.dilation]
    # square-root blocks vanish: the top-left copy reproduces the input
    assert_close(M[0][:2, :2], PAULI_Z)
    assert_close(M[1][:2, :2], PAULI_X)
    assert cert.verified()


def test_symmetrize_output_of_d2_example():
    ac = anticommuting_dilation([np.eye(1), np.eye(1)], [np.sqrt(2)] * 2)
    cert = symmetry_normalize(ac.dilation, [np.sqrt(2)] * 2)
    I = sp.identity(cert.dilation.n)
    for M in cert.dilation:
        assert residual_norm(M @ M - 2 * I) <= 1e-12
    assert max_anticommutator(cert.dilation.matrices) <= 1e-12


@given(seeds, st.integers(1, 3))
def test_symmetrize_witness_lifts_to_signed_copy(seed, d):
    rng = np.random.default_rng(seed)
    t = rng.uniform(-1, 1, size=d)
    A = [tj * f for tj, f in zip(t, clifford_generators(3).F.matrices[:d])]
    W = np.kron(PAULI_Y, PAULI_Z)
    cert = symmetry_normalize(A, [1] * d, witnesses=[W])
    lifted = sp.kron(sp.csr_matrix(kron_power(PAULI_Z, d)), sp.csr_matrix(W))
    for M in cert.dilation:
        assert residual_norm(lifted @ M + M @ lifted) <= 1e-12
    assert cert.claim("witness_anticommutes").holds


def test_symmetrize_premises():
    with pytest.raises(ValueError):
        symmetry_normalize([PAULI_Z, PAULI_Z], [1, 1])
    with pytest.raises(ValueError):
        symmetry_normalize([2 * PAULI_Z], [1])


# cube in ball -------------------------------------------------------------------------------

def test_cube_ball_examples():
    cert = cube_ball_certificate([np.array([[0.5]])], [1])
    assert_close(cert.dilation[0].toarray()[:2, :2], halmos_matrix(np.array([[0.5]])))
    cert = cube_ball_certificate([0.6 * np.eye(1), 0.8 * np.eye(1)], [0.6, 0.8])
    assert cert.conclusion == "X in W(F[d]) certified"
    assert wmax_membership(MatrixTuple([0.6 * np.eye(1), 0.8 * np.eye(1)]), C.ball(2)).is_member
    cert = cube_ball_certificate([0.6 * PAULI_Z, 0.8 * PAULI_X], [0.6, 0.8])
    assert cert.max_residual <= 1e-9


def test_cube_ball_premises():
    with pytest.raises(ValueError):
        cube_ball_certificate([np.eye(1), np.eye(1)], [0.8, 0.8])
    with pytest.raises(ValueError):
        cube_ball_certificate([np.eye(1)], [0.5])


@given(seeds, st.integers(2, 3))
def test_cube_ball_random(seed, d):
    rng = np.random.default_rng(seed)
    c = np.sqrt(rng.dirichlet(np.ones(d)))
    X = [random_hermitian(1 + d % 2, rng, ci * rng.uniform(0, 1)) for ci in c]
    cert = cube_ball_certificate(X, c)
    assert cert.verified(1e-8)
    for L in cert.dilation:
        assert residual_norm(L @ L - sp.identity(L.shape[0])) <= 1e-8


def test_guardrail_limits_output_size():
    assert MAX_DIM == 4096
    with pytest.raises(ValueError):
        cube_ball_certificate([0.1 * np.eye(5)] * 4, [0.5] * 4)


def test_ball_sample_experiment(rng):
    X = wmax_ball_sample(2, 2, rng)
    assert wmax_membership(X, C.ball(2)).is_member
    cert = try_cube_ball(MatrixTuple([0.5 * PAULI_Z, 0.5 * PAULI_X]))
    assert cert is not None and cert.verified()
    assert try_cube_ball(MatrixTuple([PAULI_Z, PAULI_X])) is None
