import numpy as np
import pytest
from hypothesis import given, strategies as st

from mct.bodies import BodyError, ConvexBody as C, ScaleVector, member, scaled
from mct.certificates import (
    CertificateError,
    DilationCertificate,
    certificate_from_json,
    certificate_to_json,
)
from mct.dilations import (
    averaged_unitaries,
    contraction_normal_dilation,
    halmos,
    halmos_matrix,
    orthogonal_family_dilation,
    positive_scaling_dilation,
    q_family,
    remark_witness,
    sd_projection_dilation,
    symmetric_sd_dilation,
)
from mct.io import FormatError
from mct.linalg import (
    PAULI_X,
    PAULI_Z,
    Isometry,
    MatrixTuple,
    commuting_normal_residual,
    op_norm,
    random_contraction,
    random_hermitian,
    random_unitary,
    unitary_residual,
)
from mct.matrix_convex import joint_spectrum, spectrum_points

from conftest import assert_close, seeds

E12 = np.array([[0, 1], [0, 0]], dtype=complex)


def harmonic_scales(rng, d):
    w = rng.dirichlet(np.ones(d)) * rng.uniform(0.5, 1.0)
    return 1 / w


# Halmos -------------------------------------------------------------------------------

@pytest.mark.parametrize("x, U", [
    (0.0, [[0, 1], [1, 0]]),
    (1.0, [[1, 0], [0, -1]]),
    (0.5, [[0.5, np.sqrt(3) / 2], [np.sqrt(3) / 2, -0.5]]),
])
def test_halmos_scalar_examples(x, U):
    assert_close(halmos_matrix(np.array([[x]])), U, 1e-15)


@given(seeds, st.integers(1, 5), st.floats(0.1, 5))
def test_halmos_is_scaled_unitary_dilation(seed, n, b):
    rng = np.random.default_rng(seed)
    X = random_contraction(n, rng, b * rng.uniform(0, 1))
    cert = halmos(X, b)
    U = cert.dilation[0]
    assert unitary_residual(U / b) <= 1e-10
    assert_close(U[:n, :n], X, 1e-14)
    assert cert.verified()


def test_halmos_of_hermitian_is_symmetry(rng):
    X = random_hermitian(4, rng, 0.9)
    U = halmos_matrix(X, 1.0)
    assert op_norm(U - U.conj().T) <= 1e-14
    assert op_norm(U @ U - np.eye(8)) <= 1e-13


def test_halmos_rejects_large_input():
    with pytest.raises(ValueError):
        halmos_matrix(np.array([[1.5]]), 1.0)


# Q-family ---------------------------------------------------------------------------------

def test_q_family_examples():
    assert_close(q_family([1]).Q[0], [[1]])
    Q = q_family([2, 2]).Q
    assert_close(Q[0], [[1, 1], [1, 1]], 1e-14)
    assert_close(Q[1], [[1, -1], [-1, 1]], 1e-14)
    res = q_family([3, 3, 3]).residuals()
    assert max(res.values()) <= 1e-12


def test_q_family_shrinks_slack_scales():
    fam = q_family([4, 4])
    assert fam.scales.harmonic_sum == pytest.approx(1)
    with pytest.raises(ValueError):
        q_family([4, 4], shrink=False)
    with pytest.raises(ValueError):
        q_family([1.5, 1.5])


@given(seeds, st.integers(1, 6))
def test_q_family_invariants(seed, d):
    rng = np.random.default_rng(seed)
    fam = q_family(harmonic_scales(rng, d))
    assert max(fam.residuals().values()) <= 1e-10
    assert op_norm(sum(q / a for q, a in zip(fam.Q, fam.scales)) - np.eye(d)) <= 1e-10


# orthogonal family / positive scaling ---------------------------------------------------

def test_orthogonal_family_examples():
    cert = orthogonal_family_dilation([PAULI_Z], [1])
    assert_close(cert.dilation[0], PAULI_Z)
    cert = orthogonal_family_dilation([PAULI_Z, PAULI_X], [2, 2])
    M1, M2 = cert.dilation
    assert op_norm(M1 @ M2) <= 1e-12
    assert op_norm(M1) == pytest.approx(2) and op_norm(M2) == pytest.approx(2)
    assert cert.verified()


def test_positive_scaling_examples():
    K = C.box([(0, 1)])
    one = np.eye(1)
    cert = positive_scaling_dilation([[one]], [K], [1])
    assert_close(cert.dilation[0], one)
    cert = positive_scaling_dilation([[one], [one]], [K, K], [2, 2])
    assert sorted(map(tuple, spectrum_points(cert.dilation).round(9))) == [(0, 2), (2, 0)]
    I1 = C.cube(1)
    cert = positive_scaling_dilation([[PAULI_Z], [PAULI_X]], [I1, I1], [2, 2])
    assert cert.max_residual <= 1e-10


def test_positive_scaling_needs_zero_in_body():
    with pytest.raises(BodyError):
        positive_scaling_dilation([[np.eye(1)]], [C.box([(1, 2)])], [1])


@given(seeds, st.integers(1, 3))
def test_positive_scaling_random_groups(seed, g):
    rng = np.random.default_rng(seed)
    n = 3
    U = random_unitary(n, rng)
    tuples, bodies = [], []
    for _ in range(g):
        lam = rng.dirichlet(np.ones(3), size=n)[:, :2]
        tuples.append([U @ np.diag(lam[:, j]) @ U.conj().T for j in range(2)])
        bodies.append(C.simplex(2))
        U = random_unitary(n, rng)
    cert = positive_scaling_dilation(tuples, bodies, harmonic_scales(rng, g))
    assert cert.verified()


# SD projection dilations ---------------------------------------------------------------------

def test_sd_projection_examples():
    cert = sd_projection_dilation([[np.array([[0.5]])]], [1])
    assert sorted(np.linalg.eigvalsh(cert.dilation[0]).round(12)) == [0, 1]
    cert = sd_projection_dilation([[np.array([[0.5]])], [np.array([[0.5]])]], [2, 2])
    assert cert.max_residual <= 1e-10
    P1 = np.diag([1.0, 0.0])
    cert = sd_projection_dilation([[P1, np.eye(2) - P1]], [1])
    assert cert.dilation.n == 2
    assert_close(cert.dilation[0], P1)


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_sd_projection_claims(seed, g, n):
    rng = np.random.default_rng(seed)
    groups = []
    for _ in range(g):
        k = int(rng.integers(1, 4))
        P = []
        for _ in range(k):
            A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            P.append(A @ A.conj().T)
        s = op_norm(sum(P)) * rng.uniform(1, 1.5)
        groups.append([p / s for p in P])
    cert = sd_projection_dilation(groups, harmonic_scales(rng, g))
    names = {c.name for c in cert.claims}
    assert {"eigenvalues_in", "commuting", "annihilating", "finite_dimension"} <= names
    assert cert.verified(1e-9)


# symmetric SD ---------------------------------------------------------------------------------

def test_symmetric_sd_examples():
    I1 = C.cube(1)
    cert = symmetric_sd_dilation([[PAULI_Z], [PAULI_X]], [I1, I1], [2, 2])
    assert cert.verified()
    for M in cert.dilation:
        assert np.abs(np.linalg.eigvalsh(M)).max() <= 2 + 1e-9
    N = [np.diag([0.5, -1.0])]
    cert = symmetric_sd_dilation([N], [I1], [1])
    assert cert.dilation.n == 2
    assert_close(cert.dilation[0], N[0], 1e-12)


def test_symmetric_sd_diamond_groups():
    D = C.diamond(2)
    g1 = [np.diag([0.5, -0.2, 0.0]), np.diag([0.5, 0.3, -1.0])]
    g2 = [np.diag([0.1, 0.0, 0.9]), np.diag([-0.9, 0.4, 0.1])]
    cert = symmetric_sd_dilation([g1, g2], [D, D], [2, 2])
    target = C.v_polytope(np.array([[x, y] for x in (-2, 2) for y in (0,)] + [[0, 2], [0, -2]]))
    for p in spectrum_points(cert.dilation):
        assert member(target, p[:2], 1e-8) and member(target, p[2:], 1e-8)


def test_symmetric_sd_rejects_asymmetric_body():
    with pytest.raises(BodyError):
        symmetric_sd_dilation([[np.diag([0.5, 0.1])]], [C.box([(0, 1)])], [1])


@given(seeds, st.integers(1, 3))
def test_symmetric_sd_spectrum_in_scaled_product(seed, g):
    rng = np.random.default_rng(seed)
    n = 3
    tuples, bodies = [], []
    for _ in range(g):
        U = random_unitary(n, rng)
        lam = rng.uniform(-1, 1, size=(n, 2))
        tuples.append([U @ np.diag(lam[:, j]) @ U.conj().T for j in range(2)])
        bodies.append(C.cube(2))
    a = harmonic_scales(rng, g)
    cert = symmetric_sd_dilation(tuples, bodies, a)
    pts = spectrum_points(cert.dilation)
    for i, ai in enumerate(a):
        K = scaled(C.cube(2), ai)
        assert all(member(K, p[2 * i:2 * i + 2], 1e-8) for p in pts)
    assert cert.verified()


# contraction pipeline -------------------------------------------------------------------------

def test_contraction_pipeline_d1():
    cert = contraction_normal_dilation([np.zeros((1, 1))])
    assert_close(cert.dilation[0], [[0, 1], [1, 0]])
    assert cert.certified_scale == 1.0


def test_contraction_pipeline_remark_pair():
    cert = contraction_normal_dilation([E12, E12.T.copy()])
    assert cert.verified(1e-9)
    assert max(op_norm(N) for N in cert.dilation) <= 4 + 1e-9
    assert remark_witness() == pytest.approx(2.0, abs=1e-12)


@given(seeds, st.integers(2, 3), st.integers(1, 4))
def test_contraction_pipeline_random(seed, d, n):
    rng = np.random.default_rng(seed)
    T = [random_contraction(n, rng, rng.uniform(0, 1)) for _ in range(d)]
    S = averaged_unitaries(T)
    I = np.eye(2 * n)
    assert op_norm(sum(s @ s.conj().T for s in S) - I) <= 1e-10
    assert op_norm(sum(s.conj().T @ s for s in S) - I) <= 1e-10
    cert = contraction_normal_dilation(T)
    assert cert.dilation.n == 4 * n * d
    assert commuting_normal_residual(cert.dilation.matrices) <= 1e-8
    assert cert.claim("compression").residual <= 1e-9
    assert max(op_norm(N) for N in cert.dilation) <= 2 * d + 1e-9


def test_contraction_pipeline_rejects_non_contraction():
    with pytest.raises(ValueError):
        contraction_normal_dilation([2 * np.eye(2), np.eye(2)])


# certificates ---------------------------------------------------------------------------------

def test_certificate_json_round_trip_recomputes(rng):
    T = [random_contraction(2, rng, 0.8) for _ in range(2)]
    cert = contraction_normal_dilation(T)
    back = certificate_from_json(certificate_to_json(cert))
    assert back.verified()
    fresh = {c.name: c.residual for c in back.verify()}
    for c in cert.claims:
        assert fresh[c.name] == pytest.approx(c.residual, abs=1e-14)


def test_certificate_verify_ignores_stored_residuals(rng):
    cert = halmos(random_contraction(2, rng, 0.5))
    obj = certificate_to_json(cert)
    for c in obj["claims"]:
        c["residual"] = 0.0
    obj["dilation"]["matrices"][0][0][0] = [5.0, 0.0]
    assert not certificate_from_json(obj).verified()


def test_certificate_rejects_unknown_claim(rng):
    obj = certificate_to_json(halmos(np.array([[0.5]])))
    obj["claims"][0]["name"] = "made_up"
    with pytest.raises(FormatError):
        certificate_from_json(obj)


def test_build_raises_when_a_claim_fails():
    with pytest.raises(CertificateError):
        DilationCertificate.build("bogus", [PAULI_X], [PAULI_Z], Isometry(np.eye(2)),
                                  [("compression", 1e-8, {})])


@given(seeds, st.integers(1, 4))
def test_slack_scales_are_used_as_given(seed, d):
    rng = np.random.default_rng(seed)
    a = harmonic_scales(rng, d)
    cert = sd_projection_dilation([[np.array([[0.5]])] for _ in range(d)], a)
    for M, ai in zip(cert.dilation, a):
        assert np.linalg.eigvalsh(M)[-1] == pytest.approx(ai, rel=1e-10)
