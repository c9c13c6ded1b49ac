"""Anticommuting self-adjoint dilations and the generators F^[d].

New tensor factors are always placed on the left (outer) side, so the
original space sits in the first coordinates and compression is the
top-left block.  Symmetrized tuples double in size per generator and are
therefore stored sparse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import io
from .bodies import ScaleVector
from .certificates import DEFAULT_BOUND, DilationCertificate
from .dilations import halmos_matrix
from .linalg import (
    PAULI_X,
    PAULI_Z,
    Isometry,
    MatrixTuple,
    as_tuple,
    hermitian_residual,
    kron_power,
    max_anticommutator,
    op_norm,
    residual_norm,
    to_dense,
)

MAX_CLIFFORD_D = 14
DENSE_CLIFFORD_D = 10
MAX_DIM = 4096


@dataclass
class CliffordTuple:
    d: int
    F: MatrixTuple

    def residuals(self) -> dict:
        # the generators are signed permutations, so sparse products are exact and cheap
        F = [f if sp.issparse(f) else sp.csr_matrix(f) for f in self.F.matrices]
        I = sp.identity(F[0].shape[0], format="csr")
        return {
            "hermitian": max(hermitian_residual(f) for f in F),
            "square": max(residual_norm(f @ f - I) for f in F),
            "anticommuting": max_anticommutator(F),
        }


def clifford_generators(d: int) -> CliffordTuple:
    """F_j^[d] = F_j^[d-1] (x) Z for j < d and F_d^[d] = I (x) X, size 2^(d-1).

    Dense up to d = 10, sparse beyond.
    """
    if not 1 <= d <= MAX_CLIFFORD_D:
        raise ValueError(f"d must lie in 1..{MAX_CLIFFORD_D}")
    Z, X = sp.csr_matrix(PAULI_Z), sp.csr_matrix(PAULI_X)
    F = [sp.csr_matrix(np.ones((1, 1), dtype=complex))]
    for k in range(2, d + 1):
        F = [sp.kron(f, Z, format="csr") for f in F]
        F.append(sp.kron(sp.identity(2 ** (k - 2)), X, format="csr"))
    if d <= DENSE_CLIFFORD_D:
        F = [f.toarray() for f in F]
    return CliffordTuple(d, MatrixTuple(F))


def _scale_vector(a, d):
    a = a if isinstance(a, ScaleVector) else ScaleVector(a)
    if len(a) != d:
        raise ValueError(f"need {d} scales, got {len(a)}")
    if a.square_sum > 1 + 1e-12:
        raise ValueError("scales violate sum 1/a_j^2 <= 1")
    return a


def _check_witnesses(X, witnesses, tol):
    out = []
    for W in witnesses or []:
        W = np.array(to_dense(W), dtype=complex, ndmin=2)
        if hermitian_residual(W) > tol:
            raise ValueError("witnesses must be Hermitian")
        if any(op_norm(W @ x + x @ W) > tol for x in X):
            raise ValueError("a witness does not anticommute with the tuple")
        out.append(W)
    return out


def _ac_recursive(X: list, a: list) -> list:
    d = len(X)
    if d == 1:
        return [X[0]]
    n = X[0].shape[0]
    Y = [halmos_matrix(x, 1.0) for x in X]
    Yd = Y[-1]
    r = math.sqrt(a[-1] ** 2 - 1)
    s = 1 / math.sqrt(1 + 1 / r ** 2)
    I = np.eye(2 * n)
    E = np.block([[Yd, -r * I], [-r * I, -Yd]])
    G = []
    for y in Y[:-1]:
        C = (y @ Yd + Yd @ y) / (2 * r)
        G.append(np.block([[y, C], [C, -y]]))
    inner = _ac_recursive([s * g for g in G], [s * aj for aj in a[:-1]])
    out = [m / s for m in inner]
    out.append(np.kron(kron_power(PAULI_Z, 2 * (d - 2)), E))
    return out


def anticommuting_dilation(X, a, witnesses=None, tol: float = 1e-9,
                           claim_bound: float = DEFAULT_BOUND) -> DilationCertificate:
    """Pairwise anticommuting Hermitian A_j with ||A_j|| <= a_j dilating X.

    Needs Hermitian contractions X_j and sum 1/a_j^2 <= 1.  The scale a_d is
    consumed at the outermost level.  Any Hermitian W anticommuting with all
    X_j lifts to Z^(2(d-1)) (x) W, which anticommutes with all A_j.
    """
    X = as_tuple(X).dense()
    if not X.is_hermitian():
        raise ValueError("anticommuting_dilation needs Hermitian matrices")
    d, n = X.d, X.n
    a = _scale_vector(a, d)
    for x in X:
        if op_norm(x) > 1 + tol:
            raise ValueError("anticommuting_dilation needs contractions")
    dim = n * 4 ** (d - 1)
    if dim > MAX_DIM:
        raise ValueError(f"output dimension {dim} exceeds the guardrail {MAX_DIM}")
    W = _check_witnesses(X, witnesses, 1e-8)
    A = _ac_recursive(list(X), list(a.values))
    specs = [
        ("hermitian", claim_bound, {}),
        ("anticommuting", claim_bound, {}),
        ("norm_bound", claim_bound, {"bounds": list(a.values)}),
        ("compression", claim_bound, {}),
    ]
    if W:
        specs.append(("witness_anticommutes", claim_bound,
                      {"witnesses": [io.matrix_to_json(w) for w in W], "z_factors": 2 * (d - 1)}))
    return DilationCertificate.build("anticommuting", X, A, Isometry.first_block(dim, n), specs,
                                     certified_scale=list(a.values))


DEFECT_FLOOR = 1e-11


def _defect_root(A, a):
    """sqrt(a^2 - A^2) for Hermitian A with ||A|| <= a.

    Defects below DEFECT_FLOOR * a^2 are set to zero: on (near) symmetries
    the square root would otherwise turn rounding noise into 1e-8 errors.
    """
    lam, U = np.linalg.eigh((A + A.conj().T) / 2)
    t = np.abs(lam)
    if t.max(initial=0.0) > a * (1 + 1e-8):
        raise ValueError("a matrix exceeds its scale")
    defect = np.clip((a - t) * (a + t), 0.0, None)
    defect[defect <= DEFECT_FLOOR * a * a] = 0.0
    return (U * np.sqrt(defect)) @ U.conj().T


def _sym_recursive(A: list, a: list) -> list:
    d = len(A)
    if d == 1:
        return [sp.csr_matrix(halmos_matrix(A[0], a[0]))]
    L = _sym_recursive(A[:-1], a[:-1])
    Ad, ad = A[-1], a[-1]
    m = 2 ** (d - 1)
    Zk = sp.csr_matrix(kron_power(PAULI_Z, d - 1))
    Ahat = sp.kron(Zk, sp.csr_matrix(Ad), format="csr")
    # sqrt(a^2 - Ahat^2) = I (x) sqrt(a^2 - A_d^2)
    D = _defect_root(Ad, ad)
    Dhat = sp.kron(sp.identity(m), sp.csr_matrix(D), format="csr")
    Md = sp.bmat([[Ahat, Dhat], [Dhat, -Ahat]], format="csr")
    Z = sp.csr_matrix(PAULI_Z)
    return [sp.kron(Z, l, format="csr") for l in L] + [Md]


def symmetry_normalize(A, a, witnesses=None, tol: float = 1e-8,
                       claim_bound: float = DEFAULT_BOUND) -> DilationCertificate:
    """Anticommuting M_j with M_j^2 = a_j^2 I dilating anticommuting A_j.

    Output size is 2^d times the input.  A Hermitian W anticommuting with all
    A_j lifts to Z^(d) (x) W.
    """
    A = as_tuple(A).dense()
    d, n = A.d, A.n
    if not A.is_hermitian():
        raise ValueError("symmetry_normalize needs Hermitian matrices")
    a = a if isinstance(a, ScaleVector) else ScaleVector(a)
    if len(a) != d:
        raise ValueError(f"need {d} scales, got {len(a)}")
    scale = max(1.0, max(a))
    if max_anticommutator(A.matrices) > tol * scale:
        raise ValueError("symmetry_normalize needs pairwise anticommuting matrices")
    for x, aj in zip(A, a):
        if op_norm(x) > aj * (1 + tol):
            raise ValueError("a matrix exceeds its scale")
    dim = n * 2 ** d
    if dim > MAX_DIM:
        raise ValueError(f"output dimension {dim} exceeds the guardrail {MAX_DIM}")
    W = _check_witnesses(A, witnesses, 1e-8 * scale)
    M = _sym_recursive(list(A), list(a.values))
    specs = [
        ("hermitian", claim_bound, {}),
        ("anticommuting", claim_bound, {}),
        ("squares_scalar", claim_bound, {"scales": list(a.values)}),
        ("compression", claim_bound, {}),
    ]
    if W:
        specs.append(("witness_anticommutes", claim_bound,
                      {"witnesses": [io.matrix_to_json(w) for w in W], "z_factors": d}))
    return DilationCertificate.build("symmetry_normalize", A, M, Isometry.first_block(dim, n), specs,
                                     certified_scale=list(a.values))


def cube_ball_certificate(X, c, claim_bound: float = DEFAULT_BOUND) -> DilationCertificate:
    """Anticommuting self-adjoint unitaries L_j dilating X, given ||X_j|| <= c_j
    and sum c_j^2 <= 1; this places X in the matrix range of F^[d]."""
    X = as_tuple(X).dense()
    if not X.is_hermitian():
        raise ValueError("cube_ball_certificate needs Hermitian matrices")
    c = np.asarray(c, dtype=float).reshape(-1)
    if len(c) != X.d or np.any(c <= 0):
        raise ValueError("need one positive c_j per matrix")
    if float(np.sum(c * c)) > 1 + 1e-12:
        raise ValueError("premise violated: sum c_j^2 > 1")
    for x, cj in zip(X, c):
        if op_norm(x) > cj * (1 + 1e-9):
            raise ValueError("premise violated: ||X_j|| > c_j")
    a = ScaleVector(1 / c)
    dim = X.n * 4 ** (X.d - 1) * 2 ** X.d
    if dim > MAX_DIM:
        raise ValueError(f"output dimension {dim} exceeds the guardrail {MAX_DIM}")
    B = [x / cj for x, cj in zip(X, c)]
    ac = anticommuting_dilation(B, a, claim_bound=claim_bound)
    sym = symmetry_normalize(ac.dilation, a, claim_bound=claim_bound)
    L = [cj * m for cj, m in zip(c, sym.dilation)]
    V = sym.isometry.V @ ac.isometry.V
    specs = [
        ("hermitian", claim_bound, {}),
        ("squares_scalar", claim_bound, {"scales": [1.0] * X.d}),
        ("anticommuting", claim_bound, {}),
        ("compression", claim_bound, {}),
    ]
    return DilationCertificate.build("cube_ball", X, L, V, specs, certified_scale=c.tolist(),
                                     conclusion="X in W(F[d]) certified")


def wmax_ball_sample(d: int, n: int, rng, directions: int = 720) -> MatrixTuple:
    """Random Hermitian tuple scaled onto the sampled boundary of Wmax(ball)."""
    from .bodies import sphere_directions
    from .linalg import random_hermitian
    X = [random_hermitian(n, rng) for _ in range(d)]
    U = sphere_directions(d, directions, int(rng.integers(2 ** 31)))
    top = max(np.linalg.eigvalsh(sum(ui * x for ui, x in zip(u, X)))[-1] for u in U)
    return MatrixTuple([x / top for x in X])


def try_cube_ball(X):
    """Cube-in-ball certificate with c_j = ||X_j||, or None when sum c_j^2 > 1.

    A None result asserts nothing about membership in the range of F^[d].
    """
    X = as_tuple(X).dense()
    c = np.array([max(op_norm(x), 1e-12) for x in X])
    if float(np.sum(c * c)) > 1 + 1e-12:
        return None
    return cube_ball_certificate(X, c)
