"""Dense complex matrix primitives and residual helpers.

Everything in the package is built on Hermitian eigendecomposition; no
non-Hermitian spectral routine is ever used.  Normality and commutation are
always checked numerically rather than assumed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import norm as sparse_fro, svds


@dataclass(frozen=True)
class ToleranceConfig:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    eig_tol: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if min(self.abs_tol, self.rel_tol, self.eig_tol) <= 0:
            raise ValueError("tolerances must be positive")

    def bound(self, scale: float = 1.0) -> float:
        return self.abs_tol + self.rel_tol * scale


DEFAULT_TOL = ToleranceConfig()


class MatrixTuple:
    """Ordered tuple of d square matrices of a common size n."""

    __slots__ = ("matrices",)

    def __init__(self, matrices: Iterable):
        mats = [_as_matrix(m) for m in matrices]
        if not mats:
            raise ValueError("a matrix tuple needs at least one matrix")
        n = mats[0].shape[0]
        for m in mats:
            if m.ndim != 2 or m.shape != (n, n):
                raise ValueError(f"expected {n}x{n} matrices, got shape {m.shape}")
            data = m.data if sp.issparse(m) else m
            if not np.all(np.isfinite(data)):
                raise ValueError("matrix entries must be finite")
        self.matrices = tuple(mats)

    @property
    def d(self) -> int:
        return len(self.matrices)

    @property
    def n(self) -> int:
        return self.matrices[0].shape[0]

    def __len__(self):
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)

    def __getitem__(self, i):
        return self.matrices[i]

    def __repr__(self):
        return f"MatrixTuple(d={self.d}, n={self.n})"

    def hermitian_flags(self, tol: float = 1e-10) -> list[bool]:
        return [hermitian_residual(m) <= tol * max(1.0, op_norm(m)) for m in self]

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(self.hermitian_flags(tol))

    @property
    def is_sparse(self) -> bool:
        return any(sp.issparse(m) for m in self.matrices)

    def dense(self) -> "MatrixTuple":
        return MatrixTuple(to_dense(m) for m in self)

    def scaled(self, factors) -> "MatrixTuple":
        factors = np.broadcast_to(np.asarray(factors, dtype=float), (self.d,))
        return MatrixTuple(f * m for f, m in zip(factors, self))

    def max_norm(self) -> float:
        return max(op_norm(m) for m in self)


def _as_matrix(m):
    if sp.issparse(m):
        return sp.csr_matrix(m, dtype=complex)
    return np.array(m, dtype=complex, ndmin=2)


def to_dense(M) -> np.ndarray:
    return M.toarray() if sp.issparse(M) else np.asarray(M)


def as_tuple(x) -> MatrixTuple:
    if isinstance(x, MatrixTuple):
        return x
    if isinstance(x, np.ndarray) and x.ndim == 2:
        return MatrixTuple([x])
    return MatrixTuple(x)


class Isometry:
    """Matrix V of shape (n_big, n_small) with V*V = I."""

    __slots__ = ("V",)

    def __init__(self, V, tol: float = 1e-8):
        V = np.array(V, dtype=complex, ndmin=2)
        if V.shape[0] < V.shape[1]:
            raise ValueError("an isometry cannot map into a smaller space")
        err = op_norm(V.conj().T @ V - np.eye(V.shape[1]))
        if err > tol:
            raise ValueError(f"not an isometry: |V*V - I| = {err:.3e}")
        self.V = V

    @classmethod
    def first_block(cls, n_big: int, n_small: int) -> "Isometry":
        """Embedding of C^n_small onto the first coordinates of C^n_big."""
        return cls(np.eye(n_big, n_small))

    @property
    def shape(self):
        return self.V.shape

    def then(self, outer: "Isometry") -> "Isometry":
        """Composition: first self, then outer."""
        return Isometry(outer.V @ self.V)

    def __repr__(self):
        return f"Isometry({self.V.shape[0]}x{self.V.shape[1]})"


# --- norms and residuals -----------------------------------------------------

# Above this size residuals are measured in Frobenius norm, a cheap upper
# bound for the operator norm.
EXACT_NORM_MAX = 512


def op_norm(M) -> float:
    if sp.issparse(M):
        if M.nnz == 0:
            return 0.0
        if M.shape[0] <= 2048:
            return op_norm(M.toarray())
        return float(svds(M, k=1, return_singular_vectors=False)[0])
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def residual_norm(M) -> float:
    """Operator norm for small matrices, Frobenius upper bound for large ones."""
    if sp.issparse(M):
        M = M.tocsr()
        M.eliminate_zeros()
        if M.nnz == 0:
            return 0.0
        if M.shape[0] <= EXACT_NORM_MAX:
            return op_norm(M.toarray())
        return float(sparse_fro(M))
    M = np.asarray(M)
    if not M.any():
        return 0.0
    if M.shape[0] <= EXACT_NORM_MAX:
        return op_norm(M)
    return float(np.linalg.norm(M))


def adjoint(M):
    return M.conj().T


def hermitian_residual(M) -> float:
    return residual_norm(M - M.conj().T)


def commutator(A, B):
    return A @ B - B @ A


def anticommutator(A, B):
    return A @ B + B @ A


def max_commutator(T: Sequence) -> float:
    """Largest ||[Ti, Tj]|| over i < j."""
    res = 0.0
    for i in range(len(T)):
        for j in range(i + 1, len(T)):
            res = max(res, residual_norm(commutator(T[i], T[j])))
    return res


def max_anticommutator(T: Sequence) -> float:
    res = 0.0
    for i in range(len(T)):
        for j in range(i + 1, len(T)):
            res = max(res, residual_norm(anticommutator(T[i], T[j])))
    return res


def normality_residual(T: Sequence) -> float:
    """max over i of ||Ti Ti* - Ti* Ti|| together with all ||[Ti, Tj*]||."""
    res = 0.0
    for A in T:
        for B in T:
            res = max(res, residual_norm(A @ B.conj().T - B.conj().T @ A))
    return res


def commuting_normal_residual(T: Sequence) -> float:
    return max(max_commutator(T), normality_residual(T))


# --- spectral primitives -----------------------------------------------------

def hermitian_part(M):
    return (M + M.conj().T) / 2


def imaginary_part(M):
    return (M - M.conj().T) / 2j


def psd_sqrt(M, eig_tol: float = DEFAULT_TOL.eig_tol, herm_tol: float = 1e-8):
    """Hermitian square root of a PSD matrix.

    Eigenvalues in [-eig_tol, 0) are clipped to zero; anything more negative
    raises.
    """
    M = np.asarray(M, dtype=complex)
    scale = max(1.0, op_norm(M))
    if hermitian_residual(M) > herm_tol * scale:
        raise ValueError("psd_sqrt needs a Hermitian matrix")
    w, U = np.linalg.eigh(hermitian_part(M))
    if w.size and w[0] < -eig_tol * scale:
        raise ValueError(f"matrix is not PSD: smallest eigenvalue {w[0]:.3e}")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (U * w) @ U.conj().T


def kron(A, B):
    return np.kron(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))


def kron_power(A, k: int):
    out = np.eye(1, dtype=complex)
    for _ in range(k):
        out = np.kron(out, A)
    return out


def direct_sum(*blocks):
    blocks = [np.array(b, dtype=complex, ndmin=2) for b in blocks]
    n = sum(b.shape[0] for b in blocks)
    m = sum(b.shape[1] for b in blocks)
    out = np.zeros((n, m), dtype=complex)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


def compress(V, N) -> MatrixTuple:
    """The tuple (V* N_1 V, ..., V* N_d V)."""
    Vm = V.V if isinstance(V, Isometry) else np.asarray(V, dtype=complex)
    N = as_tuple(N)
    if Vm.shape[0] != N.n:
        raise ValueError(f"isometry has {Vm.shape[0]} rows but tuple acts on C^{N.n}")
    Vh = Vm.conj().T
    return MatrixTuple(Vh @ np.asarray(M @ Vm) for M in N)


def complete_to_unitary(V):
    """Unitary whose first columns are the orthonormal columns of V."""
    V = np.asarray(V, dtype=complex)
    n, k = V.shape
    if k == n:
        return V.copy()
    # orthogonal complement from the SVD of the projector residual
    _, _, vh = np.linalg.svd(V.conj().T)
    comp = vh[k:].conj().T
    return np.hstack([V, comp])


def unitary_residual(U) -> float:
    U = np.asarray(U)
    eye = np.eye(U.shape[0])
    return max(op_norm(U.conj().T @ U - eye), op_norm(U @ U.conj().T - eye))


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def random_hermitian(n: int, rng, norm: float | None = None):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = (A + A.conj().T) / 2
    if norm is not None:
        H *= norm / max(op_norm(H), 1e-300)
    return H


def random_contraction(n: int, rng, norm: float = 1.0):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return A * (norm / op_norm(A))


def random_unitary(n: int, rng):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(A)
    return Q * (np.diag(R) / np.abs(np.diag(R)))
