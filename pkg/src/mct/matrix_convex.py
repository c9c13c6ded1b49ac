"""Membership tests against W^max(K), level-one ranges, joint spectra and
explicit normal dilations over simplices."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bodies import (
    BodyError,
    ConvexBody,
    extreme_point_indices,
    hausdorff_by_support,
    sphere_directions,
    support_function,
)
from .certificates import DEFAULT_BOUND, DilationCertificate
from .linalg import (
    DEFAULT_TOL,
    Isometry,
    MatrixTuple,
    as_tuple,
    commuting_normal_residual,
    hermitian_part,
    imaginary_part,
    op_norm,
    psd_sqrt,
    to_dense,
)

VERDICTS = ("member", "non_member", "member_sampled", "unknown")


class SpectrumError(ValueError):
    pass


@dataclass
class MembershipVerdict:
    verdict: str
    margin: float
    witness: np.ndarray | None = None
    checked: int = 0

    @property
    def is_member(self) -> bool:
        return self.verdict in ("member", "member_sampled")


def hermitian_components(T) -> list[np.ndarray]:
    """Real coordinates of a tuple: Hermitian matrices stay, others split (Re, Im)."""
    T = as_tuple(T)
    out = []
    cplx = not T.is_hermitian()
    for M in T:
        M = to_dense(M)
        if cplx:
            out += [hermitian_part(M), imaginary_part(M)]
        else:
            out.append(hermitian_part(M))
    return out


def _lam_max(H):
    return float(np.linalg.eigvalsh(H)[-1])


def wmax_membership(X, K: ConvexBody, directions: int = 720, tol: float = 1e-9,
                    seed: int = DEFAULT_TOL.seed) -> MembershipVerdict:
    """Check the linear inequalities of K on X.

    Exact when K has facets; otherwise the inequalities are sampled along
    `directions` deterministic unit vectors.
    """
    H = hermitian_components(X)
    if len(H) != K.ambient_dim:
        raise BodyError(f"tuple has {len(H)} real coordinates, body lives in R^{K.ambient_dim}")
    facets = K.facet_arrays()
    if facets is not None:
        A, b = facets
        sampled = False
    else:
        A = sphere_directions(K.ambient_dim, directions, seed)
        b = np.array([support_function(K, u) for u in A])
        sampled = True
    viol = np.array([_lam_max(sum(a_j * h for a_j, h in zip(a, H))) - bi for a, bi in zip(A, b)])
    margin = float(viol.max())
    if margin > tol:
        i = int(np.flatnonzero(viol >= margin - 1e-12)[0])
        return MembershipVerdict("non_member", margin, A[i].copy(), len(A))
    return MembershipVerdict("member_sampled" if sampled else "member", margin, None, len(A))


@dataclass
class Level1Range:
    """Outer and inner polytopes around the level-one range W_1(T)."""
    outer: ConvexBody
    inner: ConvexBody
    directions: np.ndarray
    support_values: np.ndarray
    split_complex: bool = False

    def support_outer(self, u) -> float:
        return support_function(self.outer, u)

    def support_inner(self, u) -> float:
        return support_function(self.inner, u)

    def hausdorff_to(self, K: ConvexBody, dirs=None) -> tuple[float, float]:
        """(outer, inner) Hausdorff distances to K by support comparison."""
        if dirs is None:
            dirs = sphere_directions(K.ambient_dim, 4 * len(self.directions), 1)
        hK = lambda u: support_function(K, u)
        return (hausdorff_by_support(self.support_outer, hK, dirs),
                hausdorff_by_support(self.support_inner, hK, dirs))


def level1_range(T, directions: int = 360, seed: int = DEFAULT_TOL.seed) -> Level1Range:
    H = hermitian_components(T)
    dim = len(H)
    U = sphere_directions(dim, directions, seed)
    h = np.empty(len(U))
    pts = np.empty((len(U), dim))
    for k, u in enumerate(U):
        w, vecs = np.linalg.eigh(sum(ui * Hi for ui, Hi in zip(u, H)))
        h[k] = w[-1]
        v = vecs[:, -1]
        pts[k] = [np.real(v.conj() @ Hi @ v) for Hi in H]
    outer = ConvexBody(dim, "h_polytope", facets=(U, h))
    inner = ConvexBody.v_polytope(pts)
    return Level1Range(outer, inner, U, h, split_complex=dim != as_tuple(T).d)


# --- joint spectra ------------------------------------------------------------

def joint_eigenbasis(N, tol: float | None = None, eig_tol: float = DEFAULT_TOL.eig_tol,
                     seed: int = DEFAULT_TOL.seed):
    """Unitary U diagonalizing a commuting normal tuple, and the (n, d) array
    of complex joint eigenvalues (row k belongs to column k of U)."""
    N = as_tuple(N).dense()
    scale = max(1.0, N.max_norm())
    tol = 1e-8 * scale if tol is None else tol
    res = commuting_normal_residual(N.matrices)
    if res > tol:
        raise SpectrumError(f"tuple is not commuting normal (residual {res:.2e})")
    comps = []
    for M in N:
        comps += [hermitian_part(M), imaginary_part(M)]
    rng = np.random.default_rng(seed)

    def diag(basis):
        c = rng.normal(size=len(comps))
        A = sum(ci * (basis.conj().T @ Hi @ basis) for ci, Hi in zip(c, comps))
        return np.linalg.eigh((A + A.conj().T) / 2)

    w, U = diag(np.eye(N.n, dtype=complex))
    # one refinement pass over eigenvalue clusters
    cols, start = [], 0
    gap = eig_tol * scale
    while start < len(w):
        stop = start + 1
        while stop < len(w) and w[stop] - w[stop - 1] <= gap:
            stop += 1
        block = U[:, start:stop]
        if stop - start > 1:
            _, R = diag(block)
            block = block @ R
        cols.append(block)
        start = stop
    U = np.hstack(cols)
    lam = np.array([[U[:, k].conj() @ M @ U[:, k] for M in N] for k in range(N.n)])
    return U, lam


def joint_spectrum(N, **kw) -> np.ndarray:
    return joint_eigenbasis(N, **kw)[1]


def spectrum_points(N, **kw) -> np.ndarray:
    """Joint spectrum as real points: Hermitian tuples give R^d, others R^{2d}
    with coordinates (Re, Im) per operator."""
    N = as_tuple(N)
    lam = joint_spectrum(N, **kw)
    if N.is_hermitian():
        return lam.real.copy()
    out = np.empty((lam.shape[0], 2 * lam.shape[1]))
    out[:, 0::2] = lam.real
    out[:, 1::2] = lam.imag
    return out


def matrix_range_of_normal(N, **kw) -> ConvexBody:
    return ConvexBody.v_polytope(spectrum_points(N, **kw))


def joint_eigenprojections(N, eig_tol: float = DEFAULT_TOL.eig_tol, **kw):
    """Group joint eigenvectors by joint eigenvalue: [(lambda, projection)]."""
    U, lam = joint_eigenbasis(N, eig_tol=eig_tol, **kw)
    scale = max(1.0, float(np.abs(lam).max(initial=0.0)))
    groups: list[tuple[np.ndarray, list[int]]] = []
    for k, l in enumerate(lam):
        for g in groups:
            if np.abs(g[0] - l).max() <= eig_tol * scale:
                g[1].append(k)
                break
        else:
            groups.append((l, [k]))
    out = []
    for l, idx in groups:
        B = U[:, idx]
        out.append((lam[idx].mean(axis=0), B @ B.conj().T))
    return out


# --- Naimark ------------------------------------------------------------------

RANK_DROP = 1e-13


def _factor(P):
    """B with B*B = P, B of full row rank (eigenvalues <= RANK_DROP dropped)."""
    w, E = np.linalg.eigh(hermitian_part(P))
    keep = w > RANK_DROP * max(1.0, float(np.abs(w).max(initial=0.0)))
    return (np.sqrt(w[keep])[:, None]) * E[:, keep].conj().T


def naimark(P, tol: float = 1e-9):
    """Dilate a sub-POVM (P_1, ..., P_k) to orthogonal projections.

    Returns (V, Pi) where Pi has k+1 entries, the last one dilating the
    complement I - sum P_i, so that V* Pi_i V = P_i and sum Pi_i = I.
    Each block of V is B_i with B_i* B_i = P_i, of size rank(P_i).
    """
    mats = [hermitian_part(to_dense(np.asarray(p, dtype=complex))) for p in P]
    if not mats:
        raise ValueError("naimark needs at least one operator")
    n = mats[0].shape[0]
    for M in mats:
        if np.linalg.eigvalsh(M)[0] < -tol:
            raise ValueError("naimark premise violated: an operator is not positive")
    comp = np.eye(n) - sum(mats)
    if np.linalg.eigvalsh(hermitian_part(comp))[0] < -tol:
        raise ValueError("naimark premise violated: sum exceeds the identity")
    blocks = [_factor(M) for M in mats + [comp]]
    V = np.vstack(blocks)
    D = V.shape[0]
    Pi, off = [], 0
    for B in blocks:
        p = np.zeros((D, D), dtype=complex)
        p[off:off + B.shape[0], off:off + B.shape[0]] = np.eye(B.shape[0])
        Pi.append(p)
        off += B.shape[0]
    return Isometry(V, tol=max(1e-8, 10 * tol)), Pi


# --- simplices ----------------------------------------------------------------

def simplex_vertices(K: ConvexBody, tol: float = 1e-10) -> np.ndarray:
    V = K.vertex_array()
    d = K.ambient_dim
    if V.shape[0] != d + 1:
        raise BodyError(f"body has {V.shape[0]} vertices; a simplex in R^{d} has {d + 1}")
    B = (V[1:] - V[0]).T
    if abs(np.linalg.det(B)) <= tol * max(1.0, np.abs(B).max()) ** d:
        raise BodyError("simplex is degenerate")
    return V


def barycentric_operators(X, V):
    """(P_0, P_1, ..., P_d) with X_j = sum_i V[i, j] P_i and sum P_i = I."""
    H = [to_dense(M) for M in as_tuple(X)]
    n = H[0].shape[0]
    Binv = np.linalg.inv((V[1:] - V[0]).T)
    shifted = [h - V[0, j] * np.eye(n) for j, h in enumerate(H)]
    P = [sum(Binv[i, j] * shifted[j] for j in range(len(H))) for i in range(len(H))]
    P = [hermitian_part(p) for p in P]
    return [np.eye(n) - sum(P)] + P


def wmin_certificate_simplex(X, K: ConvexBody, tol: float = 1e-9,
                             bound: float = DEFAULT_BOUND) -> DilationCertificate:
    """Normal dilation of X with joint spectrum among the vertices of K."""
    X = as_tuple(X).dense()
    if not X.is_hermitian():
        raise ValueError("wmin_certificate_simplex needs a Hermitian tuple")
    V = simplex_vertices(K)
    if X.d != K.ambient_dim:
        raise BodyError("tuple length does not match the simplex dimension")
    P = barycentric_operators(X, V)
    margin = min(float(np.linalg.eigvalsh(p)[0]) for p in P)
    if margin < -tol * max(1.0, X.max_norm()):
        raise ValueError(f"W_1(X) is not inside the simplex (facet violation {-margin:.2e})")
    iso, Pi = naimark(P[1:], tol=tol * max(1.0, X.max_norm()))
    Dn = iso.V.shape[0]
    N = [V[0, j] * np.eye(Dn) + sum((V[i + 1, j] - V[0, j]) * Pi[i] for i in range(X.d))
         for j in range(X.d)]
    specs = [
        ("isometry", bound, {}),
        ("hermitian", bound, {}),
        ("commuting", bound, {}),
        ("normal", bound, {}),
        ("spectrum_in_vertices", bound, {"vertices": V.tolist()}),
        ("compression", bound, {}),
    ]
    return DilationCertificate.build("wmin_simplex", X, MatrixTuple(N), iso, specs,
                                     conclusion="X in Wmin(K) certified")
