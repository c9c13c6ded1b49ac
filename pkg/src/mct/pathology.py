"""Finite truncations of the pathological tuples, joint eigenvector hunts and
minimality diagnostics.

Everything here is "at truncation": the reports state measured deviations
from the infinite-dimensional statements instead of claiming them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .anticommuting import clifford_generators
from .bodies import BodyError, ConvexBody, distance, sphere_directions, support_function
from .linalg import (
    DEFAULT_TOL,
    Isometry,
    MatrixTuple,
    as_tuple,
    commuting_normal_residual,
    direct_sum,
    op_norm,
)
from .matrix_convex import joint_spectrum, level1_range, spectrum_points, wmax_membership

TRUNCATION_NOTE = "infinite-dimensional minimality not decidable at truncation"


# --- joint eigenvectors -------------------------------------------------------

def joint_eigenvector_hunt(T, lam, eig_tol: float = DEFAULT_TOL.eig_tol) -> list[np.ndarray]:
    """Orthonormal basis of the common kernel of T_i - lam_i I."""
    T = as_tuple(T).dense()
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    if lam.size != T.d:
        raise ValueError("need one eigenvalue per operator")
    n = T.n
    stacked = np.vstack([M - l * np.eye(n) for M, l in zip(T, lam)])
    _, s, vh = np.linalg.svd(stacked)
    s_full = np.zeros(n)
    s_full[:len(s)] = s
    thresh = eig_tol * max(1.0, T.max_norm())
    return [vh[k].conj() for k in range(n) if s_full[k] <= thresh]


# --- reducing subspaces -------------------------------------------------------

def commutant_basis(T, eig_tol: float = DEFAULT_TOL.eig_tol) -> list[np.ndarray]:
    """Basis of {C : C T_i = T_i C and C T_i* = T_i* C}, orthonormal in Frobenius."""
    T = as_tuple(T).dense()
    n = T.n
    I = np.eye(n)
    rows = []
    for M in T:
        for A in (M, M.conj().T):
            # column-stacked vec(A C - C A) = (I (x) A - A^T (x) I) vec(C)
            rows.append(np.kron(I, A) - np.kron(A.T, I))
    K = np.vstack(rows)
    thresh = eig_tol * max(1.0, T.max_norm())
    if n <= 32:
        _, s, vh = np.linalg.svd(K)
        null = [vh[k].conj() for k in range(n * n) if s[k] <= thresh]
    else:
        w, U = np.linalg.eigh(K.conj().T @ K)
        null = [U[:, k] for k in range(n * n) if w[k] <= thresh ** 2]
    return [v.reshape(n, n, order="F") for v in null]


def reducing_decomposition(T, eig_tol: float = DEFAULT_TOL.eig_tol,
                           seed: int = DEFAULT_TOL.seed) -> list[tuple[Isometry, MatrixTuple]]:
    """Split T into irreducible summands (V_k, V_k* T V_k).

    A random Hermitian element of the commutant is diagonalized; its
    eigenspaces reduce T and the procedure recurses on each of them.
    """
    T = as_tuple(T).dense()
    rng = np.random.default_rng(seed)
    out: list[tuple[np.ndarray, MatrixTuple]] = []

    def split(V):
        sub = MatrixTuple(V.conj().T @ M @ V for M in T)
        basis = commutant_basis(sub, eig_tol)
        if len(basis) <= 1:
            out.append((V, sub))
            return
        C = sum(complex(rng.normal(), rng.normal()) * b for b in basis)
        H = (C + C.conj().T) / 2
        w, U = np.linalg.eigh(H)
        spread = w[-1] - w[0]
        if spread <= eig_tol:
            H = (C - C.conj().T) / 2j
            w, U = np.linalg.eigh(H)
            spread = w[-1] - w[0]
        gap = 1e-6 * spread
        start = 0
        for k in range(1, len(w) + 1):
            if k == len(w) or w[k] - w[k - 1] > gap:
                split(V @ U[:, start:k])
                start = k

    split(np.eye(T.n, dtype=complex))
    return [(Isometry(V), sub) for V, sub in out]


# --- minimality ---------------------------------------------------------------

@dataclass
class MinimalityReport:
    w1_in_K: bool
    margin: float
    vertex_eigenvectors: dict
    normal_summand_dims: list
    verdict: str
    notes: list = field(default_factory=list)


def _key(v):
    return tuple(float(x) for x in v)


def minimality_report(T, K: ConvexBody, tol: float = 1e-8) -> MinimalityReport:
    T = as_tuple(T).dense()
    if not T.is_hermitian():
        raise ValueError("minimality_report needs a Hermitian tuple")
    if not K.is_polytope:
        raise BodyError("minimality_report needs a polytope")
    mem = wmax_membership(T, K, tol=tol)
    if not mem.is_member:
        raise ValueError(f"W_1(T) is not inside K (violation {mem.margin:.2e})")
    verts = K.vertex_array()
    eig = {_key(v): joint_eigenvector_hunt(T, v) for v in verts}
    summands = reducing_decomposition(T)
    normal_dims = [s.n for _, s in summands if commuting_normal_residual(s.matrices) <= tol]
    notes = []

    def report(verdict):
        return MinimalityReport(True, mem.margin, eig, normal_dims, verdict, notes)

    if commuting_normal_residual(T.matrices) <= tol * max(1.0, T.max_norm()):
        pts = spectrum_points(T)
        scale = max(1.0, float(np.abs(verts).max()))
        dup = any(np.abs(pts[i] - pts[j]).max() <= tol * scale
                  for i in range(len(pts)) for j in range(i))
        if dup:
            notes.append("a joint eigenvalue is repeated; one copy can be dropped")
            return report("not_minimal")
        hull = ConvexBody.v_polytope(pts)
        if len(hull.vertices) < len(pts):
            notes.append("a joint eigenvalue is not extreme; dropping it keeps the range")
            return report("not_minimal")
        at_vertex = [any(np.abs(p - v).max() <= tol * scale for p in pts) for v in verts]
        if all(at_vertex) and len(pts) == len(verts):
            return report("minimal_diagonal")
        notes.append("minimal, but the joint spectrum does not fill the vertex set of K")
        return report("inconclusive")

    missing = [v for v in verts if not eig[_key(v)]]
    if missing:
        notes.append(TRUNCATION_NOTE)
        notes.append(f"no joint eigenvector at {len(missing)} vertex(es), e.g. {[float(x) for x in missing[0]]}")
        return report("inconclusive")
    E = np.column_stack([u for v in verts for u in eig[_key(v)]])
    q, _ = np.linalg.qr(E)
    comp = np.linalg.svd(np.eye(T.n) - q @ q.conj().T)[0][:, :T.n - q.shape[1]]
    rest = MatrixTuple(comp.conj().T @ M @ comp for M in T)
    simplex = len(verts) == K.ambient_dim + 1
    if simplex:
        notes.append("K is a simplex: the complement of the vertex eigenvectors lies in Wmin(K)")
        return report("not_minimal")
    if commuting_normal_residual(rest.matrices) <= tol:
        if all(distance(K, p) <= tol for p in spectrum_points(rest)):
            notes.append("complement of the vertex eigenvectors is normal with spectrum in K")
            return report("not_minimal")
    notes.append("complement of the vertex eigenvectors not certified inside Wmin(K)")
    return report("inconclusive")


# --- generators ---------------------------------------------------------------

def minimal_normal_tuple(K: ConvexBody) -> MatrixTuple:
    """Diagonal tuple whose k-th joint eigenvalue is the k-th vertex of K."""
    V = K.vertex_array()
    return MatrixTuple(np.diag(V[:, j]).astype(complex) for j in range(V.shape[1]))


def simplex_surprise_tuple(p: float, m: int) -> MatrixTuple:
    """(1 + 0 + S_1, 0 + 1 + S_2) of size m + 2 with S_1, S_2 weighted
    diagonals 1/(3 k^p) in the standard basis and in a rotated basis whose
    first vector is proportional to (2^(-1/2), ..., 2^(-m/2))."""
    if m < 2:
        raise ValueError("truncation size must be at least 2")
    if p < 1:
        raise ValueError("p must be at least 1")
    k = np.arange(1, m + 1)
    weights = 1.0 / (3.0 * k ** float(p))
    v1 = 2.0 ** (-k / 2.0)
    v1 /= np.linalg.norm(v1)
    Q, R = np.linalg.qr(np.column_stack([v1, np.eye(m)[:, :m - 1]]))
    Q = Q * np.sign(np.diag(R))
    S1 = np.diag(weights)
    S2 = (Q * weights) @ Q.T
    one, zero = np.ones((1, 1)), np.zeros((1, 1))
    return MatrixTuple([direct_sum(one, zero, S1), direct_sum(zero, one, S2)])


@dataclass
class SurpriseDiagnostics:
    psd: float
    sum_bound: float
    vertices_found: dict
    s_part_blocks: int
    distance_inner: float
    distance_lower: float
    target: float


def simplex_surprise_diagnostics(p: float, m: int, directions: int = 2048) -> SurpriseDiagnostics:
    """Measured deviations of a truncation from the infinite statement.

    distance_inner is the distance from (0,0) to a polytope inside W_1
    (an upper bound on the true distance); distance_lower is the lower bound
    lambda_min(T_1 + T_2)|_S / sqrt(2).
    """
    T = simplex_surprise_tuple(p, m)
    T1, T2 = (M.real for M in T)
    psd = min(np.linalg.eigvalsh(T1)[0], np.linalg.eigvalsh(T2)[0])
    sum_bound = float(np.linalg.eigvalsh(T1 + T2)[-1])
    found = {lam: len(joint_eigenvector_hunt(T, lam)) for lam in [(1.0, 0.0), (0.0, 1.0)]}
    S = MatrixTuple([T1[2:, 2:], T2[2:, 2:]])
    blocks = len(reducing_decomposition(S))
    rng_ = level1_range(T, directions)
    dist_inner = distance(rng_.inner, np.zeros(2))
    lower = float(np.linalg.eigvalsh(T1[2:, 2:] + T2[2:, 2:])[0]) / math.sqrt(2)
    return SurpriseDiagnostics(float(psd), sum_bound, found, blocks, float(dist_inner), lower,
                               1.0 / (3.0 * m ** p))


def staircase_normal_tuple(K: ConvexBody, m: int) -> MatrixTuple:
    """Diagonal tuple with eigenvalues v_1, ..., v_n, v_n/2, ..., v_n/m where
    v_1..v_n are the nonzero vertices of K (0 must be a vertex)."""
    V = K.vertex_array()
    zero = np.all(np.abs(V) <= 1e-12, axis=1)
    if not zero.any():
        raise BodyError("0 must be a vertex of K")
    if m < 1:
        raise ValueError("truncation must be positive")
    nz = V[~zero]
    pts = list(nz) + [nz[-1] / k for k in range(2, m + 1)]
    pts = np.array(pts)
    return MatrixTuple(np.diag(pts[:, j]).astype(complex) for j in range(pts.shape[1]))


def staircase_deviation(K: ConvexBody, m: int) -> float:
    """Distance from the missing vertex 0 to the hull of the truncated spectrum."""
    hull = ConvexBody.v_polytope(spectrum_points(staircase_normal_tuple(K, m)))
    return distance(hull, np.zeros(K.ambient_dim))


# --- ball covering ------------------------------------------------------------

@dataclass
class BallCovering:
    tuple: MatrixTuple
    centers: np.ndarray
    radii: np.ndarray
    simplices: list
    hausdorff: float


def _boundary_distance(A, b, x):
    return float(np.min((b - A @ x) / np.linalg.norm(A, axis=1)))


def ball_covering_tuple(K: ConvexBody, k_max: int, rho: float = 0.5,
                        directions: int = 3600) -> BallCovering:
    """Direct sum of x_k + c_k F^[2] over disks marching to every vertex.

    For vertex w: x_k = centroid + (1 - 2^-k)(w - centroid) and
    c_k = rho 2^-k dist(x_k, boundary).  Each disk sits in the equilateral
    triangle circumscribed around it, which lies inside int(K).
    """
    if K.ambient_dim != 2:
        raise BodyError("ball covering needs a polygon in the plane")
    V = K.vertex_array()
    facets = K.facet_arrays()
    if len(V) < 3 or facets is None:
        raise BodyError("degenerate polygon")
    A, b = facets
    centroid = V.mean(axis=0)
    if _boundary_distance(A, b, centroid) <= 1e-12:
        raise BodyError("degenerate polygon")
    F1, F2 = clifford_generators(2).F
    centers, radii, blocks1, blocks2, tris = [], [], [], [], []
    angles = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
    for w in V:
        for k in range(1, k_max + 1):
            x = centroid + (1 - 2.0 ** -k) * (w - centroid)
            c = rho * 2.0 ** -k * _boundary_distance(A, b, x)
            if c <= 0:
                continue
            centers.append(x)
            radii.append(c)
            blocks1.append(x[0] * np.eye(2) + c * F1)
            blocks2.append(x[1] * np.eye(2) + c * F2)
            tris.append(x + 2 * c * np.column_stack([np.cos(angles), np.sin(angles)]))
    T = MatrixTuple([direct_sum(*blocks1), direct_sum(*blocks2)])
    centers, radii = np.array(centers), np.array(radii)
    dirs = sphere_directions(2, directions)
    haus = max(abs(np.max(centers @ u + radii) - support_function(K, u)) for u in dirs)
    return BallCovering(T, centers, radii, tris, float(haus))
