"""Explicit dilation constructions.

Every builder returns a DilationCertificate whose claims are recomputed from
the raw matrices.  The contraction pipeline certifies the scale 2d using the
orthogonal family below; the smaller scale sqrt(2d) is only reported as a
known bound that this construction does not reach.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import (
    BodyError,
    ConvexBody,
    ScaleVector,
    ScaleClass,
    body_to_json,
    is_symmetric,
    member,
    product,
    scaled,
)
from .certificates import DEFAULT_BOUND, DilationCertificate
from .linalg import (
    Isometry,
    MatrixTuple,
    as_tuple,
    commuting_normal_residual,
    complete_to_unitary,
    hermitian_part,
    hermitian_residual,
    imaginary_part,
    op_norm,
    psd_sqrt,
    to_dense,
)
from .matrix_convex import joint_eigenprojections, naimark, spectrum_points

SCALE_NOTE = "sqrt(2d) is a known bound not certified by this construction"


# --- Halmos -------------------------------------------------------------------

HALMOS_FLOOR = 1e-13

def halmos_matrix(X, bound: float = 1.0, tol: float = 1e-9) -> np.ndarray:
    X = np.array(to_dense(X), dtype=complex, ndmin=2)
    b = float(bound)
    nrm = op_norm(X)
    if nrm > b * (1 + tol) + tol:
        raise ValueError(f"norm {nrm:.6g} exceeds the bound {b:.6g}")
    Xh = X.conj().T
    # both defect roots from one SVD, so that top X = X bot holds to rounding
    W, s, Rh = np.linalg.svd(X)
    s = np.minimum(s, b)
    defect = (b - s) * (b + s)
    # singular values at the bound up to rounding: keep the defect exactly 0
    defect[defect <= HALMOS_FLOOR * b * b] = 0.0
    defect = np.sqrt(defect)
    top = (W * defect) @ W.conj().T
    bot = (Rh.conj().T * defect) @ Rh
    if hermitian_residual(X) <= 1e-13 * max(1.0, nrm):
        top = bot = hermitian_part(bot)
    return np.block([[X, top], [bot, -Xh]])


def halmos(X, bound: float = 1.0, tol: float = 1e-9, claim_bound: float = DEFAULT_BOUND):
    X = np.array(to_dense(X), dtype=complex, ndmin=2)
    U = halmos_matrix(X, bound, tol)
    n = X.shape[0]
    specs = [("unitary", claim_bound, {"scale": float(bound)}), ("compression", claim_bound, {})]
    if hermitian_residual(X) <= 1e-12 * max(1.0, op_norm(X)):
        specs += [("hermitian", claim_bound, {}),
                  ("squares_scalar", claim_bound, {"scales": [float(bound)]})]
    return DilationCertificate.build("halmos", [X], [U], Isometry.first_block(2 * n, n), specs,
                                     certified_scale=float(bound))


# --- orthogonal family --------------------------------------------------------

@dataclass
class OrthogonalFamily:
    scales: ScaleVector
    Q: list

    @property
    def d(self) -> int:
        return len(self.Q)

    def residuals(self) -> dict:
        I = np.eye(self.d)
        res = {
            "hermitian": max(hermitian_residual(q) for q in self.Q),
            "spectrum": 0.0,
            "rank_one": 0.0,
            "annihilating": 0.0,
            "top_left": max(abs(q[0, 0] - 1) for q in self.Q),
            "resolution": op_norm(sum(q / a for q, a in zip(self.Q, self.scales)) - I),
        }
        for q, a in zip(self.Q, self.scales):
            w = np.linalg.eigvalsh(hermitian_part(q))
            res["spectrum"] = max(res["spectrum"], abs(w[-1] - a), float(np.abs(w[:-1]).max(initial=0)))
            res["rank_one"] = max(res["rank_one"], float(np.abs(w[:-1]).max(initial=0)))
        for i in range(self.d):
            for j in range(self.d):
                if i != j:
                    res["annihilating"] = max(res["annihilating"], op_norm(self.Q[i] @ self.Q[j]))
        return res


def q_family(a, shrink: bool = True) -> OrthogonalFamily:
    """Mutually annihilating rank-one Q_i >= 0 with spectrum {0, a_i}, (Q_i)_00 = 1.

    Needs sum 1/a_i = 1; with shrink=True a strictly smaller sum is first
    brought to equality by scaling all a_i down proportionally.
    """
    a = a if isinstance(a, ScaleVector) else ScaleVector(a)
    if a.classification is not ScaleClass.HARMONIC_FEASIBLE:
        raise ValueError("q_family needs sum 1/a_i <= 1")
    if abs(a.harmonic_sum - 1) > 1e-12:
        if not shrink:
            raise ValueError("q_family needs sum 1/a_i = 1; shrink the scales first")
        a = a.shrunk_to_harmonic_equality()
    vals = np.array(a.values)
    d = len(vals)
    w = vals ** -0.5
    w /= np.linalg.norm(w)
    u = w.copy()
    u[0] -= 1.0
    if np.linalg.norm(u) < 1e-14:
        H = np.eye(d)
    else:
        # Householder reflection exchanging e_1 and w
        H = np.eye(d) - 2 * np.outer(u, u) / (u @ u)
    Q = [vals[i] * np.outer(H[:, i], H[:, i]).astype(complex) for i in range(d)]
    return OrthogonalFamily(a, Q)


def _family_for(a):
    """Q_1..Q_d with spectrum exactly {0, a_i}, plus their common size.

    A slack scale 1/(1 - sum 1/a_i) pads the family when sum 1/a_i < 1, so
    the a_i are used as given instead of being shrunk.
    """
    a = a if isinstance(a, ScaleVector) else ScaleVector(a)
    h = a.harmonic_sum
    if a.classification is not ScaleClass.HARMONIC_FEASIBLE:
        raise ValueError("scales need sum 1/a_i <= 1")
    if h >= 1 - 1e-12:
        fam = q_family(a)
        return fam.Q, fam.d
    fam = q_family(list(a.values) + [1 / (1 - h)], shrink=False)
    return fam.Q[:len(a)], fam.d


def _first_coordinate(n: int, m: int) -> np.ndarray:
    """Isometry x -> x (tensor) e_0 from C^n into C^n (tensor) C^m."""
    e0 = np.zeros((m, 1))
    e0[0, 0] = 1.0
    return np.kron(np.eye(n), e0)


def _annihilating_pairs(idx_groups):
    pairs = []
    for gi, g in enumerate(idx_groups):
        for gj, h in enumerate(idx_groups):
            if gi < gj:
                pairs += [[i, j] for i in g for j in h]
    return pairs


def orthogonal_family_dilation(Z, a, claim_bound: float = DEFAULT_BOUND) -> DilationCertificate:
    """M_k = Z_k (tensor) Q_k: Hermitian, mutually annihilating, ||M_k|| <= a_k."""
    Z = as_tuple(Z).dense()
    if not Z.is_hermitian():
        raise ValueError("orthogonal_family_dilation needs Hermitian matrices")
    if max(op_norm(z) for z in Z) > 1 + 1e-9:
        raise ValueError("orthogonal_family_dilation needs contractions")
    a = a if isinstance(a, ScaleVector) else ScaleVector(a)
    if len(a) != Z.d:
        raise ValueError("need one scale per matrix")
    Q, m = _family_for(a)
    M = [np.kron(z, q) for z, q in zip(Z, Q)]
    pairs = [[i, j] for i in range(Z.d) for j in range(Z.d) if i != j]
    specs = [
        ("hermitian", claim_bound, {}),
        ("annihilating", claim_bound, {"pairs": pairs}),
        ("norm_bound", claim_bound, {"bounds": list(a.values)}),
        ("compression", claim_bound, {}),
    ]
    return DilationCertificate.build("orthogonal_family", Z, M, _first_coordinate(Z.n, m), specs,
                                     certified_scale=list(a.values))


# --- positive scaling ---------------------------------------------------------

def _group_sizes(tuples):
    return [as_tuple(t).d for t in tuples]


def _check_groups(tuples, bodies, tol):
    tuples = [as_tuple(t).dense() for t in tuples]
    if len(tuples) != len(bodies):
        raise ValueError("need one body per group")
    n = tuples[0].n
    for t, K in zip(tuples, bodies):
        if t.n != n:
            raise ValueError("all groups must act on the same space")
        pts = spectrum_points(t)
        if pts.shape[1] != K.ambient_dim:
            raise BodyError("group dimension does not match its body")
        for p in pts:
            if not member(K, p, tol):
                raise ValueError(f"joint eigenvalue {p} lies outside its body")
    return tuples


def positive_scaling_dilation(tuples, bodies, a, tol: float = 1e-8,
                              claim_bound: float = DEFAULT_BOUND) -> DilationCertificate:
    """N^[i]_j = M^[i]_j (tensor) Q_i for commuting normal groups M^[i].

    Groups share one space but need not commute with each other; the
    products Q_i Q_l = 0 make the conjoined output commute.
    """
    tuples = _check_groups(tuples, bodies, tol)
    for K in bodies:
        if not member(K, np.zeros(K.ambient_dim), tol):
            raise BodyError("0 must lie in every body")
    a = a if isinstance(a, ScaleVector) else ScaleVector(a)
    if len(a) != len(tuples):
        raise ValueError("need one scale per group")
    Q, m = _family_for(a)
    N = [np.kron(M, q) for t, q in zip(tuples, Q) for M in t]
    X = [M for t in tuples for M in t]
    n = tuples[0].n
    args = {"bodies": [body_to_json(K) for K in bodies], "sizes": _group_sizes(tuples),
            "scales": list(a.values)}
    specs = [
        ("commuting", claim_bound, {}),
        ("normal", claim_bound, {}),
        ("compression", claim_bound, {}),
        ("spectrum_in_one_group", claim_bound, args),
    ]
    return DilationCertificate.build("positive_scaling", X, N, _first_coordinate(n, m), specs,
                                     certified_scale=list(a.values))


# --- SD projection dilations --------------------------------------------------

def _is_pvm(P, tol):
    for i, p in enumerate(P):
        if op_norm(p @ p - p) > tol or hermitian_residual(p) > tol:
            return False
        for q in P[i + 1:]:
            if op_norm(p @ q) > tol:
                return False
    return True


def sd_projection_dilation(groups, a, tol: float = 1e-9,
                           claim_bound: float = DEFAULT_BOUND) -> DilationCertificate:
    """Commuting projection-type dilation of groups of PSD contractions.

    Each group is dilated to orthogonal projections (Naimark, skipped when
    the group is already projective), all groups are rotated onto a common
    isometry, and Q^[i]_k = Pi^[i]_k (tensor) Q_i with Q_i from q_family(a).
    """
    groups = [[np.array(to_dense(p), dtype=complex, ndmin=2) for p in g] for g in groups]
    a = a if isinstance(a, ScaleVector) else ScaleVector(a)
    if len(a) != len(groups):
        raise ValueError("need one scale per group")
    n = groups[0][0].shape[0]
    dil = []
    for g in groups:
        if any(p.shape != (n, n) for p in g):
            raise ValueError("all operators must act on the same space")
        if _is_pvm(g, tol):
            dil.append((np.eye(n, dtype=complex), [p.copy() for p in g]))
        else:
            V, Pi = naimark(g, tol)
            dil.append((V.V, Pi[:len(g)]))
    D = max(V.shape[0] for V, _ in dil)
    padded = []
    for V, Pi in dil:
        m = V.shape[0]
        Vp = np.vstack([V, np.zeros((D - m, n))])
        Pp = [np.pad(p, ((0, D - m), (0, D - m))) for p in Pi]
        padded.append((Vp, Pp))
    U1 = complete_to_unitary(padded[0][0])
    V1 = padded[0][0]
    projections = []
    for gi, (V, Pi) in enumerate(padded):
        if gi == 0:
            projections.append(Pi)
            continue
        W = U1 @ complete_to_unitary(V).conj().T
        projections.append([W @ p @ W.conj().T for p in Pi])
    fam_Q, m = _family_for(a)
    Q, X, idx, k = [], [], [], 0
    for Pi, q, g, ai in zip(projections, fam_Q, groups, a):
        idx.append(list(range(k, k + len(Pi))))
        k += len(Pi)
        Q += [np.kron(p, q) for p in Pi]
        X += g
    values = [[-ai, 0.0, ai] for Pi, ai in zip(projections, a) for _ in Pi]
    within = [[i, j] for g in idx for i in g for j in g if i != j]
    specs = [
        ("eigenvalues_in", claim_bound, {"values": values}),
        ("commuting", claim_bound, {}),
        ("annihilating", claim_bound, {"pairs": within}),
        ("finite_dimension", claim_bound, {"dim": D * m}),
        ("compression", claim_bound, {}),
    ]
    return DilationCertificate.build("sd_projection", X, Q, np.kron(V1, _first_coordinate(1, m)),
                                     specs, certified_scale=list(a.values))


def symmetric_sd_dilation(tuples, bodies, a, tol: float = 1e-8,
                          claim_bound: float = DEFAULT_BOUND) -> DilationCertificate:
    """Normal dilation with joint spectrum in prod a_i K_i for symmetric K_i.

    Each group is split into joint eigenprojections P^[i]_k with eigenvalues
    lambda^[i]_k; these projections go through sd_projection_dilation and
    M^[i]_j = sum_k lambda^[i]_{j,k} Q^[i]_k.
    """
    tuples = _check_groups(tuples, bodies, tol)
    for t in tuples:
        if not t.is_hermitian():
            raise ValueError("symmetric_sd_dilation needs Hermitian groups")
    for K in bodies:
        if not is_symmetric(K):
            raise BodyError("every body must satisfy K = -K")
    a = a if isinstance(a, ScaleVector) else ScaleVector(a)
    split = [joint_eigenprojections(t) for t in tuples]
    proj = sd_projection_dilation([[P for _, P in s] for s in split], a, tol)
    Qs = list(proj.dilation)
    M, k = [], 0
    for s, t in zip(split, tuples):
        Qg = Qs[k:k + len(s)]
        k += len(s)
        for j in range(t.d):
            M.append(sum(lam[j].real * q for (lam, _), q in zip(s, Qg)))
    X = [m for t in tuples for m in t]
    sizes = _group_sizes(tuples)
    prod_body = product([scaled(K, ai) for K, ai in zip(bodies, a)])
    specs = [
        ("hermitian", claim_bound, {}),
        ("commuting", claim_bound, {}),
        ("normal", claim_bound, {}),
        ("spectrum_in_scaled_groups", claim_bound,
         {"bodies": [body_to_json(K) for K in bodies], "sizes": sizes, "scales": list(a.values)}),
        ("spectrum_in_body", claim_bound, {"body": body_to_json(prod_body)}),
        ("compression", claim_bound, {}),
    ]
    return DilationCertificate.build("symmetric_sd", X, M, proj.isometry, specs,
                                     certified_scale=list(a.values))


# --- contraction pipeline -----------------------------------------------------

def averaged_unitaries(T) -> list[np.ndarray]:
    """S_j = (1/d) sum_k w^{jk} U_k, j = 1..d, with U_k the Halmos unitaries."""
    T = as_tuple(T).dense()
    d = T.d
    U = [halmos_matrix(t, 1.0) for t in T]
    w = np.exp(2j * np.pi / d)
    return [sum(w ** (j * k) * U[k - 1] for k in range(1, d + 1)) / d for j in range(1, d + 1)]


def contraction_normal_dilation(T, claim_bound: float = DEFAULT_BOUND) -> DilationCertificate:
    """Commuting normal dilation of d contractions with ||N_j|| <= 2d."""
    T = as_tuple(T).dense()
    d, n = T.d, T.n
    for t in T:
        if op_norm(t) > 1 + 1e-9:
            raise ValueError("contraction_normal_dilation needs ||T_i|| <= 1")
    if d == 1:
        specs = [("unitary", claim_bound, {"scale": 1.0}), ("normal", claim_bound, {}),
                 ("compression", claim_bound, {})]
        return DilationCertificate.build("contraction_normal", T, [halmos_matrix(T[0])],
                                         Isometry.first_block(2 * n, n), specs, certified_scale=1.0)
    S = averaged_unitaries(T)
    herm = []
    for s in S:
        herm += [hermitian_part(s), imaginary_part(s)]
    od = orthogonal_family_dilation(herm, [2.0 * d] * (2 * d), claim_bound)
    Hm = list(od.dilation)
    Mp = [Hm[2 * j] + 1j * Hm[2 * j + 1] for j in range(d)]
    w = np.exp(2j * np.pi / d)
    N = [sum(w ** (-j * m) * Mp[j - 1] for j in range(1, d + 1)) for m in range(1, d + 1)]
    V = od.isometry.V @ Isometry.first_block(2 * n, n).V
    specs = [
        ("isometry", claim_bound, {}),
        ("averaging_identity", 1e-10, {}),
        ("dft_inversion", 1e-10, {}),
        ("commuting", claim_bound, {}),
        ("normal", claim_bound, {}),
        ("compression", claim_bound, {}),
        ("norm_bound", claim_bound, {"bounds": [2.0 * d] * d}),
    ]
    return DilationCertificate.build("contraction_normal", T, N, V, specs, certified_scale=2.0 * d,
                                     notes=[SCALE_NOTE])


def remark_witness() -> float:
    """||T_1 + T_2*|| for T = (E12, E21): equals 2, so no scale below 2 works
    for every pair of contractions."""
    E12 = np.array([[0, 1], [0, 0]], dtype=complex)
    E21 = E12.T.copy()
    return op_norm(E12 + E21.conj().T)
