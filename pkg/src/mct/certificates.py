"""Dilation certificates and the claim checks that back them.

A certificate stores the input tuple, the dilation, the isometry and a list
of named claims.  Each claim name maps to a check that recomputes its
residual from those raw matrices, so verification never trusts stored
numbers.  Claim arguments are kept JSON-ready.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from . import io
from .bodies import ConvexBody, body_from_json, distance
from .linalg import (
    PAULI_Z,
    Isometry,
    MatrixTuple,
    as_tuple,
    commuting_normal_residual,
    compress,
    hermitian_residual,
    kron_power,
    max_anticommutator,
    max_commutator,
    normality_residual,
    op_norm,
    residual_norm,
    to_dense,
)

DEFAULT_BOUND = 1e-8


class CertificateError(RuntimeError):
    pass


@dataclass
class Claim:
    name: str
    residual: float
    bound: float
    args: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.residual <= self.bound


Check = Callable[[MatrixTuple, MatrixTuple, np.ndarray, dict], float]
CHECKS: dict[str, Check] = {}


def check(name: str):
    def register(fn):
        CHECKS[name] = fn
        return fn
    return register


def _eye_like(M):
    n = M.shape[0]
    return sp.identity(n, dtype=complex, format="csr") if sp.issparse(M) else np.eye(n)


@check("isometry")
def _isometry(X, N, V, args):
    return op_norm(V.conj().T @ V - np.eye(V.shape[1]))


@check("compression")
def _compression(X, N, V, args):
    C = compress(V, N)
    return max(op_norm(c - x) for c, x in zip(C, X))


@check("hermitian")
def _hermitian(X, N, V, args):
    return max(hermitian_residual(M) for M in N)


@check("commuting")
def _commuting(X, N, V, args):
    return max_commutator(N.matrices)


@check("normal")
def _normal(X, N, V, args):
    return normality_residual(N.matrices)


@check("anticommuting")
def _anticommuting(X, N, V, args):
    return max_anticommutator(N.matrices)


@check("unitary")
def _unitary(X, N, V, args):
    s = args.get("scale", 1.0)
    res = 0.0
    for M in N:
        U = M / s
        I = _eye_like(U)
        res = max(res, residual_norm(U.conj().T @ U - I), residual_norm(U @ U.conj().T - I))
    return res


@check("squares_scalar")
def _squares(X, N, V, args):
    scales = args["scales"]
    return max(residual_norm(M @ M - (s * s) * _eye_like(M)) for M, s in zip(N, scales))


@check("norm_bound")
def _norm_bound(X, N, V, args):
    bounds = args["bounds"]
    return max(max(0.0, op_norm(M) - b) for M, b in zip(N, bounds))


@check("eigenvalues_in")
def _eigenvalues_in(X, N, V, args):
    """Each N_j Hermitian with eigenvalues in the finite set args['values'][j]."""
    res = 0.0
    for M, allowed in zip(N, args["values"]):
        M = to_dense(M)
        res = max(res, hermitian_residual(M))
        w = np.linalg.eigvalsh((M + M.conj().T) / 2)
        allowed = np.asarray(allowed, dtype=float)
        res = max(res, float(np.max(np.min(np.abs(w[:, None] - allowed[None, :]), axis=1))))
    return res


@check("annihilating")
def _annihilating(X, N, V, args):
    res = 0.0
    for i, j in args["pairs"]:
        res = max(res, residual_norm(N[i] @ N[j]))
    return res


@check("finite_dimension")
def _finite_dimension(X, N, V, args):
    return 0.0 if N.n == args.get("dim", N.n) and math.isfinite(N.n) else math.inf


def _points(N):
    from .matrix_convex import SpectrumError, spectrum_points
    try:
        return spectrum_points(N)
    except SpectrumError:
        return None


@check("spectrum_in_vertices")
def _spectrum_in_vertices(X, N, V, args):
    pts = _points(N)
    if pts is None:
        return math.inf
    verts = np.asarray(args["vertices"], dtype=float)
    return float(max(np.min(np.linalg.norm(verts - p, axis=1)) for p in pts))


@check("spectrum_in_body")
def _spectrum_in_body(X, N, V, args):
    pts = _points(N)
    if pts is None:
        return math.inf
    K = body_from_json(args["body"])
    return float(max(distance(K, p) for p in pts))


def _group_slices(sizes):
    out, off = [], 0
    for s in sizes:
        out.append(slice(off, off + s))
        off += s
    return out


@check("spectrum_in_scaled_groups")
def _spectrum_in_scaled_groups(X, N, V, args):
    """Every joint eigenvalue, cut into groups, has group i inside a_i K_i."""
    pts = _points(N)
    if pts is None:
        return math.inf
    bodies = [body_from_json(b) for b in args["bodies"]]
    res = 0.0
    for p in pts:
        for sl, K, a in zip(_group_slices(args["sizes"]), bodies, args["scales"]):
            res = max(res, distance(K, p[sl] / a) * a)
    return res


@check("spectrum_in_one_group")
def _spectrum_in_one_group(X, N, V, args):
    """Every joint eigenvalue is zero outside one group, which lies in a_i K_i."""
    pts = _points(N)
    if pts is None:
        return math.inf
    bodies = [body_from_json(b) for b in args["bodies"]]
    slices = _group_slices(args["sizes"])
    res = 0.0
    for p in pts:
        best = math.inf
        for i, (sl, K, a) in enumerate(zip(slices, bodies, args["scales"])):
            rest = np.concatenate([p[s] for k, s in enumerate(slices) if k != i] or [np.zeros(0)])
            err = distance(K, p[sl] / a) * a + (np.linalg.norm(rest) if rest.size else 0.0)
            best = min(best, err)
        res = max(res, best)
    return res


@check("witness_anticommutes")
def _witness(X, N, V, args):
    k = args["z_factors"]
    res = 0.0
    for w in args["witnesses"]:
        W = np.kron(kron_power(PAULI_Z, k), io.matrix_from_json(w))
        if any(sp.issparse(M) for M in N):
            W = sp.csr_matrix(W)
        for M in N:
            res = max(res, residual_norm(W @ M + M @ W))
    return res


@check("averaging_identity")
def _averaging_identity(X, N, V, args):
    from .dilations import averaged_unitaries
    S = averaged_unitaries(X)
    n = S[0].shape[0]
    A = sum(s @ s.conj().T for s in S)
    B = sum(s.conj().T @ s for s in S)
    return max(op_norm(A - np.eye(n)), op_norm(B - np.eye(n)))


@check("dft_inversion")
def _dft_inversion(X, N, V, args):
    from .dilations import averaged_unitaries, halmos_matrix
    S = averaged_unitaries(X)
    d = len(S)
    w = np.exp(2j * np.pi / d)
    res = 0.0
    for n_, T in enumerate(X, start=1):
        U = halmos_matrix(T, 1.0)
        back = sum(w ** (-j * n_) * S[j - 1] for j in range(1, d + 1))
        res = max(res, op_norm(back - U))
    return res


@check("commuting_normal")
def _commuting_normal(X, N, V, args):
    return commuting_normal_residual(N.matrices)


def evaluate(name, X, N, V, args) -> float:
    if name not in CHECKS:
        raise CertificateError(f"unknown claim {name!r}")
    return float(CHECKS[name](X, N, V, args))


@dataclass
class DilationCertificate:
    kind: str
    input: MatrixTuple
    dilation: MatrixTuple
    isometry: Isometry
    claims: list[Claim]
    certified_scale: object = None
    conclusion: str = ""
    notes: list[str] = field(default_factory=list)
    extras: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, kind, X, N, V, specs, **kw) -> "DilationCertificate":
        """Evaluate every (name, bound, args) spec and refuse if one fails."""
        X, N = as_tuple(X), as_tuple(N)
        Vm = V.V if isinstance(V, Isometry) else np.asarray(V, dtype=complex)
        claims = []
        for spec in specs:
            name, bound, args = (spec + ({},))[:3] if len(spec) == 2 else spec
            claims.append(Claim(name, evaluate(name, X, N, Vm, args), bound, args))
        cert = cls(kind, X, N, Isometry(Vm), claims, **kw)
        bad = [c for c in claims if not c.holds]
        if bad:
            detail = ", ".join(f"{c.name}={c.residual:.2e}>{c.bound:.0e}" for c in bad)
            raise CertificateError(f"{kind}: claims failed: {detail}")
        return cert

    def claim(self, name: str) -> Claim:
        for c in self.claims:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def max_residual(self) -> float:
        return max(c.residual for c in self.claims)

    def verify(self, tol: float | None = None) -> list[Claim]:
        """Recompute every claim; returns fresh claims (bound overridden by tol)."""
        out = []
        for c in self.claims:
            r = evaluate(c.name, self.input, self.dilation, self.isometry.V, c.args)
            out.append(Claim(c.name, r, c.bound if tol is None else tol, c.args))
        return out

    def verified(self, tol: float | None = None) -> bool:
        return all(c.holds for c in self.verify(tol))


def certificate_to_json(cert: DilationCertificate) -> dict:
    scale = cert.certified_scale
    if isinstance(scale, np.ndarray):
        scale = scale.tolist()
    elif scale is not None and not isinstance(scale, (int, float, list)):
        scale = list(scale)
    return {
        "kind": cert.kind,
        "input": io.tuple_to_json(cert.input),
        "dilation": io.tuple_to_json(cert.dilation),
        "isometry": io.matrix_to_json(cert.isometry.V),
        "claims": [{"name": c.name, "residual": c.residual, "bound": c.bound, "args": c.args}
                   for c in cert.claims],
        "certified_scale": scale,
        "conclusion": cert.conclusion,
        "notes": list(cert.notes),
    }


def certificate_from_json(obj) -> DilationCertificate:
    try:
        claims = [Claim(c["name"], float(c.get("residual", math.nan)), float(c.get("bound", DEFAULT_BOUND)),
                        c.get("args", {})) for c in obj["claims"]]
        X = io.tuple_from_json(obj["input"])
        N = io.tuple_from_json(obj["dilation"])
        V = Isometry(io.matrix_from_json(obj["isometry"]), tol=1e-6)
    except (KeyError, TypeError) as exc:
        raise io.FormatError(f"malformed certificate JSON: {exc}") from exc
    except ValueError as exc:
        raise io.FormatError(f"certificate does not parse: {exc}") from exc
    for c in claims:
        if c.name not in CHECKS:
            raise io.FormatError(f"certificate has unknown claim {c.name!r}")
    return DilationCertificate(obj.get("kind", "unknown"), X, N, V, claims,
                               obj.get("certified_scale"), obj.get("conclusion", ""),
                               obj.get("notes", []))


def body_arg(K: ConvexBody) -> dict:
    from .bodies import body_to_json
    return body_to_json(K)
