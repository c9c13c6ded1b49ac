"""Compact convex bodies: supports, gauges, membership, products and θ.

V-representation is canonical.  Facets are enumerated exactly only in
ambient dimension <= 3; named polytopes (cube, simplex, diamond, boxes)
carry closed-form facets in every dimension.  Complex bodies are stored as
real bodies in R^{2d}, coordinates ordered (Re z1, Im z1, Re z2, ...).
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.stats import norm as _normal, qmc

POLYTOPE_NAMES = ("cube", "simplex_standard", "diamond_standard", "interval_product")
NAMED_KINDS = POLYTOPE_NAMES + ("ball", "disk_product")
MAX_ENUMERATION_DIM = 3


class BodyError(ValueError):
    pass


@dataclass
class ConvexBody:
    ambient_dim: int
    kind: str
    vertices: np.ndarray | None = None
    facets: tuple[np.ndarray, np.ndarray] | None = None
    name: dict | None = None
    factors: tuple["ConvexBody", ...] = ()
    complex_flag: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- constructors ---------------------------------------------------------
    @classmethod
    def v_polytope(cls, vertices, prune: bool = True, tol: float = 1e-10) -> "ConvexBody":
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        if V.size == 0:
            raise BodyError("a v-polytope needs at least one vertex")
        if prune:
            V = V[extreme_point_indices(V, tol)]
        return cls(V.shape[1], "v_polytope", vertices=V)

    @classmethod
    def h_polytope(cls, A, b) -> "ConvexBody":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        if A.shape[0] != b.size:
            raise BodyError("facet normals and offsets disagree in number")
        body = cls(A.shape[1], "h_polytope", facets=(A, b))
        # boundedness + nonemptiness
        for i in range(body.ambient_dim):
            for s in (1.0, -1.0):
                e = np.zeros(body.ambient_dim)
                e[i] = s
                res = linprog(-e, A_ub=A, b_ub=b, bounds=[(None, None)] * body.ambient_dim,
                              method="highs")
                if res.status == 2:
                    raise BodyError("h-polytope is empty")
                if res.status == 3:
                    raise BodyError("h-polytope is unbounded")
        return body

    @classmethod
    def named(cls, type_: str, dim: int, **params) -> "ConvexBody":
        if type_ not in NAMED_KINDS:
            raise BodyError(f"unknown named body {type_!r}")
        name = {"type": type_, **params}
        complex_flag = False
        if type_ == "disk_product":
            radii = [float(r) for r in params["radii"]]
            name["radii"] = radii
            dim = 2 * len(radii)
            complex_flag = True
        elif type_ == "interval_product":
            bounds = [(float(lo), float(hi)) for lo, hi in params["bounds"]]
            if any(lo > hi for lo, hi in bounds):
                raise BodyError("interval with lower bound above upper bound")
            name["bounds"] = bounds
            dim = len(bounds)
        elif type_ == "ball":
            name.setdefault("radius", 1.0)
            c = params.get("center")
            name["center"] = [0.0] * dim if c is None else [float(v) for v in c]
        elif type_ == "cube":
            name.setdefault("half_width", 1.0)
        elif type_ in ("simplex_standard", "diamond_standard"):
            name.setdefault("scale", 1.0)
        return cls(int(dim), "named", name=name, complex_flag=complex_flag)

    @classmethod
    def ball(cls, dim: int, radius: float = 1.0, center=None):
        return cls.named("ball", dim, radius=float(radius), center=center)

    @classmethod
    def cube(cls, dim: int, half_width: float = 1.0):
        return cls.named("cube", dim, half_width=float(half_width))

    @classmethod
    def simplex(cls, dim: int, scale: float = 1.0):
        return cls.named("simplex_standard", dim, scale=float(scale))

    @classmethod
    def diamond(cls, dim: int, scale: float = 1.0):
        return cls.named("diamond_standard", dim, scale=float(scale))

    @classmethod
    def box(cls, bounds):
        return cls.named("interval_product", len(bounds), bounds=bounds)

    @classmethod
    def disks(cls, radii):
        return cls.named("disk_product", 2 * len(radii), radii=radii)

    # -- structure ------------------------------------------------------------
    @property
    def name_type(self) -> str | None:
        return self.name["type"] if self.name else None

    @property
    def is_polytope(self) -> bool:
        if self.kind in ("v_polytope", "h_polytope"):
            return True
        if self.kind == "named":
            return self.name_type in POLYTOPE_NAMES
        return all(f.is_polytope for f in self.factors)

    def vertex_array(self) -> np.ndarray:
        if "vertices" in self._cache:
            return self._cache["vertices"]
        V = _vertices(self)
        self._cache["vertices"] = V
        return V

    def facet_arrays(self):
        """(A, b) with K = {x : A x <= b}, or None when unavailable."""
        if "facets" not in self._cache:
            self._cache["facets"] = _facets(self)
        return self._cache["facets"]

    def __repr__(self):
        if self.kind == "named":
            return f"ConvexBody(named {self.name})"
        if self.kind == "v_polytope":
            return f"ConvexBody(v_polytope, dim={self.ambient_dim}, {len(self.vertices)} vertices)"
        if self.kind == "h_polytope":
            return f"ConvexBody(h_polytope, dim={self.ambient_dim}, {len(self.facets[1])} facets)"
        return f"ConvexBody(product of {len(self.factors)})"


# --- geometry helpers --------------------------------------------------------

def affine_hull(points: np.ndarray, tol: float = 1e-10):
    """(origin, basis) with basis columns spanning the affine hull directions."""
    origin = points[0]
    D = points - origin
    if D.shape[0] == 1 or np.abs(D).max() <= tol:
        return origin, np.zeros((points.shape[1], 0))
    _, s, vh = np.linalg.svd(D, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return origin, vh[:rank].T


def extreme_point_indices(points, tol: float = 1e-10) -> list[int]:
    """Indices of the extreme points of conv(points), in input order."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    # drop exact duplicates first (keep first occurrence)
    _, first = np.unique(np.round(P / max(tol, 1e-15)), axis=0, return_index=True)
    keep = sorted(int(i) for i in first)
    Q = P[keep]
    if len(keep) == 1:
        return keep
    origin, B = affine_hull(Q, tol)
    k = B.shape[1]
    coords = (Q - origin) @ B
    if k == 0:
        return keep[:1]
    if k == 1:
        c = coords[:, 0]
        return sorted({keep[int(np.argmin(c))], keep[int(np.argmax(c))]})
    hull = ConvexHull(coords)
    idx = set(int(i) for i in hull.vertices)
    if len(idx) > 64:
        return sorted(keep[i] for i in idx)
    # qhull may report points that lie on an edge; screen small hulls by LP
    out = []
    for i in sorted(idx):
        others = [j for j in idx if j != i]
        if not _in_hull_lp(coords[others], coords[i], tol):
            out.append(keep[i])
    return out


def _in_hull_lp(V, x, tol):
    m = V.shape[0]
    A_eq = np.vstack([V.T, np.ones((1, m))])
    b_eq = np.concatenate([x, [1.0]])
    res = linprog(np.zeros(m), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * m, method="highs")
    if res.status != 0:
        return False
    return np.abs(A_eq @ res.x - b_eq).max() <= 10 * tol


def _named_vertices(K: ConvexBody) -> np.ndarray:
    t, n, p = K.name_type, K.ambient_dim, K.name
    if t == "cube":
        return _box_vertices([(-p["half_width"], p["half_width"])] * n)
    if t == "interval_product":
        return _box_vertices(p["bounds"])
    if t == "simplex_standard":
        return np.vstack([np.zeros(n), p["scale"] * np.eye(n)])
    if t == "diamond_standard":
        return np.vstack([p["scale"] * np.eye(n), -p["scale"] * np.eye(n)])
    raise BodyError(f"{t} is not a polytope")


def _box_vertices(bounds):
    # first coordinate varies fastest
    rows = []
    for combo in itertools.product(*[(lo, hi) if hi > lo else (lo,) for lo, hi in reversed(bounds)]):
        rows.append(combo[::-1])
    return np.array(rows, dtype=float)


def _vertices(K: ConvexBody) -> np.ndarray:
    if K.kind == "v_polytope":
        return K.vertices
    if K.kind == "named":
        return _named_vertices(K)
    if K.kind == "h_polytope":
        A, b = K.facets
        x0 = _chebyshev_center(A, b)
        if x0 is None:
            raise BodyError("h-polytope has empty interior; vertex enumeration unsupported")
        hs = HalfspaceIntersection(np.hstack([A, -b[:, None]]), x0)
        pts = hs.intersections
        return pts[extreme_point_indices(pts, 1e-9)]
    if K.kind == "product":
        if not K.is_polytope:
            raise BodyError("product with a curved factor has no vertex list")
        blocks = [f.vertex_array() for f in K.factors]
        rows = []
        for combo in itertools.product(*reversed(blocks)):
            rows.append(np.concatenate(combo[::-1]))
        return np.array(rows)
    raise BodyError(f"cannot enumerate vertices of {K.kind}")


def _chebyshev_center(A, b):
    norms = np.linalg.norm(A, axis=1)
    n = A.shape[1]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.hstack([A, norms[:, None]]), b_ub=b,
                  bounds=[(None, None)] * n + [(0, None)], method="highs")
    if res.status != 0 or res.x[-1] <= 1e-12:
        return None
    return res.x[:n]


def _facets(K: ConvexBody):
    n = K.ambient_dim
    if K.kind == "h_polytope":
        return K.facets
    if K.kind == "named":
        t, p = K.name_type, K.name
        if t == "cube":
            I = np.eye(n)
            return np.vstack([I, -I]), np.full(2 * n, p["half_width"])
        if t == "interval_product":
            I = np.eye(n)
            lo = np.array([b[0] for b in p["bounds"]])
            hi = np.array([b[1] for b in p["bounds"]])
            return np.vstack([I, -I]), np.concatenate([hi, -lo])
        if t == "simplex_standard":
            return np.vstack([np.ones((1, n)), -np.eye(n)]), np.concatenate([[p["scale"]], np.zeros(n)])
        if t == "diamond_standard":
            if n > 16:
                return None
            signs = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
            return signs, np.full(len(signs), p["scale"])
        return None
    if K.kind == "product":
        parts = [f.facet_arrays() for f in K.factors]
        if any(p is None for p in parts):
            return None
        rows, rhs, off = [], [], 0
        for f, (A, b) in zip(K.factors, parts):
            blk = np.zeros((A.shape[0], n))
            blk[:, off:off + f.ambient_dim] = A
            rows.append(blk)
            rhs.append(b)
            off += f.ambient_dim
        return np.vstack(rows), np.concatenate(rhs)
    if K.kind == "v_polytope":
        V = K.vertices
        if n > MAX_ENUMERATION_DIM:
            return None
        if n == 1:
            return np.array([[1.0], [-1.0]]), np.array([V.max(), -V.min()])
        origin, B = affine_hull(V)
        if B.shape[1] < n:
            # lower-dimensional: hull facets inside the affine hull plus equalities
            N = _null_complement(B, n)
            rows = [N.T, -N.T]
            rhs = [N.T @ origin, -(N.T @ origin)]
            if B.shape[1] >= 1:
                coords = (V - origin) @ B
                if B.shape[1] == 1:
                    rows += [B.T, -B.T]
                    rhs += [np.array([coords.max() + B[:, 0] @ origin]),
                            np.array([-coords.min() - B[:, 0] @ origin])]
                else:
                    h = ConvexHull(coords)
                    Ah = h.equations[:, :-1] @ B.T
                    bh = -h.equations[:, -1] + Ah @ origin
                    rows.append(Ah)
                    rhs.append(bh)
            return np.vstack(rows), np.concatenate(rhs)
        h = ConvexHull(V)
        A = h.equations[:, :-1]
        b = -h.equations[:, -1]
        # merge coplanar duplicates
        key = np.round(np.hstack([A, b[:, None]]), 9)
        _, uniq = np.unique(key, axis=0, return_index=True)
        uniq = np.sort(uniq)
        return A[uniq], b[uniq]
    return None


def _null_complement(B, n):
    if B.shape[1] == 0:
        return np.eye(n)
    q, _ = np.linalg.qr(np.hstack([B, np.eye(n)]))
    return q[:, B.shape[1]:n]


# --- support, gauge, distance ------------------------------------------------

def support_function(K: ConvexBody, c) -> float:
    """max over x in K of <c, x>."""
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.size != K.ambient_dim:
        raise BodyError(f"direction has dimension {c.size}, body lives in R^{K.ambient_dim}")
    if K.kind == "v_polytope":
        return float(np.max(K.vertices @ c))
    if K.kind == "h_polytope":
        if K.ambient_dim <= MAX_ENUMERATION_DIM:
            try:
                return float(np.max(K.vertex_array() @ c))
            except BodyError:
                pass
        A, b = K.facets
        res = linprog(-c, A_ub=A, b_ub=b, bounds=[(None, None)] * K.ambient_dim, method="highs")
        if res.status != 0:
            raise BodyError("support LP failed: " + res.message)
        return float(-res.fun)
    if K.kind == "product":
        total, off = 0.0, 0
        for f in K.factors:
            total += support_function(f, c[off:off + f.ambient_dim])
            off += f.ambient_dim
        return total
    t, p = K.name_type, K.name
    if t == "ball":
        return float(c @ np.asarray(p["center"]) + p["radius"] * np.linalg.norm(c))
    if t == "cube":
        return float(p["half_width"] * np.abs(c).sum())
    if t == "diamond_standard":
        return float(p["scale"] * np.abs(c).max())
    if t == "simplex_standard":
        return float(p["scale"] * max(0.0, c.max()))
    if t == "interval_product":
        return float(sum(max(ci * lo, ci * hi) for ci, (lo, hi) in zip(c, p["bounds"])))
    if t == "disk_product":
        pairs = c.reshape(-1, 2)
        return float(sum(r * np.linalg.norm(pc) for r, pc in zip(p["radii"], pairs)))
    raise BodyError(f"no support function for {t}")


def gauge(K: ConvexBody, x, tol: float = 1e-12) -> float:
    """min{t >= 0 : x in tK}, finite exactly on the cone generated by K."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != K.ambient_dim:
        raise BodyError("point dimension does not match body")
    if np.abs(x).max(initial=0.0) <= tol:
        return 0.0
    if K.kind == "v_polytope":
        V = K.vertices
        m = V.shape[0]
        res = linprog(np.ones(m), A_eq=V.T, b_eq=x, bounds=[(0, None)] * m, method="highs")
        if res.status != 0:
            raise BodyError("point lies outside the cone generated by K")
        return float(res.fun)
    if K.kind == "h_polytope":
        A, b = K.facets
        ax = A @ x
        t = 0.0
        scale = max(1.0, np.abs(A).max())
        for ai, bi in zip(ax, b):
            if bi > tol * scale:
                t = max(t, ai / bi)
            elif bi < -tol * scale:
                raise BodyError("0 is not in K")
            elif ai > tol * scale * max(1.0, np.abs(x).max()):
                raise BodyError("point lies outside the cone generated by K")
        return float(t)
    if K.kind == "product":
        vals, off = [], 0
        for f in K.factors:
            vals.append(gauge(f, x[off:off + f.ambient_dim], tol))
            off += f.ambient_dim
        return float(max(vals))
    t, p = K.name_type, K.name
    if t == "ball":
        c = np.asarray(p["center"], dtype=float)
        r = p["radius"]
        a = r * r - c @ c
        if a <= 0:
            raise BodyError("0 is not an interior point of the ball")
        xc = x @ c
        return float((-xc + math.sqrt(xc * xc + a * (x @ x))) / a)
    if t == "cube":
        return float(np.abs(x).max() / p["half_width"])
    if t == "diamond_standard":
        return float(np.abs(x).sum() / p["scale"])
    if t == "simplex_standard":
        if x.min() < -tol:
            raise BodyError("point lies outside the cone generated by K")
        return float(np.clip(x, 0, None).sum() / p["scale"])
    if t == "interval_product":
        g = 0.0
        for xi, (lo, hi) in zip(x, p["bounds"]):
            if xi > tol:
                if hi <= 0:
                    raise BodyError("point lies outside the cone generated by K")
                g = max(g, xi / hi)
            elif xi < -tol:
                if lo >= 0:
                    raise BodyError("point lies outside the cone generated by K")
                g = max(g, xi / lo)
        return float(g)
    if t == "disk_product":
        pairs = x.reshape(-1, 2)
        return float(max(np.linalg.norm(pc) / r for r, pc in zip(p["radii"], pairs)))
    raise BodyError(f"no gauge for {t}")


def min_norm_point(P, tol: float = 1e-12, max_iter: int = 10_000) -> np.ndarray:
    """Point of smallest Euclidean norm in conv(rows of P) (Wolfe's method)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    scale = max(1.0, float(np.max(np.sum(P * P, axis=1))))
    j = int(np.argmin(np.sum(P * P, axis=1)))
    S = [j]
    lam = np.array([1.0])
    x = P[j].copy()
    for _ in range(max_iter):
        k = int(np.argmin(P @ x))
        if x @ x - x @ P[k] <= tol * scale or k in S:
            break
        S.append(k)
        lam = np.append(lam, 0.0)
        while True:
            Q = P[S]
            m = len(S)
            G = np.zeros((m + 1, m + 1))
            G[:m, :m] = Q @ Q.T
            G[:m, m] = 1.0
            G[m, :m] = 1.0
            rhs = np.zeros(m + 1)
            rhs[m] = 1.0
            mu = np.linalg.lstsq(G, rhs, rcond=None)[0][:m]
            if np.all(mu > 1e-14):
                lam = mu
                x = Q.T @ lam
                break
            mask = mu <= 1e-14
            denom = lam[mask] - mu[mask]
            ratios = np.where(denom > 0, lam[mask] / np.where(denom > 0, denom, 1), np.inf)
            theta = min(1.0, float(ratios.min()))
            lam = lam + theta * (mu - lam)
            keep = lam > 1e-14
            keep[int(np.argmax(lam))] = True
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = P[S].T @ lam
    return x


def _project_capped_simplex(x, s):
    """Euclidean projection onto {y >= 0, sum y <= s}."""
    y = np.clip(x, 0, None)
    if y.sum() <= s:
        return y
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - s
    idx = np.arange(1, len(u) + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    tau = css[rho] / (rho + 1)
    return np.clip(x - tau, 0, None)


def distance(K: ConvexBody, x) -> float:
    """Euclidean distance from x to K."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != K.ambient_dim:
        raise BodyError("point dimension does not match body")
    if K.kind == "named":
        t, p = K.name_type, K.name
        if t == "ball":
            return max(0.0, float(np.linalg.norm(x - np.asarray(p["center"]))) - p["radius"])
        if t == "cube":
            h = p["half_width"]
            return float(np.linalg.norm(x - np.clip(x, -h, h)))
        if t == "interval_product":
            lo = np.array([b[0] for b in p["bounds"]])
            hi = np.array([b[1] for b in p["bounds"]])
            return float(np.linalg.norm(x - np.clip(x, lo, hi)))
        if t == "simplex_standard":
            return float(np.linalg.norm(x - _project_capped_simplex(x, p["scale"])))
        if t == "diamond_standard":
            s = p["scale"]
            if np.abs(x).sum() <= s:
                return 0.0
            proj = np.sign(x) * _project_capped_simplex(np.abs(x), s)
            return float(np.linalg.norm(x - proj))
        if t == "disk_product":
            pairs = x.reshape(-1, 2)
            tot = 0.0
            for r, pc in zip(p["radii"], pairs):
                tot += max(0.0, float(np.linalg.norm(pc)) - r) ** 2
            return math.sqrt(tot)
    if K.kind == "product":
        tot, off = 0.0, 0
        for f in K.factors:
            tot += distance(f, x[off:off + f.ambient_dim]) ** 2
            off += f.ambient_dim
        return math.sqrt(tot)
    if K.kind == "h_polytope" and K.ambient_dim > 6:
        A, b = K.facets
        viol = (A @ x - b) / np.linalg.norm(A, axis=1)
        return float(max(0.0, viol.max()))
    V = K.vertex_array()
    return float(np.linalg.norm(min_norm_point(V - x)))


def member(K: ConvexBody, x, tol: float = 1e-9) -> bool:
    return distance(K, x) <= tol


# --- constructions -----------------------------------------------------------

def product(bodies: Sequence[ConvexBody]) -> ConvexBody:
    bodies = list(bodies)
    if not bodies:
        raise BodyError("empty product")
    if len(bodies) == 1:
        return bodies[0]
    dim = sum(b.ambient_dim for b in bodies)
    cplx = all(b.complex_flag for b in bodies)
    if all(b.is_polytope for b in bodies):
        body = ConvexBody(dim, "product", factors=tuple(bodies), complex_flag=cplx)
        return ConvexBody.v_polytope(body.vertex_array(), prune=False)
    return ConvexBody(dim, "product", factors=tuple(bodies), complex_flag=cplx)


def affine_image(L, K: ConvexBody, offset=None) -> ConvexBody:
    """Image of K under x -> L x + offset."""
    L = np.atleast_2d(np.asarray(L, dtype=float))
    offset = np.zeros(L.shape[0]) if offset is None else np.asarray(offset, dtype=float)
    if L.shape[1] != K.ambient_dim:
        raise BodyError("affine map does not match body dimension")
    if K.kind == "named" and K.name_type == "ball":
        s = np.linalg.svd(L, compute_uv=False)
        if L.shape[0] != L.shape[1] or s.max() - s.min() > 1e-12 * s.max():
            raise BodyError("balls only support similarity maps")
        c = L @ np.asarray(K.name["center"]) + offset
        return ConvexBody.ball(K.ambient_dim, K.name["radius"] * s[0], center=c)
    if K.kind == "h_polytope" and L.shape[0] == L.shape[1]:
        A, b = K.facets
        Li = np.linalg.inv(L)
        A2 = A @ Li
        return ConvexBody(K.ambient_dim, "h_polytope", facets=(A2, b + A2 @ offset))
    if not K.is_polytope:
        raise BodyError("affine images of curved bodies are limited to similarity maps of balls")
    V = K.vertex_array()
    return ConvexBody.v_polytope(V @ L.T + offset)


def scaled(K: ConvexBody, s: float) -> ConvexBody:
    """The dilate s*K, s > 0."""
    if s <= 0:
        raise BodyError("scale must be positive")
    if K.kind == "named":
        p = dict(K.name)
        t = p.pop("type")
        if t == "ball":
            p["radius"] *= s
            p["center"] = [s * v for v in p["center"]]
        elif t == "cube":
            p["half_width"] *= s
        elif t in ("simplex_standard", "diamond_standard"):
            p["scale"] *= s
        elif t == "interval_product":
            p["bounds"] = [(s * lo, s * hi) for lo, hi in p["bounds"]]
        elif t == "disk_product":
            p["radii"] = [s * r for r in p["radii"]]
        return ConvexBody.named(t, K.ambient_dim, **p)
    if K.kind == "v_polytope":
        return ConvexBody.v_polytope(s * K.vertices, prune=False)
    if K.kind == "h_polytope":
        A, b = K.facets
        return ConvexBody(K.ambient_dim, "h_polytope", facets=(A, s * b))
    return ConvexBody(K.ambient_dim, "product", factors=tuple(scaled(f, s) for f in K.factors),
                      complex_flag=K.complex_flag)


def is_symmetric(K: ConvexBody, tol: float = 1e-9) -> bool:
    """K == -K (vertex check for polytopes, closed form for named bodies)."""
    if K.kind == "named":
        t = K.name_type
        if t == "ball":
            return bool(np.abs(K.name["center"]).max(initial=0) <= tol)
        if t == "interval_product":
            return all(abs(lo + hi) <= tol for lo, hi in K.name["bounds"])
        return t in ("cube", "diamond_standard", "disk_product")
    if K.kind == "product":
        return all(is_symmetric(f, tol) for f in K.factors)
    V = K.vertex_array()
    return all(member(K, -v, tol) for v in V)


# --- directions and Hausdorff distance ---------------------------------------

def sphere_directions(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic, well spread unit vectors in R^dim.

    dim 2 uses equally spaced angles starting at (1, 0); dim 3 a Fibonacci
    lattice; higher dims a scrambled Sobol set pushed through the Gaussian
    quantile.  For dim >= 3 the signed coordinate vectors come first.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        th = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(th), np.sin(th)])
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    rest = max(0, count - len(axes))
    if dim == 3:
        rng = np.random.default_rng(seed)
        shift = rng.uniform()
        i = np.arange(rest) + 0.5
        z = 1 - 2 * i / max(rest, 1)
        phi = 2 * np.pi * (i * (np.sqrt(5) - 1) / 2 + shift)
        r = np.sqrt(np.clip(1 - z * z, 0, None))
        pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    else:
        m = 1 << max(1, math.ceil(math.log2(max(rest, 2))))
        u = qmc.Sobol(d=dim, scramble=True, seed=seed).random(m)[:rest]
        pts = _normal.ppf(np.clip(u, 1e-12, 1 - 1e-12))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return np.vstack([axes, pts])[:max(count, len(axes))]


def hausdorff_by_support(h_a, h_b, dirs) -> float:
    """max |h_A(u) - h_B(u)| over the given unit directions.

    Exact Hausdorff distance of convex bodies when dirs covers the sphere;
    a lower bound otherwise.
    """
    return float(max(abs(h_a(u) - h_b(u)) for u in dirs))


# --- θ for simplex-pointed polytopes -----------------------------------------

@dataclass
class ThetaResult:
    theta: float
    simplex: ConvexBody
    scales: np.ndarray
    basis_gauges: np.ndarray


def _theta_feasible(V, gam, C, margin):
    d = V.shape[1]
    res = linprog(np.zeros(d), A_ub=V, b_ub=np.ones(len(V)) + margin,
                  bounds=[(g / C - margin, 1.0 + margin) for g in gam], method="highs",
                  options={"primal_feasibility_tolerance": 1e-10})
    if res.status != 0:
        return None
    # the solver's own feasibility slack is ~1e-10; re-check in exact terms
    u = np.clip(res.x, gam / C, 1.0)
    return u if np.max(V @ u) <= 1.0 + margin else None


def theta_simplex_pointed(K: ConvexBody, tol: float = 1e-9, lp_margin: float = 1e-12) -> ThetaResult:
    """Minimal C with K ⊆ Π ⊆ C·K for a simplex Π = conv(0, s_i e_i), s_i >= 1.

    K must lie in the nonnegative orthant, contain 0 and the standard basis
    vectors (simplex-pointed at 0 with standard vector data).
    """
    V = K.vertex_array()
    d = K.ambient_dim
    if V.min() < -tol:
        raise BodyError("K is not contained in [0, inf)^d")
    if not member(K, np.zeros(d), tol):
        raise BodyError("0 is not a point of K")
    gam = np.array([gauge(K, e) for e in np.eye(d)])
    if np.any(gam > 1 + tol) or np.any(gam <= 0):
        raise BodyError("simplex-pointed premise violated: standard simplex not inside K")
    lo, hi = 1.0, 2.0
    if _theta_feasible(V, gam, lo, lp_margin) is not None:
        hi = lo
    else:
        while _theta_feasible(V, gam, hi, lp_margin) is None:
            lo, hi = hi, 2 * hi
            if hi > 1e12:
                raise BodyError("θ bisection failed to bracket")
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _theta_feasible(V, gam, mid, lp_margin) is None:
                lo = mid
            else:
                hi = mid
    C = hi
    u = gam / C
    if np.max(V @ u) > 1 + lp_margin:
        u = _theta_feasible(V, gam, C, lp_margin)
    s = 1.0 / u
    simplex = ConvexBody.v_polytope(np.vstack([np.zeros(d), np.diag(s)]), prune=False)
    # post-hoc containment checks
    viol_in = float(np.max(V @ u) - 1.0)
    viol_out = float(max(gauge(K, si * e) for si, e in zip(s, np.eye(d))) - C)
    if viol_in > 1e-9 or viol_out > tol + 1e-12:
        raise BodyError(f"θ witness failed verification ({viol_in:.2e}, {viol_out:.2e})")
    return ThetaResult(float(C), simplex, s, gam)


# --- scale vectors -----------------------------------------------------------

class ScaleClass(str, enum.Enum):
    HARMONIC_FEASIBLE = "harmonic_feasible"
    SQUARE_FEASIBLE_ONLY = "square_feasible_only"
    INFEASIBLE = "infeasible"


class SDVerdict(str, enum.Enum):
    SD_CERTIFIED = "SD_certified"
    NOT_SD_CERTIFIED = "not_SD_certified"
    UNKNOWN = "unknown"


SCALE_SLACK = 1e-12


@dataclass(frozen=True)
class ScaleVector:
    values: tuple[float, ...]

    def __init__(self, values):
        vals = tuple(float(v) for v in np.atleast_1d(np.asarray(values, dtype=float)))
        if not vals or min(vals) <= 0 or not all(math.isfinite(v) for v in vals):
            raise ValueError("scales must be finite and strictly positive")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @property
    def harmonic_sum(self) -> float:
        return math.fsum(1.0 / a for a in self.values)

    @property
    def square_sum(self) -> float:
        return math.fsum(1.0 / (a * a) for a in self.values)

    @property
    def classification(self) -> ScaleClass:
        if self.harmonic_sum <= 1 + SCALE_SLACK:
            return ScaleClass.HARMONIC_FEASIBLE
        if self.square_sum <= 1 + SCALE_SLACK:
            return ScaleClass.SQUARE_FEASIBLE_ONLY
        return ScaleClass.INFEASIBLE

    def shrunk_to_harmonic_equality(self) -> "ScaleVector":
        """Proportional shrink so that sum 1/a_i = 1 (requires sum <= 1)."""
        h = self.harmonic_sum
        if h > 1 + SCALE_SLACK:
            raise ValueError("cannot shrink scales with sum 1/a_i > 1")
        return ScaleVector([a * h for a in self.values])

    @classmethod
    def uniform(cls, value: float, d: int) -> "ScaleVector":
        return cls([value] * d)


def sd_classify(a) -> SDVerdict:
    a = a if isinstance(a, ScaleVector) else ScaleVector(a)
    cls = a.classification
    if cls is ScaleClass.HARMONIC_FEASIBLE:
        return SDVerdict.SD_CERTIFIED
    if cls is ScaleClass.INFEASIBLE:
        return SDVerdict.NOT_SD_CERTIFIED
    return SDVerdict.UNKNOWN


# --- JSON ---------------------------------------------------------------------

def body_to_json(K: ConvexBody) -> dict:
    out = {"dim": K.ambient_dim, "kind": K.kind, "complex": K.complex_flag}
    if K.kind == "v_polytope":
        out["vertices"] = K.vertices.tolist()
        out["pruned"] = True
    elif K.kind == "h_polytope":
        A, b = K.facets
        out["facets"] = [{"a": a.tolist(), "b": float(bi)} for a, bi in zip(A, b)]
    elif K.kind == "named":
        out["name"] = {k: (list(map(list, v)) if k == "bounds" else v) for k, v in K.name.items()}
    else:
        out["factors"] = [body_to_json(f) for f in K.factors]
    return out


def body_from_json(obj: dict) -> ConvexBody:
    try:
        kind = obj["kind"]
        dim = int(obj["dim"])
        if kind == "v_polytope":
            # vertices we wrote ourselves are already extreme
            K = ConvexBody.v_polytope(obj["vertices"], prune=not obj.get("pruned", False))
        elif kind == "h_polytope":
            facets = obj["facets"]
            K = ConvexBody.h_polytope([f["a"] for f in facets], [f["b"] for f in facets])
        elif kind == "named":
            p = dict(obj["name"])
            t = p.pop("type")
            K = ConvexBody.named(t, dim, **p)
        elif kind == "product":
            K = product([body_from_json(f) for f in obj["factors"]])
        else:
            raise BodyError(f"unknown body kind {kind!r}")
    except (KeyError, TypeError) as exc:
        raise BodyError(f"malformed body JSON: {exc}") from exc
    if K.ambient_dim != dim:
        raise BodyError(f"body JSON says dim {dim} but data has dim {K.ambient_dim}")
    return K
