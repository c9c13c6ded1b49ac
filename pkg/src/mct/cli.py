"""mct: generate tuples, build dilation certificates and check them.

Exit codes: 0 success or member, 1 checked false or non-member,
2 unknown or inconclusive, 3 input or premise error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io
from .anticommuting import (
    anticommuting_dilation,
    clifford_generators,
    cube_ball_certificate,
    symmetry_normalize,
)
from .bodies import (
    BodyError,
    ConvexBody,
    SDVerdict,
    ScaleVector,
    body_from_json,
    body_to_json,
    sd_classify,
    theta_simplex_pointed,
)
from .certificates import CertificateError, certificate_from_json, certificate_to_json
from .dilations import (
    SCALE_NOTE,
    contraction_normal_dilation,
    halmos,
    orthogonal_family_dilation,
    positive_scaling_dilation,
    sd_projection_dilation,
    symmetric_sd_dilation,
)
from .linalg import (
    DEFAULT_TOL,
    MatrixTuple,
    commuting_normal_residual,
    max_anticommutator,
    max_commutator,
    op_norm,
    random_contraction,
    random_hermitian,
)
from .matrix_convex import SpectrumError, level1_range, matrix_range_of_normal, wmax_membership, \
    wmin_certificate_simplex
from .pathology import (
    ball_covering_tuple,
    minimal_normal_tuple,
    minimality_report,
    simplex_surprise_tuple,
    staircase_deviation,
    staircase_normal_tuple,
)

EXIT_OK, EXIT_FALSE, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _floats(text):
    if text is None:
        return None
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated reals, got {text!r}") from exc


def _ints(text):
    return None if text is None else [int(x) for x in text.split(",") if x.strip()]


def _need(args, name):
    val = getattr(args, name)
    if val is None or val == []:
        raise InputError(f"--{name.replace('_', '-')} is required here")
    return val


def _body(args, index=None):
    paths = _need(args, "body")
    if index is None:
        if len(paths) != 1:
            raise InputError("exactly one --body is expected")
        return body_from_json(io.load_json(paths[0]))
    return [body_from_json(io.load_json(p)) for p in paths]


def _tuple(args):
    return io.tuple_from_json(io.load_json(args.inp))


def _groups(T: MatrixTuple, sizes):
    if sizes is None:
        return [[M] for M in T]
    if sum(sizes) != T.d:
        raise InputError(f"--groups sizes add to {sum(sizes)}, tuple has {T.d} matrices")
    out, k = [], 0
    for s in sizes:
        out.append(list(T.matrices[k:k + s]))
        k += s
    return out


def _emit(obj, args):
    io.dump_json(obj, args.out)


# --- verbs --------------------------------------------------------------------

def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    kind = args.what
    if kind == "clifford":
        T = clifford_generators(_need(args, "d")).F
    elif kind == "example":
        name = args.name
        if name == "simplex-surprise":
            T = simplex_surprise_tuple(args.p if args.p is not None else 1.0, _need(args, "trunc"))
        elif name == "staircase":
            K = _body(args)
            T = staircase_normal_tuple(K, _need(args, "trunc"))
            print(f"deviation at truncation: {staircase_deviation(K, args.trunc):.6g}", file=sys.stderr)
        elif name == "ball-covering":
            res = ball_covering_tuple(_body(args), _need(args, "k"))
            T = res.tuple
            print(f"hausdorff(conv disks, K) = {res.hausdorff:.6g}", file=sys.stderr)
        elif name == "minimal-normal":
            T = minimal_normal_tuple(_body(args))
        else:
            raise InputError(f"unknown example {name!r}")
    elif kind == "contractions":
        n = args.n or 2
        T = MatrixTuple(random_contraction(n, rng, rng.uniform(0.1, 1.0)) for _ in range(_need(args, "d")))
    elif kind == "hermitian":
        n = args.n or 2
        T = MatrixTuple(random_hermitian(n, rng, rng.uniform(0.1, 1.0)) for _ in range(_need(args, "d")))
    else:
        raise InputError(f"unknown generator {kind!r}")
    _emit(io.tuple_to_json(T), args)
    return EXIT_OK


def cmd_dilate(args) -> int:
    T = _tuple(args)
    how = args.how
    scales = _floats(args.scales)
    if how == "contractions":
        cert = contraction_normal_dilation(T)
    elif how == "halmos":
        if T.d != 1:
            raise InputError("halmos takes a single matrix")
        cert = halmos(T[0], scales[0] if scales else 1.0)
    elif how == "orthogonal-family":
        cert = orthogonal_family_dilation(T, _need(args, "scales") and scales)
    elif how == "anticommuting":
        cert = anticommuting_dilation(T, scales or [T.d ** 0.5] * T.d)
    elif how == "symmetrize":
        cert = symmetry_normalize(T, _need(args, "scales") and scales)
    elif how == "cube-ball":
        cert = cube_ball_certificate(T, _need(args, "scales") and scales)
    elif how == "wmin-simplex":
        cert = wmin_certificate_simplex(T, _body(args))
    elif how == "positive-scaling":
        groups = _groups(T, _ints(args.groups))
        cert = positive_scaling_dilation(groups, _body(args, index=True), _need(args, "scales") and scales)
    elif how == "sd-projection":
        groups = _groups(T, _ints(args.groups))
        cert = sd_projection_dilation(groups, _need(args, "scales") and scales)
    elif how == "symmetric-sd":
        groups = _groups(T, _ints(args.groups))
        cert = symmetric_sd_dilation(groups, _body(args, index=True), _need(args, "scales") and scales)
    else:
        raise InputError(f"unknown dilation {how!r}")
    _emit(certificate_to_json(cert), args)
    print(f"{cert.kind}: dimension {cert.dilation.n}, max residual {cert.max_residual:.2e}", file=sys.stderr)
    return EXIT_OK


def cmd_check(args) -> int:
    what = args.what
    if what == "wmax":
        v = wmax_membership(_tuple(args), _body(args), args.directions, args.tol or 1e-9, args.seed)
        out = {"verdict": v.verdict, "margin": v.margin, "directions_checked": v.checked,
               "witness": None if v.witness is None else v.witness.tolist()}
        _emit(out, args)
        return {"member": EXIT_OK, "member_sampled": EXIT_OK, "non_member": EXIT_FALSE}.get(v.verdict, EXIT_UNKNOWN)
    if what == "sd":
        a = ScaleVector(_need(args, "scales") and _floats(args.scales))
        verdict = sd_classify(a)
        _emit({"verdict": verdict.value, "classification": a.classification.value,
               "harmonic_sum": a.harmonic_sum, "square_sum": a.square_sum}, args)
        return {SDVerdict.SD_CERTIFIED: EXIT_OK, SDVerdict.NOT_SD_CERTIFIED: EXIT_FALSE}.get(verdict, EXIT_UNKNOWN)
    if what == "minimality":
        rep = minimality_report(_tuple(args), _body(args))
        _emit({"verdict": rep.verdict, "margin": rep.margin, "notes": rep.notes,
               "normal_summand_dims": rep.normal_summand_dims,
               "vertex_eigenvectors": {str(list(k)): len(v) for k, v in rep.vertex_eigenvectors.items()}},
              args)
        return {"minimal_diagonal": EXIT_OK, "not_minimal": EXIT_FALSE}.get(rep.verdict, EXIT_UNKNOWN)
    if what == "normal":
        T = _tuple(args)
        res = commuting_normal_residual(T.matrices)
        tol = args.tol or 1e-8
        _emit({"commuting_normal_residual": res, "tol": tol}, args)
        return EXIT_OK if res <= tol else EXIT_FALSE
    raise InputError(f"unknown check {what!r}")


def cmd_theta(args) -> int:
    res = theta_simplex_pointed(_body(args), tol=args.tol or 1e-9)
    if args.out:
        io.dump_json({"theta": res.theta, "simplex_scales": res.scales.tolist(),
                      "simplex": body_to_json(res.simplex)}, args.out)
    print(repr(res.theta))
    return EXIT_OK


def cmd_range(args) -> int:
    T = _tuple(args)
    if args.normal:
        K = matrix_range_of_normal(T)
        _emit({"range": body_to_json(K)}, args)
        return EXIT_OK
    r = level1_range(T, args.directions, args.seed)
    _emit({"outer": body_to_json(r.outer), "inner": body_to_json(r.inner),
           "split_complex": r.split_complex}, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    cert = certificate_from_json(io.load_json(_need(args, "cert")))
    fresh = cert.verify(args.tol)
    ok = True
    for c in fresh:
        status = "ok" if c.holds else "FAIL"
        ok &= c.holds
        print(f"{status:4}  {c.name:28} residual {c.residual:.3e}  bound {c.bound:.1e}")
    if cert.conclusion and ok:
        print(cert.conclusion)
    return EXIT_OK if ok else EXIT_FALSE


def cmd_report(args) -> int:
    T = _tuple(args)
    rows = [("d", T.d), ("n", T.n), ("hermitian", all(T.hermitian_flags())),
            ("max norm", f"{T.max_norm():.6g}"),
            ("max commutator", f"{max_commutator(T.matrices):.3e}"),
            ("max anticommutator", f"{max_anticommutator(T.matrices):.3e}"),
            ("commuting normal residual", f"{commuting_normal_residual(T.matrices):.3e}")]
    for j, M in enumerate(T, 1):
        rows.append((f"||T_{j}||", f"{op_norm(M):.6g}"))
    if args.body:
        v = wmax_membership(T, _body(args), args.directions, args.tol or 1e-9, args.seed)
        rows.append(("wmax verdict", f"{v.verdict} (margin {v.margin:.3e})"))
    width = max(len(r[0]) for r in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}")
    if T.d > 1 and T.max_norm() <= 1 + 1e-9:
        print(f"{'normal dilation scale':<{width}}  {2 * T.d} certified; {SCALE_NOTE}")
    return EXIT_OK


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="inp", metavar="PATH", help="tuple JSON (default stdin)")
    common.add_argument("--out", metavar="PATH", help="output JSON (default stdout)")
    common.add_argument("--body", action="append", metavar="PATH", help="body JSON; repeat for groups")
    common.add_argument("--scales", metavar="A1,A2,...", help="comma-separated positive reals")
    common.add_argument("--tol", type=float, help="tolerance override")
    common.add_argument("--seed", type=int, default=DEFAULT_TOL.seed)
    common.add_argument("--directions", type=int, default=720, help="sampled directions")
    common.add_argument("--trunc", type=int, help="truncation size")
    common.add_argument("--p", type=float, help="decay exponent of the surprise family")
    common.add_argument("--d", type=int, help="number of operators")
    common.add_argument("--n", type=int, help="matrix size for random generators")
    common.add_argument("--k", type=int, help="disks per vertex for ball covering")
    common.add_argument("--groups", metavar="S1,S2,...", help="group sizes for product dilations")

    p = argparse.ArgumentParser(prog="mct", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a tuple")
    g.add_argument("what", choices=["clifford", "example", "contractions", "hermitian"])
    g.add_argument("name", nargs="?", help="example name: simplex-surprise, staircase, "
                                          "ball-covering, minimal-normal")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("dilate", parents=[common], help="build a dilation certificate",
                       description="contractions: commuting normal dilation at scale 2d; "
                                   "halmos: unitary dilation; anticommuting: anticommuting "
                                   "self-adjoint dilation (sum a^-2 <= 1); symmetrize: squares "
                                   "a^2 I; cube-ball: matrix range of F^[d]; wmin-simplex: normal "
                                   "dilation over a simplex; positive-scaling, sd-projection, "
                                   "symmetric-sd: product dilations with sum 1/a <= 1.")
    d.add_argument("how", choices=["contractions", "halmos", "orthogonal-family", "anticommuting",
                                   "symmetrize", "cube-ball", "wmin-simplex", "positive-scaling",
                                   "sd-projection", "symmetric-sd"])
    d.set_defaults(func=cmd_dilate)

    c = sub.add_parser("check", parents=[common], help="membership and classification checks")
    c.add_argument("what", choices=["wmax", "sd", "minimality", "normal"])
    c.set_defaults(func=cmd_check)

    t = sub.add_parser("theta", parents=[common], help="dilation scale of a simplex-pointed polytope")
    t.set_defaults(func=cmd_theta)

    r = sub.add_parser("range", parents=[common], help="level-one matrix range")
    r.add_argument("--normal", action="store_true", help="exact range of a commuting normal tuple")
    r.set_defaults(func=cmd_range)

    v = sub.add_parser("verify", parents=[common], help="recompute every claim of a certificate")
    v.add_argument("--cert", metavar="PATH")
    v.set_defaults(func=cmd_verify)

    rep = sub.add_parser("report", parents=[common], help="table of tuple diagnostics")
    rep.set_defaults(func=cmd_report)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, io.FormatError, BodyError, SpectrumError, ValueError) as exc:
        print(f"mct: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CertificateError as exc:
        print(f"mct: {exc}", file=sys.stderr)
        return EXIT_FALSE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
