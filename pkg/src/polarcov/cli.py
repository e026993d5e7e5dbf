"""Command line front end.

Every subcommand reads one or two matrix documents (see
:mod:`polarcov.document`), prints a JSON report on standard output and
exits with status 0 (quantum / success), 1 (not quantum, no solution or a
residual above tolerance) or 2 (malformed input).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .covariance import (
    QUANTUM_METHODS,
    CovarianceMatrix,
    PhaseSpaceEllipsoid,
    SubspaceEllipsoid,
    covariance_ellipsoid,
    ellipse_coefficients,
    heisenberg_check,
    is_pure,
    is_quantum,
    project_along,
    project_onto,
    purity_residuals,
    symplectic_eigenvalues,
    williamson,
)
from .document import MatrixDocument, dumps, load_document, parse_matrix
from .duality import (
    is_fixed_point,
    john_blob,
    lagrangian_polar_dual,
    polar_dual,
    symplectic_polar_dual,
)
from .errors import DocumentError, NoSolutionError, PolarCovError
from .lagrangian import AffineLagrangian, LagrangianFrame, LagrangianPlane, coordinate_plane_X
from .linalg import max_abs
from .states import MixedGaussian, as_covariance, covariance_to_state
from .symplectic import pre_iwasawa, symplectic_residual
from .tolerances import TOL_QUANT, TOL_SYMP
from .tomography import LagrangianMarginal, marginal_on, radon_integral, reconstruct

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad command line usage detected after argument parsing."""


# -- input helpers ------------------------------------------------------------


def _hbar(doc: MatrixDocument, args) -> float:
    override = args.hbar_override
    if override is None or override == doc.hbar:
        return doc.hbar
    if not args.force:
        raise InputError(
            f"{doc.source}: file specifies hbar={doc.hbar!r} but --hbar-override={override!r}; "
            "pass --force to use the override"
        )
    return float(override)


def _matrix_flag(text, n, flag):
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{flag}: invalid JSON ({exc.msg})") from exc
    return parse_matrix(value, n, n, flag, source="command line")


def _vector_flag(text, length, flag):
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{flag}: invalid JSON ({exc.msg})") from exc
    if not isinstance(value, list) or len(value) != length:
        raise DocumentError(f"{flag}: expected a list of {length} numbers")
    return parse_matrix([value], 1, length, flag, source="command line")[0]


def _plane_from(A, B, what):
    try:
        return LagrangianPlane.from_equations(A, B)
    except PolarCovError as exc:
        raise DocumentError(f"{what}: {exc}") from exc


def _doc_plane(doc: MatrixDocument):
    if doc.plane_A is None:
        return coordinate_plane_X(doc.n)
    return _plane_from(doc.plane_A, doc.plane_B, f"{doc.source}: plane_A/plane_B")


def _flag_plane(args, n, prefix):
    a = getattr(args, f"{prefix}_A")
    b = getattr(args, f"{prefix}_B")
    if (a is None) != (b is None):
        raise InputError(f"--{prefix.replace('_', '-')}-A and -B must be given together")
    if a is None:
        return None
    flag = f"--{prefix.replace('_', '-')}"
    return _plane_from(_matrix_flag(a, n, flag + "-A"), _matrix_flag(b, n, flag + "-B"), flag)


def _frame(plane, args):
    partner = _flag_plane(args, plane.n, "partner")
    return LagrangianFrame(plane, partner if partner is not None else plane.dual_plane())


def _require(doc, kinds, cmd, subspace=None):
    if doc.kind not in kinds:
        raise InputError(f"{doc.source}: '{cmd}' expects kind {' or '.join(kinds)}, got {doc.kind!r}")
    if subspace is True and not doc.is_subspace:
        raise InputError(f"{doc.source}: '{cmd}' expects an n x n ellipsoid on a plane")
    if subspace is False and doc.is_subspace:
        raise InputError(f"{doc.source}: '{cmd}' expects a 2n x 2n phase space matrix")


def _covariance(doc, args) -> CovarianceMatrix:
    return CovarianceMatrix(doc.entries, _hbar(doc, args))


def _phase_ellipsoid(doc, args, cmd) -> PhaseSpaceEllipsoid:
    _require(doc, ("covariance", "ellipsoid_shape"), cmd, subspace=False)
    if doc.kind == "covariance":
        return covariance_ellipsoid(_covariance(doc, args))
    return PhaseSpaceEllipsoid(doc.entries, _hbar(doc, args), doc.center)


def _subspace_ellipsoid(doc, args, cmd) -> SubspaceEllipsoid:
    _require(doc, ("ellipsoid_shape",), cmd, subspace=True)
    return SubspaceEllipsoid(_doc_plane(doc), doc.entries, _hbar(doc, args))


# -- report helpers -----------------------------------------------------------


def _plane_report(plane):
    return {"plane_A": plane.A, "plane_B": plane.B}


def _subspace_document(e: SubspaceEllipsoid) -> dict:
    return MatrixDocument(e.n, e.hbar, "ellipsoid_shape", e.shape, None, e.plane.A, e.plane.B).to_dict()


def _covariance_document(cov: CovarianceMatrix, center=None) -> dict:
    return MatrixDocument(cov.n, cov.hbar, "covariance", cov.sigma, center).to_dict()


def _write_cloud(points, args, report):
    if args.out is None:
        return
    points = np.atleast_2d(points)
    lines = ["# ordering=xp"]
    lines += [",".join(repr(float(v) + 0.0) for v in row) for row in points]
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    report["point_cloud"] = {"path": args.out, "points": int(points.shape[0])}


def _diagnostics(args, **extra):
    d = {"tol_symp": args.tol_symp, "tol_quant": args.tol_quant}
    d.update(extra)
    return d


# -- subcommands --------------------------------------------------------------


def cmd_check(args):
    doc = load_document(args.input)
    _require(doc, ("covariance", "symplectic"), "check")
    if doc.kind == "symplectic":
        return _check_symplectic(doc, args)
    cov = _covariance(doc, args)
    verdicts = {m: is_quantum(cov, m, args.tol_quant) for m in QUANTUM_METHODS}
    quantum = verdicts["symplectic_spectrum"].quantum
    agree = len({v.quantum for v in verdicts.values()}) == 1
    report = {
        "command": "check",
        "n": cov.n,
        "hbar": cov.hbar,
        "quantum": quantum,
        "margin": verdicts["symplectic_spectrum"].margin,
        "methods": {m: {"quantum": v.quantum, "statistic": v.statistic} for m, v in verdicts.items()},
        "methods_agree": agree,
        "pure": bool(quantum and is_pure(cov, args.tol_quant)),
        "heisenberg": heisenberg_check(cov, args.tol_quant),
        "symplectic_spectrum": symplectic_eigenvalues(cov),
        "purity_residuals": purity_residuals(cov),
    }
    if cov.n == 1:
        D = float(np.linalg.det(cov.sigma))
        h2 = cov.hbar**2
        # k <= 0 exactly when D >= hbar^2/4
        report["n1"] = {"D": D, "k": 2 * (0.25 * h2 - D) / (h2 * D)}
    report["diagnostics"] = _diagnostics(args)
    return report, EXIT_OK if quantum else EXIT_FAIL


def _check_symplectic(doc, args):
    S = doc.entries
    resid = symplectic_residual(S)
    ok = resid <= args.tol_symp
    report = {"command": "check", "n": doc.n, "symplectic": ok, "residual": resid}
    if ok:
        f = pre_iwasawa(S, tol=args.tol_symp)
        report["pre_iwasawa"] = {
            "P": f.P,
            "L": f.L,
            "E": f.R.E,
            "F": f.R.F,
            "reassembly_residual": max_abs(f.matrix() - S),
        }
    report["diagnostics"] = _diagnostics(args)
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_williamson(args):
    doc = load_document(args.input)
    _require(doc, ("covariance",), "williamson")
    cov = _covariance(doc, args)
    w = williamson(cov)
    resid = max_abs(w.reconstruct() - cov.sigma) / max_abs(cov.sigma)
    s_resid = symplectic_residual(w.S)
    ok = resid <= 1e-9 and s_resid <= max(args.tol_symp, 1e-9)
    report = {
        "command": "williamson",
        "n": cov.n,
        "hbar": cov.hbar,
        "symplectic_spectrum": w.lambdas,
        "S": w.S,
        "D": w.D,
        "residual": resid,
        "symplectic_residual": s_resid,
        "diagnostics": _diagnostics(args),
    }
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_dual(args):
    doc = load_document(args.input)
    report = {"command": "dual", "mode": args.mode, "n": doc.n}
    if args.mode == "symplectic":
        omega = _phase_ellipsoid(doc, args, "dual --mode symplectic")
        dual = symplectic_polar_dual(omega)
        report.update(
            hbar=dual.hbar,
            shape=dual.M,
            self_dual=is_fixed_point(omega),
            document=MatrixDocument(dual.n, dual.hbar, "ellipsoid_shape", dual.M).to_dict(),
        )
        if dual.n == 1:
            report["ellipse_coefficients"] = {
                "input": ellipse_coefficients(omega),
                "dual": ellipse_coefficients(dual),
            }
        points = dual.boundary(args.points)
    else:
        x_ell = _subspace_ellipsoid(doc, args, f"dual --mode {args.mode}")
        if args.mode == "polar":
            dual = polar_dual(x_ell)
        else:
            dual = lagrangian_polar_dual(x_ell, _frame(x_ell.plane, args))
        report.update(
            hbar=dual.hbar, shape=dual.shape, **_plane_report(dual.plane),
            document=_subspace_document(dual),
        )
        points = dual.boundary(args.points)
    _write_cloud(points, args, report)
    report["diagnostics"] = _diagnostics(args)
    return report, EXIT_OK


def cmd_project(args):
    doc = load_document(args.input)
    omega = _phase_ellipsoid(doc, args, "project")
    plane = _flag_plane(args, doc.n, "plane")
    if plane is None:
        result = project_onto(omega, args.onto)
    else:
        result = project_along(omega, _frame(plane, args))
    report = {
        "command": "project",
        "n": doc.n,
        "hbar": result.hbar,
        "shape": result.shape,
        **_plane_report(result.plane),
        "document": _subspace_document(result),
    }
    if result.n == 1:
        report["half_width"] = float(np.sqrt(result.hbar / result.shape[0, 0]))
    _write_cloud(result.boundary(args.points), args, report)
    report["diagnostics"] = _diagnostics(args)
    return report, EXIT_OK


def _marginal(doc, args):
    _require(doc, ("marginal",), "reconstruct")
    return LagrangianMarginal(_doc_plane(doc), doc.entries, doc.center, _hbar(doc, args))


def cmd_reconstruct(args):
    d1, d2 = load_document(args.first), load_document(args.second)
    m1, m2 = _marginal(d1, args), _marginal(d2, args)
    if m1.hbar != m2.hbar:
        raise InputError(f"hbar differs between inputs: {m1.hbar!r} vs {m2.hbar!r}")
    report = {"command": "reconstruct", "n": m1.n, "hbar": m1.hbar}
    try:
        res = reconstruct(m1, m2, tol_quant=args.tol_quant)
    except NoSolutionError as exc:
        report.update(status="no_solution", message=str(exc), eigenvalue=exc.eigenvalue)
        report["diagnostics"] = _diagnostics(args)
        return report, EXIT_FAIL
    cands = []
    for state in res.candidates:
        cov, _ = as_covariance(state)
        cands.append({"X": state.X, "Y": state.Y, "covariance": _covariance_document(cov, state.center)})
    report.update(status="ok", count=len(cands), degenerate=res.degenerate, candidates=cands)
    report["diagnostics"] = _diagnostics(args)
    return report, EXIT_OK


def cmd_blob(args):
    doc = load_document(args.input)
    x_ell = _subspace_ellipsoid(doc, args, "blob")
    frame = _frame(x_ell.plane, args)
    blob = john_blob(x_ell, frame)
    cov = blob.covariance()
    state = covariance_to_state(cov, tol_quant=max(args.tol_quant, 1e-9 * cov.hbar))
    omega = covariance_ellipsoid(cov)
    report = {
        "command": "blob",
        "n": doc.n,
        "hbar": cov.hbar,
        "S": blob.S,
        "det_S": float(np.linalg.det(blob.S)),
        "symplectic_residual": symplectic_residual(blob.S),
        "pure": is_pure(cov, max(args.tol_quant, 1e-9 * cov.hbar)),
        "fixed_point": is_fixed_point(omega),
        "state": {"X": state.X, "Y": state.Y},
        "covariance": _covariance_document(cov),
        "partner": _plane_report(frame.ell_prime),
    }
    _write_cloud(blob.boundary(args.points), args, report)
    report["diagnostics"] = _diagnostics(args)
    return report, EXIT_OK


def cmd_radon(args):
    doc = load_document(args.input)
    _require(doc, ("covariance",), "radon")
    cov = _covariance(doc, args)
    plane = _flag_plane(args, doc.n, "plane")
    if plane is None:
        raise InputError("radon needs --plane-A and --plane-B")
    offset = np.zeros(2 * doc.n) if args.offset is None else _vector_flag(args.offset, 2 * doc.n, "--offset")
    report = {"command": "radon", "n": doc.n, "hbar": cov.hbar, **_plane_report(plane)}
    verdict = is_quantum(cov, tol_quant=args.tol_quant)
    if not verdict:
        report.update(status="not_quantum", margin=verdict.margin)
        report["diagnostics"] = _diagnostics(args)
        return report, EXIT_FAIL
    state = MixedGaussian(cov, doc.center, tol_quant=args.tol_quant)
    m = marginal_on(state, plane)
    report.update(
        status="ok",
        offset=offset,
        intrinsic_coordinate=plane.normal @ offset,
        value=radon_integral(state, AffineLagrangian(plane, offset)),
        marginal_covariance=m.cov_intrinsic,
        marginal_mean=m.mean_intrinsic,
    )
    report["diagnostics"] = _diagnostics(args)
    return report, EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hbar-override", type=float, default=None, help="use this hbar instead of the file's")
    common.add_argument("--force", action="store_true", help="accept an --hbar-override that differs from the file")
    common.add_argument("--tol-symp", type=float, default=TOL_SYMP)
    common.add_argument("--tol-quant", type=float, default=TOL_QUANT)
    common.add_argument("--out", default=None, help="CSV file for boundary points")
    common.add_argument("--points", type=int, default=256, help="number of boundary points (default 256)")

    plane = argparse.ArgumentParser(add_help=False)
    plane.add_argument("--partner-A", dest="partner_A", default=None, help="JSON n x n matrix")
    plane.add_argument("--partner-B", dest="partner_B", default=None, help="JSON n x n matrix")

    own_plane = argparse.ArgumentParser(add_help=False)
    own_plane.add_argument("--plane-A", dest="plane_A", default=None, help="JSON n x n matrix")
    own_plane.add_argument("--plane-B", dest="plane_B", default=None, help="JSON n x n matrix")

    parser = argparse.ArgumentParser(prog="polarcov", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="quantum/purity verdicts or symplecticity")
    p.add_argument("input")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("williamson", parents=[common], help="Williamson normal form")
    p.add_argument("input")
    p.set_defaults(func=cmd_williamson)

    p = sub.add_parser("dual", parents=[common, plane], help="polar, symplectic or Lagrangian dual")
    p.add_argument("input")
    p.add_argument("--mode", choices=("polar", "symplectic", "lagrangian"), default="symplectic")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("project", parents=[common, own_plane, plane], help="projection on a Lagrangian plane")
    p.add_argument("input")
    p.add_argument("--onto", choices=("X", "P"), default="X")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("reconstruct", parents=[common], help="pure states from two marginals")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("blob", parents=[common, plane], help="quantum blob and pure state from a measured ellipsoid")
    p.add_argument("input")
    p.set_defaults(func=cmd_blob)

    p = sub.add_parser("radon", parents=[common, own_plane], help="integral of the Wigner distribution over a plane")
    p.add_argument("input")
    p.add_argument("--offset", default=None, help="JSON list of 2n numbers")
    p.set_defaults(func=cmd_radon)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args)
    except (InputError, PolarCovError) as exc:
        print(f"polarcov {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
