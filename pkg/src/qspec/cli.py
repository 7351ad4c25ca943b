"""qspec command-line front end.

Exit codes: 0 success, 1 failed validation, 2 domain error, 3 nonconvergence,
4 bracketing failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import charfn, green, jacobi, oracle, qhyper, spectra
from .errors import DomainError, QSpecError
from .params import QNuParams, default_tol

VALIDATE_SUITES = ("diffeq", "routes", "green", "ortho", "interlace", "oracle", "form-identity")


# ---------------------------------------------------------------------------
# output


def _fmt_float(v: float) -> str:
    return "%.17g" % v


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt_float(v)
    return str(v)


def _json_value(v) -> str:
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return json.dumps(v)
    v = float(v)
    return _fmt_float(v) if math.isfinite(v) else "null"


def render(records: list[dict], fmt: str) -> str:
    """Flat records as CSV (header row) or a JSON array of objects."""
    if fmt == "json":
        rows = ["{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in r.items()) + "}" for r in records]
        return "[" + ",\n ".join(rows) + "]\n"
    if not records:
        return ""
    keys = list(records[0])
    lines = [",".join(keys)]
    lines += [",".join(_csv_cell(r[k]) for k in keys) for r in records]
    return "\n".join(lines) + "\n"


def _emit(args, records: list[dict]) -> None:
    text = render(records, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _params(args) -> QNuParams:
    tol = args.tol if args.tol is not None else default_tol()
    return QNuParams(args.q, args.nu, tol)


def _count(args) -> int:
    if args.count < 1:
        raise DomainError(f"--count must be >= 1, got {args.count}")
    return args.count


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args) -> int:
    params = _params(args)
    if args.function == "J":
        z = args.z if args.z is not None else args.x
        if z is None:
            raise DomainError("eval J needs --z")
        value = qhyper.hahn_exton_J(params.nu, z, params.q, params.tol)
        if value == 0.0:
            terms, err = 0, 0.0
        else:
            sv = qhyper.phi_1_1(params.q ** (params.nu + 1.0), params.q, params.q * z * z, params.tol)
            terms, err = sv.terms_used, abs(value / sv.value) * sv.est_err if sv.value else sv.est_err
        rec = {"function": "J", "z": float(z), "value": value, "route": "HYPERGEOM", "terms": terms, "est_err": err}
    else:
        x = args.x if args.x is not None else args.z
        if x is None:
            raise DomainError(f"eval {args.function} needs --x")
        if args.function == "phi":
            ev = charfn.phi(params, x, args.route or charfn.Route.HYPERGEOM)
        else:
            ev = charfn.psi(params, x, args.route)
        rec = {"function": args.function, "x": ev.x, "value": ev.value, "route": ev.route.value,
               "terms": ev.terms, "est_err": ev.est_err}
    _emit(args, [rec])
    return 0


# ---------------------------------------------------------------------------
# spectrum / sweep


def _spectrum_records(spec: spectra.Spectrum) -> list[dict]:
    return [
        {"n": i + 1, "xi_n": x, "residual": r, "bracket_lo": b[0], "bracket_hi": b[1]}
        for i, (x, r, b) in enumerate(zip(spec.eigenvalues, spec.residuals, spec.brackets))
    ]


def cmd_spectrum(args) -> int:
    params = _params(args)
    count = _count(args)
    if args.kappa is None:
        spec = spectra.friedrichs_spectrum(params, count)
    else:
        spec = spectra.kappa_spectrum(params, args.kappa, count)
    _emit(args, _spectrum_records(spec))
    return 0


def cmd_sweep(args) -> int:
    params = _params(args)
    count = _count(args)
    if args.steps < 1:
        raise DomainError(f"--steps must be >= 1, got {args.steps}")
    kappas = np.linspace(args.kappa_min, args.kappa_max, args.steps) if args.steps > 1 else np.array([args.kappa_min])
    table = spectra.kappa_sweep(params, kappas, count)
    records = [{"kappa": float(k), "n": n + 1, "xi_n": float(row[n])}
               for k, row in zip(kappas, table) for n in range(count)]
    _emit(args, records)
    return 0


# ---------------------------------------------------------------------------
# validate


def _check(name: str, measured: float, threshold: float) -> dict:
    return {"check": name, "measured": float(measured), "threshold": threshold,
            "passed": bool(measured < threshold)}


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _validate_diffeq(params, args, rng):
    out = []
    for z in rng.uniform(0.0, 2.0, args.samples):
        z = float(max(z, 1e-3))
        out.append(_check(f"diffeq z={z:.6g}", qhyper.residual_diffeq(params.nu, z, params.q, params.tol), 1e-10))
    return out


def _validate_routes(params, args, rng):
    worst_phi = 0.0
    worst_psi = 0.0
    has_psi = 0.0 < params.nu < 1.0
    for x in rng.uniform(-2.0, 5.0, args.samples):
        vals = [charfn.phi(params, x, r).value for r in charfn.Route]
        worst_phi = max(worst_phi, max(_rel(a, b) for a in vals for b in vals))
        if has_psi:
            a = charfn.psi(params, x, charfn.Route.SERIES_SUM).value
            b = charfn.psi(params, x, charfn.Route.HYPERGEOM).value
            worst_psi = max(worst_psi, _rel(a, b))
    out = [_check("phi route agreement", worst_phi, 1e-9)]
    if has_psi:
        out.append(_check("psi route agreement", worst_psi, 1e-9))
    return out


def _validate_green(params, args, rng):
    N = args.N or 80
    closed = green.hs_norm_sq_closed(params) if params.nu > 0.0 else green.hs_norm_sq_series(params)
    trunc = green.green_truncation(params, N).frobenius_sq()
    xi1 = spectra.friedrichs_spectrum(params, 1).eigenvalues[0]
    est = green.green_xi1_estimate(params, 200)
    return [
        _check(f"HS norm truncation N={N}", _rel(trunc, closed), 1e-12),
        _check("1/lambda_max(G_200) vs xi_1", abs(est - xi1) / xi1, 1e-8),
        _check("xi_1^2 above lower bound", 0.0 if xi1 * xi1 > spectra.semibound(params) else 1.0, 0.5),
    ]


def _validate_ortho(params, args, rng):
    count = _count(args)
    zeros = spectra.bessel_zeros(params, count)
    diag = {m: spectra.orthogonality_qJ(params, m, m, zeros=zeros) for m in range(1, count + 1)}
    out = []
    for m in range(1, count + 1):
        for n in range(1, count + 1):
            if m == n:
                lhs, rhs = diag[m]
                out.append(_check(f"qJ diag m={m}", abs(lhs - rhs) / abs(rhs), 1e-9))
            else:
                lhs, _ = spectra.orthogonality_qJ(params, m, n, zeros=zeros)
                scale = math.sqrt(abs(diag[m][1] * diag[n][1]))
                out.append(_check(f"qJ off-diag m={m} n={n}", abs(lhs) / scale, 1e-10))
    return out


def _validate_interlace(params, args, rng):
    params.require_indeterminate("validate interlace")
    count = _count(args)
    kappas = [args.kappa] if args.kappa is not None else [-2.0, 0.0, 3.0]
    fried = spectra.friedrichs_spectrum(params, count)
    out = []
    for k in kappas:
        spec = spectra.kappa_spectrum(params, k, count, fried)
        ok = spectra.interlaces(spec.eigenvalues, fried.eigenvalues)
        out.append(_check(f"interlacing kappa={k:g}", 0.0 if ok else 1.0, 0.5))
    return out


def _validate_oracle(params, args, rng):
    count = _count(args)
    N = args.N or 300
    threshold = args.threshold if args.threshold is not None else (1e-8 if params.nu >= 1.0 else 1e-6)
    return [_check(f"oracle N={N}", oracle.compare_friedrichs(params, count, N), threshold)]


def _validate_form_identity(params, args, rng):
    kappa = args.kappa if args.kappa is not None else 0.3
    lhs, rhs = spectra.form_identity_check(params, kappa)
    ker = jacobi.KernelSolutions(params)
    tq2 = jacobi.apply_T(params, ker.Q2_array(42))[:41]
    delta = np.zeros(41)
    delta[0] = 1.0
    return [
        _check(f"form identity kappa={kappa:g}", _rel(lhs, rhs), 1e-10),
        _check("T Q2 = delta_0", float(np.max(np.abs(tq2 - delta))), 1e-12),
    ]


_SUITES = {
    "diffeq": _validate_diffeq,
    "routes": _validate_routes,
    "green": _validate_green,
    "ortho": _validate_ortho,
    "interlace": _validate_interlace,
    "oracle": _validate_oracle,
    "form-identity": _validate_form_identity,
}


def cmd_validate(args) -> int:
    params = _params(args)
    rng = np.random.default_rng(args.seed)
    records = _SUITES[args.suite](params, args, rng)
    _emit(args, records)
    return 0 if all(r["passed"] for r in records) else 1


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--tol", type=float, default=None, help="tolerance (default: QSPEC_TOL or 1e-12)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="write output to FILE instead of stdout")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qspec", description="Spectra of the Hahn-Exton q-Bessel Jacobi matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate J, Phi or Psi at a point")
    p.add_argument("function", choices=("J", "phi", "psi"))
    _common(p)
    p.add_argument("--x", type=float)
    p.add_argument("--z", type=float)
    p.add_argument("--route", choices=[r.value for r in charfn.Route], type=str.upper)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("spectrum", help="eigenvalues of the Friedrichs extension or of T(kappa)")
    _common(p)
    which = p.add_mutually_exclusive_group()
    which.add_argument("--friedrichs", action="store_true")
    which.add_argument("--kappa", type=float)
    p.add_argument("--count", type=int, default=5)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("validate", help="run an invariant suite and report pass/fail")
    p.add_argument("suite", choices=VALIDATE_SUITES)
    _common(p)
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep-kappa", help="eigenvalue trajectories xi_n(kappa) as long-form rows")
    _common(p)
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--kappa-min", type=float, required=True)
    p.add_argument("--kappa-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=11)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QSpecError as exc:
        print(f"qspec: {type(exc).__name__}: {exc}", file=sys.stderr)
        cell = getattr(exc, "cell", None)
        if cell is not None:
            print(f"qspec: offending cell: ({_fmt_float(cell[0])}, {_fmt_float(cell[1])})", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
