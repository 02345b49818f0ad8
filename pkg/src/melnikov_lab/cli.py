"""Command-line front end: ``melnikov-lab <command> ...``.

stdout carries only the deterministic result (CSV, text or ``--json``).  The
run manifest goes to stderr, or next to ``--out`` as ``<out>.manifest.json``.
Exit codes: 0 success, 1 domain/validation error, 2 certification failure,
64 usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from importlib import metadata

import numpy as np

from . import closed, designer, perturbation, pwsim, quadrature
from .errors import CertificationError, MelnikovError
from .rootkit import RationalPolynomial, isolate_zeros
from .rootkit.wronskian import w4_derivative_identity, wronskians

EXIT_OK, EXIT_DOMAIN, EXIT_CERT, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _version():
    try:
        return metadata.version("melnikov-lab")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def thread_count():
    raw = os.environ.get("MELNIKOV_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _fmt(x):
    return f"{float(x):.15g}"


def parse_grid(text):
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must be lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise UsageError("grid needs step > 0 and hi >= lo")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(n), 12)


def _grid_type(text):
    try:
        return parse_grid(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _floats(text):
    if not text:
        return []
    return [float(v) for v in text.split(",") if v.strip()]


class _Run:
    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.start = time.perf_counter()
        self.digest = hashlib.sha256()
        self.out_path = getattr(args, "out", None)

    def read_spec(self, path):
        with open(path, "rb") as fh:
            raw = fh.read()
        self.digest.update(raw)
        return perturbation.PerturbationSpec.from_json(raw.decode())

    def manifest(self):
        return {
            "command": self.args.command + (f" {self.args.action}" if getattr(self.args, "action", None) else ""),
            "argv": self.argv,
            "input_digest": self.digest.hexdigest(),
            "version": _version(),
            "wall_time_s": round(time.perf_counter() - self.start, 6),
        }

    def emit_manifest(self):
        text = json.dumps(self.manifest(), sort_keys=True)
        if self.out_path:
            with open(self.out_path + ".manifest.json", "w") as fh:
                fh.write(text + "\n")
        else:
            sys.stderr.write(text + "\n")


def _print_json(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_csv(header, rows):
    sys.stdout.write(",".join(header) + "\n")
    for row in rows:
        sys.stdout.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")


def _spec_from_args(run, args):
    if getattr(args, "spec", None):
        return run.read_spec(args.spec)
    if getattr(args, "random", None) is not None:
        rng = np.random.default_rng(args.seed)
        return perturbation.PerturbationSpec.random(args.random, rng, holomorphic=args.holomorphic)
    raise UsageError("either --spec or --random is required")


def _zero_report_dict(rep):
    return {"zeros": [z.location for z in rep.zeros], "simple": [z.simple for z in rep.zeros],
            "certified": rep.count_certified, "ceiling": rep.ceiling, "notes": list(rep.notes)}


# -- commands --------------------------------------------------------------

def cmd_melnikov(run, args):
    spec = _spec_from_args(run, args)
    if args.action == "eval":
        r = args.grid
        if np.any(r <= 0) or np.any(r >= 1):
            raise MelnikovError("grid must lie inside (0, 1)")
        if args.method == "closed":
            p = perturbation.melnikov_params(spec)
            m1 = closed.m1_function(p, spec.m, spec.holomorphic)(r)
            n1 = closed.n1_function(p, spec.m, spec.holomorphic)(r)
        else:
            left = quadrature.builtin_system("half-i-z2-minus-1-left")
            right = quadrature.builtin_system("half-i-z2-minus-1-right")
            m1 = quadrature.melnikov_quadrature(left, spec, r).total
            n1 = quadrature.melnikov_quadrature(right, spec, r).total
        rows = list(zip(r, np.atleast_1d(m1), np.atleast_1d(n1)))
        if args.json:
            _print_json({"r": [float(x) for x in r], "M1": [float(x) for x in np.atleast_1d(m1)],
                         "N1": [float(x) for x in np.atleast_1d(n1)]})
        else:
            _write_csv(("r", "M1", "N1"), rows)
        return EXIT_OK
    p = perturbation.melnikov_params(spec)
    rm = isolate_zeros(closed.m1_function(p, spec.m, spec.holomorphic), tol=args.tol)
    rn = isolate_zeros(closed.n1_function(p, spec.m, spec.holomorphic), tol=args.tol)
    if args.json:
        _print_json({"M1": _zero_report_dict(rm), "N1": _zero_report_dict(rn)})
    else:
        rows = [("M1", z.location, z.half_width, str(z.simple).lower()) for z in rm.zeros]
        rows += [("N1", z.location, z.half_width, str(z.simple).lower()) for z in rn.zeros]
        _write_csv(("function", "r", "half_width", "simple"), rows)
    return EXIT_OK if rm.count_certified and rn.count_certified else EXIT_CERT


def cmd_quadcheck(run, args):
    spec = _spec_from_args(run, args)
    if spec.m > 3:
        raise MelnikovError("closed forms exist only for m <= 3")
    r = args.grid
    p = perturbation.melnikov_params(spec)
    cfg = quadrature.QuadratureConfig()
    jobs = [("M1", "half-i-z2-minus-1-left", closed.eval_M1(p, r)),
            ("N1", "half-i-z2-minus-1-right", closed.eval_N1(p, r))]

    def one(job):
        name, model, ref = job
        q = quadrature.melnikov_quadrature(quadrature.builtin_system(model), spec, r, cfg).total
        return name, float(np.max(np.abs(q - ref)))

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        results = list(pool.map(one, jobs))
    worst = max(v for _, v in results)
    ok = worst < args.tol
    if args.json:
        _print_json({"max_discrepancy": dict(results), "tol": args.tol, "pass": ok})
    else:
        for name, v in results:
            sys.stdout.write(f"{name} max |closed - quadrature| = {_fmt(v)}\n")
        sys.stdout.write(f"max discrepancy {_fmt(worst)} {'<' if ok else '>='} tol {_fmt(args.tol)}\n")
    return EXIT_OK if ok else EXIT_CERT


def cmd_ect_check(run, args):
    rng = np.random.default_rng(args.seed)
    ceiling = closed.ect_ceiling(args.m, args.holomorphic)
    worst, uncertified = 0, 0
    for _ in range(args.draws):
        spec = perturbation.PerturbationSpec.random(args.m, rng, holomorphic=args.holomorphic)
        p = perturbation.melnikov_params(spec)
        for fn in (closed.m1_function, closed.n1_function):
            rep = isolate_zeros(fn(p, args.m, args.holomorphic))
            if rep.count_certified:
                worst = max(worst, rep.count)
            else:
                uncertified += 1
    grid = np.linspace(0.001, 0.999, 999)
    wr = [wronskians("F", x) for x in grid[:: max(1, len(grid) // args.wronskian_points)]]
    w_ok = all(w.all_positive() for w in wr)
    w4 = max(w4_derivative_identity(x) for x in (0.1, 0.5, 0.9))
    ok = worst <= ceiling and w_ok and w4 < 1e-8
    out = {"m": args.m, "holomorphic": args.holomorphic, "ceiling": ceiling, "max_certified": worst,
           "uncertified": uncertified, "wronskians_positive": w_ok, "w4_identity_gap": w4, "pass": ok}
    if args.json:
        _print_json(out)
    else:
        for k in ("m", "holomorphic", "ceiling", "max_certified", "uncertified", "wronskians_positive",
                  "w4_identity_gap", "pass"):
            sys.stdout.write(f"{k}: {out[k]}\n")
    return EXIT_OK if ok else EXIT_CERT


def cmd_sturm(run, args):
    coeffs = [Fraction(c.strip()) for c in args.poly.split(",")]
    p = RationalPolynomial(tuple(coeffs))
    out = {"count": p.sturm_count(Fraction(args.lo), Fraction(args.hi)),
           "descartes_bound": p.descartes_bound()}
    if p.degree >= 2:
        out["discriminant"] = str(p.discriminant())
    if args.json:
        _print_json(out)
    else:
        for k, v in out.items():
            sys.stdout.write(f"{k}: {v}\n")
    return EXIT_OK


def _write_spec(spec, path):
    text = spec.to_json(indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_design(run, args):
    targets = [designer.ZeroTarget(x, "f") for x in _floats(args.f)]
    targets += [designer.ZeroTarget(x, "g") for x in _floats(args.g)]
    params = designer.design(targets, args.m, args.holomorphic)
    spec = perturbation.params_to_perturbation(params, args.m, args.holomorphic)
    if args.out:
        _write_spec(spec, args.out)
    if args.json or not args.out:
        _print_json({"params": params.to_dict(), "spec": spec.to_dict()})
    return EXIT_OK


def cmd_realize(run, args):
    rng = np.random.default_rng(args.seed)
    res = designer.realize_detailed(args.i, args.j, args.m, args.holomorphic, rng=rng)
    _write_spec(res.spec, args.out)
    if args.out:
        sys.stdout.write(f"{res.configuration} after {res.attempts} attempt(s)\n")
    return EXIT_OK


def cmd_verify(run, args):
    spec = run.read_spec(args.spec)
    conf = designer.verify_configuration(spec)
    if args.json:
        _print_json({"m1": conf.m1, "n1": conf.n1, "certified": conf.certified,
                     "M1": _zero_report_dict(conf.m1_report), "N1": _zero_report_dict(conf.n1_report)})
    else:
        sys.stdout.write(f"{conf}\n")
    return EXIT_OK if conf.certified else EXIT_CERT


def cmd_simulate(run, args):
    spec = run.read_spec(args.spec)
    cfg = pwsim.SimConfig(epsilon=args.eps, rk_tol=args.rk_tol, nest=args.nest,
                          allow_large_epsilon=args.allow_large_epsilon)
    lo, hi = (float(v) for v in args.search.split(":"))
    cycles = pwsim.find_limit_cycles(spec, cfg, (lo, hi), args.seeds)
    if args.trajectory:
        traj = pwsim.integrate_piecewise(spec, cfg, complex(args.z0), args.t_max)
        with open(args.trajectory, "w") as fh:
            fh.write("t,re_z,im_z\n")
            for t, z in zip(traj.t, traj.z):
                fh.write(f"{_fmt(t)},{_fmt(z.real)},{_fmt(z.imag)}\n")
    if args.json:
        _print_json({"degenerate_identity": cycles.degenerate_identity,
                     "cycles": [c.__dict__ for c in cycles]})
    else:
        rows = [(c.section_point, c.radius_in_w,
                 "" if c.predicted_r0 is None else _fmt(c.predicted_r0),
                 "" if c.deviation is None else _fmt(c.deviation), str(c.stable).lower())
                for c in cycles]
        _write_csv(("section_point", "radius_in_w", "predicted_r0", "deviation", "stable"), rows)
    return EXIT_OK


def cmd_audit(run, args):
    audit = perturbation.audit_remarks()
    if args.json:
        _print_json({"gamma_ratio": audit.gamma_ratio, "others_match": audit.others_match,
                     "discrepancies": [d.__dict__ for d in audit.discrepancies]})
    else:
        for line in audit.lines():
            sys.stdout.write(line + "\n")
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="melnikov-lab", description="Averaged-function toolkit for piecewise "
                     "perturbations of z' = i(z^2-1)/2.")
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(p, spec=True, random_spec=False):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if spec:
            p.add_argument("--spec", required=not random_spec, help="perturbation JSON file")
        if random_spec:
            p.add_argument("--random", type=int, metavar="M", help="use a random spec of degree M")
            p.add_argument("--holomorphic", action="store_true")
            p.add_argument("--seed", type=int, default=0)

    mel = sub.add_parser("melnikov", help="evaluate or isolate zeros of M1 and N1")
    mel_sub = mel.add_subparsers(dest="action", parser_class=_Parser)
    mel_sub.required = True
    ev = mel_sub.add_parser("eval")
    common(ev)
    ev.add_argument("--grid", type=_grid_type, default="0.05:0.95:0.05")
    ev.add_argument("--method", choices=("closed", "quad"), default="closed")
    zs = mel_sub.add_parser("zeros")
    common(zs)
    zs.add_argument("--tol", type=float, default=1e-12)

    qc = sub.add_parser("quadcheck", help="closed forms against quadrature")
    common(qc, random_spec=True)
    qc.add_argument("--tol", type=float, default=1e-9)
    qc.add_argument("--grid", type=_grid_type, default="0.05:0.95:0.05")

    ect = sub.add_parser("ect-check", help="random zero counts against the ECT ceilings")
    common(ect, spec=False)
    ect.add_argument("--m", type=int, required=True)
    ect.add_argument("--holomorphic", action="store_true")
    ect.add_argument("--draws", type=int, default=200)
    ect.add_argument("--seed", type=int, default=0)
    ect.add_argument("--wronskian-points", type=int, default=999)

    st = sub.add_parser("sturm", help="exact root count of a rational polynomial")
    common(st, spec=False)
    st.add_argument("--poly", required=True, help="ascending coefficients, e.g. '2,-3,1' or '1/6,0,1'")
    st.add_argument("--lo", default="0")
    st.add_argument("--hi", default="1")

    de = sub.add_parser("design", help="place zeros of r M1 (--f) and r N1 (--g)")
    common(de, spec=False)
    de.add_argument("--m", type=int, required=True)
    de.add_argument("--holomorphic", action="store_true")
    de.add_argument("--f", default="", help="comma-separated zeros of r M1")
    de.add_argument("--g", default="", help="comma-separated zeros of r N1")
    de.add_argument("--out")

    re_ = sub.add_parser("realize", help="perturbation with a prescribed configuration [[i,j]]")
    common(re_, spec=False)
    re_.add_argument("--i", type=int, required=True)
    re_.add_argument("--j", type=int, required=True)
    re_.add_argument("--m", type=int, required=True)
    re_.add_argument("--holomorphic", action="store_true")
    re_.add_argument("--seed", type=int, default=0)
    re_.add_argument("--out")

    ve = sub.add_parser("verify", help="certified configuration of a spec")
    common(ve)

    si = sub.add_parser("simulate", help="limit cycles of the piecewise system by direct integration")
    common(si)
    si.add_argument("--eps", type=float, default=1e-3)
    si.add_argument("--nest", choices=("left", "right"), default="left")
    si.add_argument("--search", default="0.02:0.98")
    si.add_argument("--seeds", type=int, default=64)
    si.add_argument("--rk-tol", type=float, default=1e-10)
    si.add_argument("--allow-large-epsilon", action="store_true")
    si.add_argument("--trajectory", help="also dump one trajectory (t, Re z, Im z) to this CSV")
    si.add_argument("--z0", default="-0.3333333333333333")
    si.add_argument("--t-max", type=float, default=2 * np.pi)

    au = sub.add_parser("audit-remarks", help="compare the reference coefficient tables with the term sums")
    common(au, spec=False)
    return parser


COMMANDS = {
    "melnikov": cmd_melnikov, "quadcheck": cmd_quadcheck, "ect-check": cmd_ect_check,
    "sturm": cmd_sturm, "design": cmd_design, "realize": cmd_realize, "verify": cmd_verify,
    "simulate": cmd_simulate, "audit-remarks": cmd_audit,
}


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    session = _Run(args, argv)
    try:
        code = COMMANDS[args.command](session, args)
    except UsageError as exc:
        sys.stderr.write(f"melnikov-lab: usage error: {exc}\n")
        return EXIT_USAGE
    except CertificationError as exc:
        sys.stderr.write(f"melnikov-lab: certification failed: {exc}\n")
        code = EXIT_CERT
    except (MelnikovError, OSError, ValueError) as exc:
        sys.stderr.write(f"melnikov-lab: error: {exc}\n")
        return EXIT_DOMAIN
    session.emit_manifest()
    return code


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
