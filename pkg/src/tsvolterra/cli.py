"""Command line entry point: ``tsvolterra {solve,certify,instability,exp}``.

Exit codes: 0 success/certified, 2 input error, 3 solver failure,
4 certificate violated, 5 stability hypothesis not met.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .calculus import fmt, ts_exp
from .errors import EvaluationError, InputError, NoConvergence, SolverError, StabilityHypothesisError
from .problem_io import FunctionRef, dumps, load_problem, load_timescale
from .stability import certify_hyers_ulam, certify_rassias, instability_probe
from .volterra import march_solve, picard_solve

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_VIOLATED = 4
EXIT_HYPOTHESIS = 5


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _horizons(text):
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad horizon list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty horizon list")
    return values


def cmd_solve(args) -> int:
    spec = load_problem(args.problem)
    problem = spec.build()
    psi0 = None
    if args.method == "picard" and spec.psi is not None and not args.zero_start:
        psi0 = spec.psi.sample(problem)
    if args.method == "march":
        sol = march_solve(problem)
        _write(args.out, sol.phi.to_csv())
        return EXIT_OK
    try:
        sol, report = picard_solve(problem, psi0, tol=spec.tol, max_iter=spec.max_iter)
    except NoConvergence as exc:
        if args.report and exc.report is not None:
            _write(args.report, dumps(exc.report.to_dict()))
        raise
    _write(args.out, sol.phi.to_csv())
    if args.report:
        _write(args.report, dumps(report.to_dict()))
    return EXIT_OK


def cmd_certify(args) -> int:
    spec = load_problem(args.problem)
    psi_ref = FunctionRef.parse(args.psi, Path.cwd(), "psi") if args.psi else spec.psi
    if psi_ref is None:
        raise InputError("certify needs --psi or a 'psi' entry in the problem")
    omega_ref = None
    if args.mode == "hur":
        omega_ref = FunctionRef.parse(args.omega, Path.cwd(), "omega") if args.omega else spec.omega
        if omega_ref is None:
            raise InputError("hur mode needs --omega or an 'omega' entry in the problem")
    problem = spec.build()
    psi = psi_ref.sample(problem)
    if args.mode == "hu":
        cert = certify_hyers_ulam(problem, psi, tol=spec.tol, max_iter=spec.max_iter)
    else:
        omega = omega_ref.sample(problem)
        cert = certify_rassias(problem, psi, omega, tol=spec.tol, max_iter=spec.max_iter)
    _write(args.out, dumps(cert.to_dict()))
    if args.margins:
        _write(args.margins, cert.margins_csv())
    return EXIT_OK if cert.certified else EXIT_VIOLATED


def cmd_instability(args) -> int:
    spec = load_problem(args.problem)
    if spec.psi is not None and spec.psi.expr is None:
        raise InputError("instability needs psi as an expression (the grid changes per horizon)")
    psi = spec.psi.expr if spec.psi is not None else "0"
    record = instability_probe(spec.f, spec.kernel, spec.timescale, args.horizons, psi=psi, h_max=spec.h_max)
    _write(args.out, dumps(record.to_dict()))
    return EXIT_OK if record.bounded_below else EXIT_VIOLATED


def cmd_exp(args) -> int:
    ts = load_timescale(args.timescale)
    t0 = ts.a if args.t0 is None else args.t0
    value = ts_exp(ts, args.p, args.t, t0)
    print(fmt(value))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsvolterra",
        description="Volterra integral equations on time scales: solve and certify stability.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the problem and write the solution CSV")
    p.add_argument("problem")
    p.add_argument("--method", choices=("picard", "march"), default="march")
    p.add_argument("--out", help="solution CSV (default: stdout)")
    p.add_argument("--report", help="iteration report JSON (picard only)")
    p.add_argument("--zero-start", action="store_true", help="seed Picard with 0 instead of psi")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", help="certify an approximate solution")
    p.add_argument("problem")
    p.add_argument("--psi", help="CSV path or expression in t")
    p.add_argument("--mode", choices=("hu", "hur"), default="hu")
    p.add_argument("--omega", help="CSV path or expression in t (hur mode)")
    p.add_argument("--out", help="certificate JSON (default: stdout)")
    p.add_argument("--margins", help="optional CSV with t,deviation,bound,margin")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("instability", help="deviation growth over increasing horizons")
    p.add_argument("problem")
    p.add_argument("--horizons", type=_horizons, required=True, help="comma separated, increasing")
    p.add_argument("--out", help="growth record JSON (default: stdout)")
    p.set_defaults(func=cmd_instability)

    p = sub.add_parser("exp", help="print the time-scale exponential e_p(t, t0)")
    p.add_argument("--timescale", required=True, help="time scale JSON")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--t0", type=float, default=None)
    p.set_defaults(func=cmd_exp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, EvaluationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except StabilityHypothesisError as exc:
        print(f"hypothesis not met: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())
