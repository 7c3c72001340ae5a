"""Command line front end: solve, convergence and selftest subcommands.

Exit codes: 0 on success, 1 on numerical failure, 2 on usage or
configuration errors.
"""

import argparse
import math
import sys

import numpy as np

from . import experiments, hp1d, timestepping


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hpfrac",
        description="hp-FEM solver and convergence harness for fractional diffusion",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required):
        p.add_argument("--config", required=config_required, metavar="PATH",
                       help="TOML experiment configuration")
        p.add_argument("--out", metavar="PATH", help="output CSV (default: stdout)")
        p.add_argument("--reference", metavar="PATH",
                       help="reference trajectory cache file")
        p.add_argument("--jobs", type=int, default=1, metavar="INT",
                       help="parallel sweep workers")
        p.add_argument("--seed", type=int, default=0, metavar="INT",
                       help="seed for randomized property checks")

    common(sub.add_parser("solve", help="one run, trajectory samples to CSV"), True)
    common(sub.add_parser("convergence", help="run the configured study"), True)
    common(sub.add_parser("selftest", help="oracle and invariant checks"), False)
    return parser


def _closed_form(spec):
    """Exact solution callable when the configured problem has one, else None."""
    if spec.f != "zero" or spec.A != 1.0 or (spec.a, spec.b) != (0.0, 1.0):
        return None
    if spec.u0 == "sin2pix":
        k = 2
    elif spec.u0 == "eigen":
        k = spec.u0_k
    else:
        return None
    return lambda x, t: experiments.exact_eigen_solution(k, spec.s, t, x, spec.c)


def run_solve(spec, out, jobs=1):
    ext = spec.extension()
    part = spec.partition()
    u0 = spec.u0_callable()
    if spec.method == "euler":
        traj = timestepping.run_euler(ext, part, u0=u0)
    else:
        traj = timestepping.run_dg(ext, part, u0=u0)
    exact = _closed_form(spec)

    lines = ["t,l2_norm,err_l2"]
    samples = [(0.0, traj.initial)]
    samples += [
        (float(part.breakpoints[j]), traj.left_limit(j))
        for j in range(1, part.n_intervals + 1)
    ]
    for t, coeffs in samples:
        l2 = math.sqrt(float(coeffs @ ext.Mx @ coeffs))
        if exact is None:
            err = float("nan")
        else:
            err = float(hp1d.error_norms(ext.space_x, coeffs, lambda x: exact(x, t))[0])
        lines.append(f"{t!r},{l2!r},{err!r}")
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def run_convergence(spec, out, reference, jobs):
    if spec.study == "smooth":
        rows = experiments.run_convergence_smooth(spec, jobs=jobs, out=out)
        results = {"smooth": rows}
    elif spec.study == "singular":
        results = experiments.run_convergence_singular(
            spec, jobs=jobs, out=out, reference=reference
        )
    else:
        rows = experiments.run_singperturb_bench(spec, jobs=jobs, out=out)
        results = {"singperturb": rows}
    if not out:
        for name, rows in results.items():
            sys.stdout.write(f"# {name}\n")
            sys.stdout.write("\n".join(experiments.csv_lines(rows)) + "\n")
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage/help text
        return 0 if exc.code in (0, None) else 2

    if args.command == "selftest":
        return experiments.selftest(seed=args.seed)

    try:
        spec = experiments.ExperimentSpec.from_config(args.config)
    except (OSError, ValueError, TypeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # tomllib parse errors and friends
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "solve":
            return run_solve(spec, args.out, jobs=args.jobs)
        return run_convergence(spec, args.out, args.reference, args.jobs)
    except (RuntimeError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
