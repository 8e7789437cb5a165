"""Command-line interface.

One command runs one computation and emits one JSON result document:

    stronghinf norm SYSTEM.json            strong H-infinity norm
    stronghinf ta-norm SYSTEM.json         strong norm of the asymptotic part
    stronghinf sweep SYSTEM.json -o CSV    singular-value sweep (+ figure)
    stronghinf synth LOOP.json             fixed-structure controller design
    stronghinf grad-check LOOP.json        analytic vs finite-difference grads
    stronghinf check SYSTEM.json           well-posedness and stability report

Exit codes: 0 success, 2 causality violation (U^T A0 V singular), 3 strong
instability (also: no stabilizing start), 4 numerical failure.
"""
from __future__ import annotations

import argparse
import sys as _sys

import numpy as np

from . import io
from .asymptotic import strong_norm_Ta
from .ddae import check_causality, compute_nullspaces, require_causality
from .discretize import strong_stability_check
from .errors import (CausalityError, NoStabilizingStart, NumericalFailure,
                     StrongStabilityViolation)
from .gradients import finite_diff_check, grad_strong_hinf
from .interconnect import build_template, interconnect
from .levelset import strong_hinf
from .oracle import DenseSweepSpec, dense_hinf
from .synthesis import (OptimizerOptions, SynthesisProblem, multistart_report,
                        optimize)
from .transfer import sweep as transfer_sweep

__all__ = ["main"]


def _limit_threads(n):
    if n is None:
        return
    try:
        from threadpoolctl import threadpool_limits
        threadpool_limits(limits=int(n))
    except ImportError:  # best effort; BLAS pools stay at their defaults
        pass


def _floats(text: str) -> np.ndarray:
    return np.array([float(x) for x in text.replace(",", " ").split()])


def _load_norm_target(args):
    """A norm-like command accepts a system file or an interconnection file
    (closed at the file's p or at --p)."""
    if io.is_interconnection_file(args.input):
        doc = io.load_interconnection(args.input)
        p = _floats(args.p) if args.p else doc.p
        if p is None:
            raise ValueError("interconnection file has no p; pass --p")
        return interconnect(doc.plant, doc.controller, p)
    return io.load_system(args.input)


def _cmd_norm(args) -> int:
    sys = _load_norm_target(args)
    cert = strong_hinf(sys, tol=args.tol, N=args.N, auto_N=args.auto_N,
                       require_stability=not args.allow_unstable)
    print(io.write_document(io.norm_document(cert), args.output), end="")
    return 0


def _cmd_ta_norm(args) -> int:
    sys = _load_norm_target(args)
    bases = compute_nullspaces(sys)
    require_causality(sys, bases)
    res = strong_norm_Ta(sys, bases, args.grid_points)
    print(io.write_document(io.ta_document(res.value, res.theta_hat,
                                           res.iterations, res.converged),
                            args.output), end="")
    return 0


def _cmd_sweep(args) -> int:
    sys = _load_norm_target(args)
    if args.log:
        omegas = np.concatenate([[0.0], np.logspace(np.log10(args.wmin),
                                                    np.log10(args.wmax),
                                                    args.points)])
    else:
        omegas = np.linspace(args.wmin, args.wmax, args.points)
    table = transfer_sweep(sys, omegas, k=args.k)
    io.write_sweep_csv(table, args.output)
    print(f"wrote {len(omegas)} rows to {args.output}")
    if args.figure:
        from .plots import plot_sweep
        bases = compute_nullspaces(sys)
        ta = strong_norm_Ta(sys, bases, 40) if check_causality(sys, bases) \
            else None
        plot_sweep(table, args.figure,
                   ta_value=ta.value if ta is not None else None)
        print(f"wrote figure to {args.figure}")
    return 0


def _cmd_synth(args) -> int:
    doc = io.load_interconnection(args.input)
    starts = [_floats(s) for s in args.start or []]
    opts = OptimizerOptions(max_iter=args.max_iter, norm_tol=args.tol,
                            norm_N=args.N)
    lo, hi = _floats(args.box)
    problem = SynthesisProblem(plant=doc.plant, structure=doc.controller,
                               starts=starts, n_random=args.starts,
                               seed=args.seed, box=(lo, hi), options=opts)
    result = optimize(problem)
    print(multistart_report(result))
    print(io.write_document(io.synth_document(result), args.output), end="")
    if args.figure:
        from .plots import plot_synth_traces
        plot_synth_traces(result, args.figure)
        print(f"wrote figure to {args.figure}")
    return 0


def _cmd_grad_check(args) -> int:
    doc = io.load_interconnection(args.input)
    p = _floats(args.p) if args.p else doc.p
    if p is None:
        raise ValueError("interconnection file has no p; pass --p")
    template = build_template(doc.plant, doc.controller)
    cert = strong_hinf(template.substitute(p), tol=args.tol, N=args.N)
    g = grad_strong_hinf(template, p, cert)
    err = finite_diff_check(template, p, step=args.step, tol=args.tol,
                            N=args.N)
    doc_out = {
        "p": [float(x) for x in p],
        "gradient": [float(x) for x in g.grad],
        "branch": g.branch,
        "smooth": bool(g.smooth),
        "step": float(args.step),
        "max_rel_error": float(err),
    }
    print(io.write_document(doc_out, args.output), end="")
    return 0


def _cmd_check(args) -> int:
    sys = _load_norm_target(args)
    bases = compute_nullspaces(sys)
    causal = check_causality(sys, bases)
    doc = {"n": sys.n, "nullity": bases.v, "causal": bool(causal)}
    if not causal:
        print(io.write_document(doc, args.output), end="")
        print("error: U^T A0 V is singular (ill-posed algebraic loop)",
              file=_sys.stderr)
        return 2
    report = strong_stability_check(sys, bases, args.N)
    doc.update({
        "strongly_stable": bool(report.stable),
        "spectral_abscissa": float(report.abscissa),
        "delta_radius": float(report.delta_radius),
    })
    print(io.write_document(doc, args.output), end="")
    if not report.stable:
        print("error: system is not strongly stable",
              file=_sys.stderr)
        return 3
    return 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="stronghinf",
        description="Strong H-infinity norms and fixed-structure synthesis "
                    "for delay differential algebraic systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="system or interconnection JSON file")
    common.add_argument("--tol", type=float, default=1e-6,
                        help="relative norm tolerance (default 1e-6)")
    common.add_argument("-N", type=int, default=20,
                        help="collocation order (default 20)")
    common.add_argument("--threads", type=int, default=None,
                        help="cap BLAS thread pools")
    common.add_argument("--output", "-o", default=None,
                        help="also write the result document to this file")
    common.add_argument("--p", default=None,
                        help="controller gains for interconnection inputs, "
                             "comma separated")

    p = sub.add_parser("norm", parents=[common],
                       help="strong H-infinity norm")
    p.add_argument("--auto-N", action="store_true",
                   help="double N until two runs agree to tol/10")
    p.add_argument("--allow-unstable", action="store_true",
                   help="skip the strong stability barrier and report the "
                        "imaginary-axis supremum")
    p.set_defaults(fn=_cmd_norm)

    p = sub.add_parser("ta-norm", parents=[common],
                       help="strong norm of the asymptotic transfer function")
    p.add_argument("--grid-points", type=int, default=40,
                   help="theta grid points per delay (default 40)")
    p.set_defaults(fn=_cmd_ta_norm)

    p = sub.add_parser("sweep", parents=[common],
                       help="singular-value frequency sweep to CSV")
    p.add_argument("--wmin", type=float, default=1e-3)
    p.add_argument("--wmax", type=float, default=1e3)
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--linear", dest="log", action="store_false",
                   help="linear frequency grid (default log plus omega=0)")
    p.add_argument("-k", type=int, default=1,
                   help="number of singular values per frequency")
    p.add_argument("--figure", default=None, help="write a PNG figure here")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("synth", parents=[common],
                       help="fixed-structure controller synthesis")
    p.add_argument("--starts", type=int, default=5,
                   help="number of random starts (default 5)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", default="-10,10",
                   help="random start box lo,hi (default -10,10)")
    p.add_argument("--max-iter", type=int, default=60,
                   help="BFGS iteration cap per start")
    p.add_argument("--start", action="append", default=None,
                   help="explicit start vector, comma separated (repeatable)")
    p.add_argument("--figure", default=None,
                   help="write the per-start trace PNG here")
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("grad-check", parents=[common],
                       help="compare analytic and finite-difference gradients")
    p.add_argument("--step", type=float, default=1e-5)
    p.set_defaults(fn=_cmd_grad_check)

    p = sub.add_parser("check", parents=[common],
                       help="causality and strong stability report")
    p.set_defaults(fn=_cmd_check)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    _limit_threads(args.threads)
    try:
        return args.fn(args)
    except CausalityError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    except (StrongStabilityViolation, NoStabilizingStart) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 3
    except NumericalFailure as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 4
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
