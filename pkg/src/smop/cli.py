"""Command-line front end: solve, path, rootdemo and bench subcommands.

Exit codes: 0 on success (tolerance reached), 2 on non-convergence, 1 on
usage or data errors. Set the environment variable ``SMOP_LOG`` to
``debug``/``info``/``warning`` to control log verbosity.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from .driver import (
    METHODS,
    PathSpec,
    SmopConfig,
    smop_solve,
    solve_path,
    write_iterates_csv,
)
from .problem import LibsvmFormatError, ProblemData, SynthSpec, libsvm_read, synth_instance
from .regularizers import make_regularizer
from .rootfind import (
    BracketError,
    eval_beta_fn,
    eval_constructed_fn,
    secant_solve,
)

log = logging.getLogger("smop")

# iterate tables of the two scalar demos, frozen at 2 significant digits
_DEMO_TABLES = {
    "beta:1.1": ["-5.1e-5", "-4.3e-6", "2.2e-10", "-2.2e-11", "-1.8e-12",
                 "4.1e-23", "-4.1e-24", "-3.4e-25"],
    "beta:1.5": ["-5.1e-5", "-1.7e-5", "8.4e-10", "-4.2e-10", "-1.1e-10",
                 "4.5e-20", "-2.2e-20", "-5.6e-21"],
    "beta:2.1": ["-5.1e-5", "-2.6e-5", "1.3e-9", "-1.5e-9", "-5.1e-10",
                 "7.4e-19", "-8.2e-19", "-2.8e-19"],
    "constructed": {
        "x": ["1.7e-1", "3.6e-2", "4.0e-3", "1.0e-4", "2.7e-7",
              "2.0e-11", "4.0e-18", "6.1e-29"],
        "f": ["1.9e-1", "3.7e-2", "4.0e-3", "1.0e-4", "2.7e-7",
              "2.0e-11", "4.0e-18", "6.1e-29"],
    },
}


def sci(v: float) -> str:
    """Compact scientific notation with 2 significant digits (``-5.1e-5``)."""
    mant, exp = f"{v:.1e}".split("e")
    sign = "-" if exp[0] == "-" else ""
    return f"{mant}e{sign}{exp[1:].lstrip('0') or '0'}"


def _parse_synth(text: str, seed_override=None) -> SynthSpec:
    fields = {}
    for part in text.split(","):
        key, _, val = part.partition("=")
        key = key.strip()
        if key not in ("m", "n", "s", "sigma", "seed"):
            raise ValueError(f"unknown synth field {key!r}")
        fields[key] = float(val) if key == "sigma" else int(val)
    if seed_override is not None:
        fields["seed"] = seed_override
    return SynthSpec(**fields)


def _load_data(args) -> ProblemData:
    if bool(args.input) == bool(args.synth):
        raise ValueError("exactly one of --input or --synth is required")
    if args.input:
        return libsvm_read(args.input)
    spec = _parse_synth(args.synth, getattr(args, "seed", None))
    data, _ = synth_instance(spec)
    return data


def _resolve_rho(args, data: ProblemData) -> float:
    if (args.c is None) == (args.rho is None):
        raise ValueError("exactly one of --c or --rho is required")
    rho = args.c * data.bnorm if args.c is not None else args.rho
    if not 0.0 < rho < data.bnorm:
        raise ValueError("require 0 < rho < ||b||")
    return rho


def _build_config(args) -> SmopConfig:
    cfg = SmopConfig(stoptol=args.stoptol, method=args.method, sieving=not args.no_sieve)
    cfg.root.mu = args.mu
    cfg.root.max_outer = args.max_outer
    cfg.sieve.k_max = args.kmax
    if getattr(args, "inner_trace", None):
        cfg.inner.keep_trace = True
    return cfg


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--input", help="LIBSVM-format data file")
    p.add_argument("--synth", help="synthetic spec, e.g. m=200,n=2000,s=20,sigma=0.01,seed=1")
    p.add_argument("--seed", type=int, default=None, help="override the synth seed")
    p.add_argument("--reg", choices=("l1", "slope"), default="l1")
    p.add_argument("--gamma", choices=("linear", "constant"), default="linear",
                   help="weight schedule for --reg slope")
    p.add_argument("--c", type=float, default=None, help="rho = c * ||b||")
    p.add_argument("--rho", type=float, default=None, help="constraint level")
    p.add_argument("--method", choices=METHODS, default="smop")
    p.add_argument("--stoptol", type=float, default=1e-6)
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--max-outer", type=int, default=200)
    p.add_argument("--kmax", type=int, default=500)
    p.add_argument("--no-sieve", action="store_true")
    p.add_argument("--out", help="write the result JSON here instead of stdout")


def cmd_solve(args) -> int:
    if args.method == "nmop" and args.reg == "slope":
        raise ValueError("NMOP supports l1 only")
    if args.c is not None and not 0.0 < args.c < 1.0:
        raise ValueError("require 0 < rho < ||b||")
    data = _load_data(args)
    rho = _resolve_rho(args, data)
    data = data.with_rho(rho)
    reg = make_regularizer(args.reg, data.A.n, args.gamma)
    cfg = _build_config(args)
    result = smop_solve(data, reg, cfg)
    doc = result.to_doc()
    doc["rho"] = float(rho)
    text = json.dumps(doc, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.iters_csv:
        write_iterates_csv(args.iters_csv, result)
    if args.inner_trace:
        rec = next((e for e in result.evals if e.lam == result.lambda_star), None)
        with open(args.inner_trace, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "objective", "eta_l"])
            if rec is not None and rec.trace:
                w.writerows(rec.trace)
    return 0 if result.converged else 2


def cmd_path(args) -> int:
    data = _load_data(args)
    if args.c is None or not 0 < args.c:
        raise ValueError("path requires --c > 0")
    reg = make_regularizer(args.reg, data.A.n, args.gamma)
    cfg = _build_config(args)
    spec = PathSpec(base_c=args.c, count=args.steps)
    path = solve_path(data, reg, spec, cfg)
    docs = []
    for step in path.steps:
        doc = step.result.to_doc()
        doc["rho"] = step.rho
        docs.append(doc)
    out = {"steps": docs, "summary": path.summary()}
    text = json.dumps(out, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rho", "lambda_star", "eta", "nnz", "n_subproblems", "wall_ms"])
            for step in path.steps:
                r = step.result
                w.writerow([step.rho, r.lambda_star, r.eta, r.nnz,
                            r.n_subproblems, r.wall_ms])
    return 0 if path.failures == 0 else 2


def _rootdemo_rows(name: str):
    if name.startswith("beta:"):
        beta = float(name.split(":", 1)[1])
        iters = secant_solve(lambda x: eval_beta_fn(x, beta), 0.01, 0.005, 0.0, 8)
        return {"x": [sci(v) for v in iters]}
    if name == "constructed":
        iters = secant_solve(eval_constructed_fn, 0.545, 0.5, 0.0, 8)
        return {
            "x": [sci(v) for v in iters],
            "f": [sci(eval_constructed_fn(v)) for v in iters],
        }
    raise ValueError(f"unknown demo {name!r}")


def cmd_rootdemo(args) -> int:
    known_beta = {"beta:1.1", "beta:1.5", "beta:2.1"}
    if args.demo not in known_beta and args.demo != "constructed":
        print(f"error: unknown demo {args.demo!r}", file=sys.stderr)
        return 1
    rows = _rootdemo_rows(args.demo)
    header = "Iter  " + "  ".join(f"{k + 1:>8d}" for k in range(8))
    print(header)
    for label, vals in rows.items():
        print(f"{label:<5s} " + "  ".join(f"{v:>8s}" for v in vals))
    if args.check:
        expected = _DEMO_TABLES[args.demo]
        if isinstance(expected, list):
            expected = {"x": expected}
        for label, vals in rows.items():
            if vals != expected[label]:
                print(f"check failed for row {label}: {vals} != {expected[label]}",
                      file=sys.stderr)
                return 1
        print("check passed")
    return 0


def cmd_bench(args) -> int:
    methods = [m for m in args.methods.split(",") if m]
    if args.seeds < 1 or not methods:
        raise ValueError("bench needs at least one seed and one method")
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    base = _parse_synth(args.synth) if args.synth else SynthSpec(m=100, n=800, s=10)
    rows = []
    all_ok = True
    for seed in range(args.seeds):
        spec = SynthSpec(m=base.m, n=base.n, s=base.s, sigma=base.sigma, seed=base.seed + seed)
        data, _ = synth_instance(spec)
        for method in methods:
            cfg = SmopConfig(stoptol=args.stoptol, method=method)
            if args.path:
                path = solve_path(data, make_regularizer(args.reg, data.A.n, args.gamma),
                                  PathSpec(base_c=args.c, count=args.path), cfg)
                for step in path.steps:
                    r = step.result
                    rows.append([spec.seed, method, step.rho, r.lambda_star, r.eta,
                                 r.nnz, r.n_subproblems, r.inner_iters_total,
                                 r.wall_ms, r.converged])
                all_ok = all_ok and path.failures == 0
            else:
                rho = args.c * data.bnorm
                r = smop_solve(data.with_rho(rho), make_regularizer(args.reg, data.A.n, args.gamma), cfg)
                rows.append([spec.seed, method, rho, r.lambda_star, r.eta, r.nnz,
                             r.n_subproblems, r.inner_iters_total, r.wall_ms,
                             r.converged])
                all_ok = all_ok and r.converged
    os.makedirs(args.out_dir, exist_ok=True)
    runs_path = os.path.join(args.out_dir, "runs.csv")
    with open(runs_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["seed", "method", "rho", "lambda_star", "eta", "nnz",
                    "n_subproblems", "inner_iters_total", "wall_ms", "converged"])
        w.writerows(rows)
    with open(os.path.join(args.out_dir, "summary.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "median_subproblems", "median_wall_ms",
                    "evals_vs_first", "time_vs_first"])
        med = {}
        for method in methods:
            sub = [r[6] for r in rows if r[1] == method]
            ms = [r[8] for r in rows if r[1] == method]
            med[method] = (float(np.median(sub)), float(np.median(ms)))
        first = methods[0]
        for method in methods:
            w.writerow([
                method, med[method][0], med[method][1],
                med[method][0] / max(med[first][0], 1e-12),
                med[method][1] / max(med[first][1], 1e-12),
            ])
    print(f"wrote {runs_path}")
    return 0 if all_ok else 2


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="smop", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one constrained problem")
    _add_common(p)
    p.add_argument("--iters-csv", help="per-outer-iteration CSV log")
    p.add_argument("--inner-trace", help="per-iteration CSV of the final inner solve")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("path", help="solve a decreasing-rho solution path")
    _add_common(p)
    p.add_argument("--steps", type=int, default=100, help="number of path points")
    p.add_argument("--csv", help="per-step CSV output")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("rootdemo", help="scalar secant iterate tables")
    p.add_argument("demo", help="beta:1.1 | beta:1.5 | beta:2.1 | constructed")
    p.add_argument("--check", action="store_true",
                   help="compare against the embedded expected table")
    p.set_defaults(func=cmd_rootdemo)

    p = sub.add_parser("bench", help="compare methods over a synthetic suite")
    p.add_argument("--synth", help="instance spec (seed is the base seed)")
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--methods", default="smop,bmop")
    p.add_argument("--reg", choices=("l1", "slope"), default="l1")
    p.add_argument("--gamma", choices=("linear", "constant"), default="linear")
    p.add_argument("--c", type=float, default=0.1)
    p.add_argument("--stoptol", type=float, default=1e-8)
    p.add_argument("--path", type=int, default=0, help="run a path of this many steps")
    p.add_argument("--out-dir", default="bench_out")
    p.set_defaults(func=cmd_bench)
    return top


def main(argv=None) -> int:
    level = os.environ.get("SMOP_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for usage problems; map usage to 1
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (ValueError, LibsvmFormatError, BracketError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_main():
    sys.exit(main())
