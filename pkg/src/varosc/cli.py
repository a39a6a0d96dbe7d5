"""Command line entry point: ``varosc <subcommand> [flags]``.

Exit codes: 0 success, 2 invalid arguments, 3 budget/resource errors,
4 a checked bound failed.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .averages import DEFAULT_BUDGET, METHODS
from .dilation import RESIDUAL_TOL
from .errors import InvalidArgument, ResourceError, VarOscError
from .sequences import geometric_lacunary, parse_seq, read_seq_file
from .symbol import sweep_sup

EXIT_OK, EXIT_INVALID, EXIT_RESOURCE, EXIT_ASSERT = 0, 2, 3, 4


def _ints(text):
    return [int(t) for t in text.split(",") if t.strip()]


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _seq_flags(p, m=True):
    g = p.add_argument_group("sequences")
    g.add_argument("--seq", help="geometric:<beta>:<count>[:<n1>] or a comma list")
    g.add_argument("--seq-file", help="file with one integer per line")
    g.add_argument("--beta", type=float, help="ratio for a geometric (n_k)")
    g.add_argument("--count", type=int, default=30)
    g.add_argument("--n1", type=int, default=1)
    if m:
        g.add_argument("--m-seq", help="sequence M, same grammar as --seq")
    g.add_argument("--require-lacunary", action="store_true")
    g.add_argument("--min-beta", type=float, default=None)


def _run_flags(p, op_default="random-unitary"):
    p.add_argument("--dim", type=_ints, default=[4], help="dimension or comma list (cycled by trial)")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--op", default=op_default,
                   help="identity | diag:<angles> | random-unitary | random-contraction:<cap>[,...]")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="stream work budget n_max*dim^2")
    p.add_argument("--method", choices=METHODS, default="auto")


def _out_flags(p):
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="varosc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="sup over theta of the symbol variation/oscillation sum")
    _seq_flags(p)
    p.add_argument("--grid", type=int, default=100_000)
    p.add_argument("--refine", type=int, default=40)
    p.add_argument("--theta-min", type=float, default=None)
    p.add_argument("--theta-max", type=float, default=None)
    _out_flags(p)

    for name in ("variation", "oscillation"):
        p = sub.add_parser(name, help=f"{name} functional over random or fixed operators")
        _seq_flags(p)
        _run_flags(p)
        p.add_argument("--p", type=float, default=1.0)
        p.add_argument("--bound", type=float, default=None, help="exit 4 if any ratio exceeds this")
        _out_flags(p)

    p = sub.add_parser("constant-curve", help="sweep sup as a function of beta")
    p.add_argument("--beta", type=_floats, required=True, help="comma list of ratios for (n_k)")
    p.add_argument("--m-beta", type=_floats, default=None, help="comma list of ratios for M")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--grid", type=int, default=20_000)
    p.add_argument("--refine", type=int, default=20)
    _out_flags(p)

    p = sub.add_parser("diverge", help="U = -1 along n_k = k (non-lacunary)")
    p.add_argument("--n-max", type=int, default=10_000)
    _out_flags(p)

    p = sub.add_parser("dilate", help="certify finite unitary dilations of random contractions")
    p.add_argument("--dim", type=_ints, default=[4])
    p.add_argument("--steps", type=int, default=32)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--op", default="random-contraction:0.9")
    p.add_argument("--tol", type=float, default=RESIDUAL_TOL)
    _out_flags(p)

    p = sub.add_parser("roj-check", help="square variation against the constant 25")
    _seq_flags(p, m=False)
    _run_flags(p, op_default="mixed")
    _out_flags(p)
    return ap


def _nk(args, required=True):
    strict = args.require_lacunary
    mb = args.min_beta if strict else None
    if args.seq_file:
        return read_seq_file(args.seq_file, mb)
    if args.seq:
        return parse_seq(args.seq, mb)
    if args.beta is not None:
        seq = geometric_lacunary(args.beta, args.count, args.n1)
        if mb is not None and seq.beta_certified < mb:
            raise InvalidArgument(f"certified beta {seq.beta_certified} below {mb}")
        return seq
    if required:
        raise InvalidArgument("give --seq, --seq-file or --beta")
    return None


def _emit(report, args):
    if args.out:
        report.write(args.out, args.format)
    print(json.dumps(report.summary, sort_keys=True, default=harness._json_default))


def _cmd_sweep(args):
    nk = _nk(args)
    M = parse_seq(args.m_seq) if args.m_seq else None
    kw = {}
    if args.theta_max is not None:
        kw["theta_max"] = args.theta_max
    res = sweep_sup(nk, M, args.grid, args.refine, theta_min=args.theta_min, **kw)
    _emit(harness.sweep_report(res), args)
    return EXIT_OK


def _cmd_functional(args):
    nk = _nk(args)
    M = None
    if args.command == "oscillation":
        if not args.m_seq:
            raise InvalidArgument("oscillation needs --m-seq")
        M = parse_seq(args.m_seq)
    cfg = harness.ExperimentConfig(
        kind=args.command, dims=args.dim, trials=args.trials, seed=args.seed, nk=nk, M=M,
        p=args.p, op=args.op, method=args.method, budget=args.budget,
    )
    rep = harness.run_variation_ensemble(cfg, bound=args.bound)
    for r in rep.rows:
        print(f"trial={r['trial']} dim={r['dim']} ratio={harness.fmt(r['ratio'])}")
    _emit(rep, args)
    if args.bound is not None and rep.summary["violations"]:
        return EXIT_ASSERT
    return EXIT_OK


def _cmd_curve(args):
    rep = harness.constant_curve(args.beta, args.count, args.grid, args.refine, args.m_beta)
    if not args.out:
        sys.stdout.write(rep.csv())
    _emit(rep, args)
    return EXIT_OK


def _cmd_diverge(args):
    rep = harness.divergence_demo(args.n_max)
    if not args.out:
        sys.stdout.write(rep.csv())
    _emit(rep, args)
    return EXIT_OK


def _cmd_dilate(args):
    cfg = harness.ExperimentConfig(kind="dilation-check", dims=args.dim, trials=args.trials,
                                   seed=args.seed, op=args.op, steps=args.steps)
    rep = harness.dilation_check(cfg)
    _emit(rep, args)
    worst = max(rep.summary["max_power_error"], rep.summary["max_functional_gap"])
    return EXIT_OK if rep.summary["passed"] and worst <= args.tol else EXIT_ASSERT


def _cmd_roj(args):
    # any strictly increasing list passes validation; --require-lacunary adds --min-beta
    nk = _nk(args, required=False)
    cfg = harness.ExperimentConfig(kind="roj-check", dims=args.dim, trials=args.trials, seed=args.seed,
                                   nk=nk, p=2.0, op=args.op, method=args.method, budget=args.budget)
    rep = harness.roj_check(cfg)
    _emit(rep, args)
    return EXIT_OK if rep.summary["passed"] else EXIT_ASSERT


COMMANDS = {
    "sweep": _cmd_sweep,
    "variation": _cmd_functional,
    "oscillation": _cmd_functional,
    "constant-curve": _cmd_curve,
    "diverge": _cmd_diverge,
    "dilate": _cmd_dilate,
    "roj-check": _cmd_roj,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except ResourceError as exc:
        print(f"varosc: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvalidArgument, VarOscError) as exc:
        print(f"varosc: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
