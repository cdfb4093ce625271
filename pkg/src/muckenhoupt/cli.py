"""Batch command-line front end.

Exit codes: 0 pass, 1 ledger or trend failure, 2 usage/input error,
3 numeric-range failure, 4 hypothesis-domain escape, 5 certificate failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .characteristics import a1_characteristic, ap_characteristic
from .exceptions import CertificateFailure, DomainEscape, DynamicRangeError, EmptyNeighborhood
from .experiments import DEFAULT_PROFILE_PS, EXPERIMENTS
from .extrapolation import FlatFormBound, Hypothesis, NormProfile, certify, default_corpus, neighborhood, parse_bound
from .grid import IntervalFamily, Sampled, make_weight, read_samples, read_weight, write_samples
from .maximal import MaximalOperator, estimate_operator_norm
from .operators import OPERATORS, make_operator
from .rdf import RdFParams, a1_properties, build_dual_majorant, build_majorant
from .serialization import csv_text, dumps, write_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RANGE, EXIT_DOMAIN, EXIT_CERT = 0, 1, 2, 3, 4, 5

# keys left out of the embedded run config: they never change the numbers
_NON_SEMANTIC = {"command", "config", "out", "csv", "w_out", "witness", "sidecar", "threads", "func"}

GEN_HELP = (
    "weight generator name:params -- constant:c | step:a,b[,split] | power:alpha[,center] | "
    "sine_flat:delta | random_flat:delta[,seed]"
)


class InputError(Exception):
    pass


def _threads_default() -> int:
    try:
        return max(1, int(os.environ.get("MUCK_THREADS", "1")))
    except ValueError:
        return 1


def _common(sp, weight=True):
    sp.add_argument("--n", type=int, default=256, help="grid size for generators (default 256)")
    sp.add_argument("--family", default="all", help="all | dyadic | shifted[:k] (default all)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=_threads_default(), help="worker threads (env MUCK_THREADS)")
    sp.add_argument("--out", default=None, help="output file (default stdout)")
    sp.add_argument("--config", default=None, help="JSON file of option defaults")
    if weight:
        src = sp.add_mutually_exclusive_group()
        src.add_argument("--gen", default=None, help=GEN_HELP)
        src.add_argument("--in", dest="infile", default=None, help="weight CSV (one sample per line)")


def _search(sp):
    sp.add_argument("--strategy", default="coordinate_ascent", choices=("structured", "random_search", "coordinate_ascent"))
    sp.add_argument("--budget", type=int, default=1500)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="muck", description="Discrete laboratory for flat A_p weights and extrapolation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("char", help="A_p characteristic of a weight")
    _common(sp)
    sp.add_argument("--p", type=float, required=True)
    sp.set_defaults(func=cmd_char)

    sp = sub.add_parser("a1", help="A_1 characteristic of a weight")
    _common(sp)
    sp.set_defaults(func=cmd_a1)

    sp = sub.add_parser("maximal", help="apply the maximal operator, write grid CSV")
    _common(sp)
    sp.add_argument("--engine", default="fast", choices=("fast", "brute"))
    sp.set_defaults(func=cmd_maximal)

    sp = sub.add_parser("norm", help="estimate ||M|| on L^p(w)")
    _common(sp)
    _search(sp)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--witness", default=None, help="write the witness function as grid CSV")
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("rdf", help="build a Rubio de Francia majorant")
    _common(sp)
    _search(sp)
    sp.add_argument("--p", type=float, required=True, help="exponent of the space the majorant lives in")
    sp.add_argument("--epsilon", type=float, default=0.5)
    sp.add_argument("--dual", action="store_true", help="build R'_eps from M'f = M(fw)/w")
    sp.add_argument("--g-gen", default="constant:1", help="source function generator (positive)")
    sp.add_argument("--g-in", default=None, help="source function CSV")
    sp.add_argument("--sidecar", default=None, help="JSON sidecar path (default: <out>.json)")
    sp.set_defaults(func=cmd_rdf)

    sp = sub.add_parser("extrapolate", help="certify the extrapolation chain")
    _common(sp)
    _search(sp)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--p0", type=float, required=True)
    sp.add_argument("--F", default="flat:auto,1", help="const:c | power:c,alpha | flat:c,a | table:t=v;... ; c may be 'auto'")
    sp.add_argument("--delta0", type=float, default=0.2)
    sp.add_argument("--delta", type=float, default=None, help="required flatness of the input weight")
    sp.add_argument("--operator", default="maximal", choices=OPERATORS)
    eps = sp.add_mutually_exclusive_group()
    eps.add_argument("--epsilon", type=float, default=0.5)
    eps.add_argument("--opt-eps", action="store_true", help="choose epsilon minimizing J")
    sp.add_argument("--corpus-size", type=int, default=20)
    sp.add_argument("--csv", default=None, help="ledger CSV summary")
    sp.add_argument("--w-out", default=None, help="write the first extrapolated weight W as grid CSV")
    sp.set_defaults(func=cmd_extrapolate)

    sp = sub.add_parser("neighborhood", help="exponent range implied by the characteristic bounds")
    _common(sp, weight=False)
    sp.add_argument("--budget", type=int, default=1500)
    sp.add_argument("--p0", type=float, required=True)
    sp.add_argument("--delta-in", type=float, required=True)
    sp.add_argument("--delta0", type=float, default=0.2)
    sp.add_argument("--epsilon", type=float, default=0.5, help="negative value: infimum over epsilon")
    sp.add_argument("--profile-ps", default=",".join("%g" % p for p in DEFAULT_PROFILE_PS))
    sp.set_defaults(func=cmd_neighborhood)

    sp = sub.add_parser("experiment", help="trend experiments (CSV table + JSON summary)")
    sp.add_argument("name", choices=sorted(EXPERIMENTS))
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--budget", type=int, default=1500)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=_threads_default())
    sp.add_argument("--out", default=None, help="CSV table path (default stdout)")
    sp.add_argument("--summary", default=None, help="JSON summary path (default stderr)")
    sp.add_argument("--config", default=None)
    sp.set_defaults(func=cmd_experiment)
    return parser


# ----------------------------------------------------------------- helpers


def _family(args) -> IntervalFamily:
    try:
        return IntervalFamily.parse(args.family)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _weight(args):
    try:
        if args.infile:
            return read_weight(args.infile)
        return make_weight(args.gen or "constant:1", args.n, seed=args.seed)
    except (ValueError, OSError) as exc:
        raise InputError(str(exc)) from None


def _function(path, spec, n, seed):
    try:
        if path:
            return read_samples(path)
        return make_weight(spec, n, seed=seed)
    except (ValueError, OSError) as exc:
        raise InputError(str(exc)) from None


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NON_SEMANTIC}


def _emit(args, payload: dict) -> None:
    text = dumps(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- commands


def cmd_char(args) -> int:
    rep = ap_characteristic(_weight(args), args.p, _family(args))
    _emit(args, rep.to_dict())
    return EXIT_OK


def cmd_a1(args) -> int:
    rep = a1_characteristic(_weight(args), _family(args))
    _emit(args, rep.to_dict())
    return EXIT_OK


def cmd_maximal(args) -> int:
    f = _function(args.infile, args.gen or "constant:1", args.n, args.seed)
    mf = MaximalOperator(_family(args), engine=args.engine).values(f.values)
    if args.out:
        write_samples(args.out, mf)
    else:
        sys.stdout.write("# n=%d\n" % len(mf) + "".join("%.17g\n" % v for v in mf))
    return EXIT_OK


def cmd_norm(args) -> int:
    w = _weight(args)
    est = estimate_operator_norm(
        MaximalOperator(_family(args)), args.p, w, strategy=args.strategy, budget=args.budget, seed=args.seed, threads=args.threads
    )
    if args.witness:
        write_samples(args.witness, est.witness)
    _emit(args, {"config": _config(args), **est.to_dict()})
    return EXIT_OK


def _rdf_params(args, epsilon):
    return RdFParams(epsilon=epsilon, strategy=args.strategy, budget=args.budget, seed=args.seed, threads=args.threads)


def cmd_rdf(args) -> int:
    w = _weight(args)
    g = _function(args.g_in, args.g_gen, w.n, args.seed)
    op = MaximalOperator(_family(args))
    params = _rdf_params(args, args.epsilon)
    builder = build_dual_majorant if args.dual else build_majorant
    maj = builder(g, args.p, w, op, params)
    check = a1_properties(maj, w, params, op)
    sidecar = {"config": _config(args), **maj.sidecar(), "a1_value": check.a1_value, "a1_bound": check.bound, "a1_holds": check.holds}
    if args.out:
        write_samples(args.out, maj.values)
        Path(args.sidecar or args.out + ".json").write_text(dumps(sidecar))
    else:
        sys.stdout.write(dumps(sidecar))
    return EXIT_OK if check.holds else EXIT_FAIL


def _hypothesis(args, T, op, params):
    text = args.F
    if "auto" in text:
        ones = np.ones(args.n if not args.infile else _weight(args).n)
        target = op if T.name == "maximal" else T
        c = estimate_operator_norm(target, args.p0, ones, **params.search()).value
        text = text.replace("auto", "%.17g" % c)
    try:
        return Hypothesis(args.p0, parse_bound(text), args.delta0)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_extrapolate(args) -> int:
    w = _weight(args)
    op = MaximalOperator(_family(args))
    T = make_operator(args.operator, op.family)
    params = _rdf_params(args, 0.5 if args.opt_eps else args.epsilon)
    hyp = _hypothesis(args, T, op, params)
    corpus = default_corpus(w.n, args.seed, args.corpus_size)
    report = certify(T, hyp, args.p, w, None if args.opt_eps else args.epsilon, corpus, op=op, params=params, delta=args.delta)
    _emit(args, {"config": _config(args), **report.to_dict()})
    if args.csv:
        write_csv(args.csv, report.csv_rows())
    if args.w_out:
        write_samples(args.w_out, report.W)
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_neighborhood(args) -> int:
    try:
        ps = tuple(float(v) for v in args.profile_ps.split(",") if v.strip())
    except ValueError:
        raise InputError(f"bad --profile-ps {args.profile_ps!r}") from None
    profile = NormProfile.measure(ps, n=args.n, op=MaximalOperator(_family(args)), budget=args.budget, seed=args.seed, threads=args.threads)
    hyp = Hypothesis(args.p0, parse_bound("const:1"), args.delta0)
    eps = None if args.epsilon < 0 else args.epsilon
    nb = neighborhood(hyp, args.delta_in, eps, profile)
    _emit(args, {"config": _config(args), "profile": profile.to_dict(), **nb.to_dict()})
    return EXIT_OK


def cmd_experiment(args) -> int:
    kwargs = {}
    if args.name in ("norm-vs-p", "neighborhood-vs-p0"):
        kwargs = {"budget": args.budget, "seed": args.seed}
        if args.n is not None:
            kwargs["n"] = args.n
    if args.name == "norm-vs-p":
        kwargs["threads"] = args.threads
    result = EXPERIMENTS[args.name](**kwargs)
    table = csv_text(result.csv_rows())
    if args.out:
        Path(args.out).write_text(table)
    else:
        sys.stdout.write(table)
    summary = dumps(result.summary())
    if args.summary:
        Path(args.summary).write_text(summary)
    else:
        sys.stderr.write(summary)
    return EXIT_OK if result.passed else EXIT_FAIL


# -------------------------------------------------------------------- main


def _config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _apply_config(parser, argv):
    argv = list(sys.argv[1:] if argv is None else argv)
    path = _config_path(argv)
    commands = parser._subparsers._group_actions[0].choices
    command = next((tok for tok in argv if tok in commands), None)
    if path and command:
        try:
            cfg = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            parser.error(f"cannot read --config: {exc}")
        if not isinstance(cfg, dict):
            parser.error("--config must hold a JSON object")
        subparser = commands[command]
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        subparser.set_defaults(**cfg)
        # options supplied by the config file are no longer required on the command line
        for action in subparser._actions:
            if action.dest in cfg:
                action.required = False
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"muck: input error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DynamicRangeError as exc:
        print(f"muck: numeric range: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except DomainEscape as exc:
        print(f"muck: not flat enough: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except EmptyNeighborhood as exc:
        print(f"muck: empty neighborhood: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except CertificateFailure as exc:
        print(f"muck: certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
