"""``paving-lab`` command line."""

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import BudgetExceeded, NoCertificate, PavingLabError
from .experiments import REGISTRY, ExperimentConfig, run_experiment, verify_report
from .frames import (
    FrameSpec,
    GramProjection,
    block_frame,
    conference_projection,
    find_difference_set,
    gram_projection,
    harmonic_frame,
    paley_conference,
)
from .laurent import (
    SymbolSpec,
    bidensity_report,
    fat_cantor_stage,
    truncated_laurent,
)
from .linalg import matrix_from_json, matrix_to_json, operator_norm
from .paving import exhaustive_pave, local_search_pave
from .symmetry import conj_a_certificate, min_symmetry_norm

GLOBAL_DEFAULTS = {"seed": 0, "threads": 1, "out_dir": None, "format": "json"}


def _globals(parser):
    # SUPPRESS lets the flags appear before or after the subcommand
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--out-dir", dest="out_dir", default=argparse.SUPPRESS)
    parser.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise PavingLabError(f"cannot read {path}: {exc}") from None


def _emit(args, name, obj, rows=None):
    """Print (and optionally save) either the JSON object or CSV rows."""
    if args.format == "csv" and rows:
        out = _csv_text(rows)
        suffix = ".csv"
    else:
        out = json.dumps(obj, indent=2, default=str) + "\n"
        suffix = ".json"
    sys.stdout.write(out)
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / (name + suffix)).write_text(out)


def _csv_text(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_pave(args):
    t = matrix_from_json(_read_json(args.input))
    if args.zero_diagonal:
        t = t - np.diag(np.diag(t))
    start = time.perf_counter()
    if args.strategy == "exhaustive":
        got = exhaustive_pave(t, args.r)
        got.provenance["seed"] = args.seed
    else:
        got = local_search_pave(t, args.r, seed=args.seed, restarts=args.restarts)
    seconds = time.perf_counter() - start
    row = {"n": t.shape[0], "r": args.r, "strategy": args.strategy, "epsilon": got.epsilon,
           "seconds": round(seconds, 6)}
    _emit(args, "paved", got.to_json(), [row])
    return 0


def _load_gram(path):
    obj = _read_json(path)
    if "synthesis" in obj:
        return gram_projection(FrameSpec.from_json(obj))
    return GramProjection.from_matrix(matrix_from_json(obj))


def cmd_symmetry_scan(args):
    g = _load_gram(args.gram)
    scan = min_symmetry_norm(g, strategy=args.strategy, samples=args.samples, seed=args.seed,
                             restarts=args.restarts, threads=args.threads)
    out = {"n": g.n, "k": g.k, "lhs": None, "rhs": None, "is_counterexample": None}
    if g.n > 2 * g.k:
        cert = conj_a_certificate(g.n, g.k)
        out.update(lhs=cert.lhs, rhs=cert.rhs, is_counterexample=cert.is_counterexample)
    out.update(
        scanned=scan.method.get("scanned", scan.method.get("restarts")),
        min_norm=scan.value,
        argmin_signs=list(scan.signs.signs),
        threshold=2 * g.k / g.n,
        method=scan.method,
    )
    row = {k: out[k] for k in ("n", "k", "lhs", "rhs", "is_counterexample", "scanned", "min_norm")}
    _emit(args, "symmetry", out, [row])
    return 0


def cmd_frames(args):
    if args.family == "difference-set":
        ds = find_difference_set(args.n, args.k)
        if ds is None:
            print(f"no ({args.n},{args.k}) difference set exists", file=sys.stderr)
            return 1
        _emit(args, "difference_set", ds.to_json())
        return 0
    if args.family == "harmonic":
        if args.elements:
            elems = [int(x) for x in args.elements.split(",")]
        else:
            ds = find_difference_set(args.n, args.k)
            if ds is None:
                print(f"no ({args.n},{args.k}) difference set; pass --elements", file=sys.stderr)
                return 1
            elems = list(ds.elements)
        frame = harmonic_frame(args.n, elems).check()
    elif args.family == "conference":
        gp = conference_projection(paley_conference(args.q))
        frame = FrameSpec(synthesis=gp.synthesis(), family="conference", params={"q": args.q}).check()
    else:
        frame, _ = block_frame(args.n, args.k, args.r)
        frame.check()
    obj = frame.to_json()
    if args.gram:
        obj = matrix_to_json(gram_projection(frame).gram)
    _emit(args, "frame", obj)
    return 0


def cmd_laurent(args):
    e = fat_cantor_stage(args.stage)
    if args.action == "gen":
        m = truncated_laurent(SymbolSpec(args.kind, e), args.N).matrix
        obj = matrix_to_json(m)
        if args.out:
            Path(args.out).write_text(json.dumps(obj) + "\n")
            print(f"wrote {m.shape[0]}x{m.shape[1]} {args.kind} truncation to {args.out}", file=sys.stderr)
        else:
            _emit(args, "laurent", obj)
        return 0
    h = Fraction(args.h) if args.h else Fraction(2) ** (1 - args.stage)
    rep = bidensity_report(e, h)
    rows = []
    for big_n in args.Ns:
        spec = SymbolSpec("reflection", e)
        m = truncated_laurent(spec, big_n).matrix
        rows.append({"stage": args.stage, "N": big_n, "norm": operator_norm(m),
                     "diag_max": float(np.max(np.abs(np.diag(m))))})
    obj = {"set": e.to_json(), "measure": str(e.measure), "bidensity": rep.to_json(), "truncations": rows}
    _emit(args, "laurent_report", obj, rows)
    return 0


def cmd_experiment(args):
    if args.action == "list":
        rows = [{"key": e.key, "name": e.name, "description": e.description} for e in REGISTRY.values()]
        _emit(args, "registry", rows, rows)
        return 0
    if args.action == "verify":
        res = verify_report(args.target)
        for p in res.problems:
            print(p, file=sys.stderr)
        print("pass" if res.ok else "fail")
        return 0 if res.ok else 1
    params = {}
    for item in args.param or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise PavingLabError(f"--param expects key=value, got {item!r}")
        try:
            params[key] = json.loads(val)
        except json.JSONDecodeError:
            params[key] = val
    out_dir = args.out_dir or str(Path("reports") / args.target)
    rep = run_experiment(ExperimentConfig(name=args.target, params=params, out_dir=out_dir,
                                          seed=args.seed, threads=args.threads))
    for a in rep.assertions:
        print(f"{'PASS' if a['passed'] else 'FAIL'} {a['id']}")
    for note in rep.incomplete:
        print(f"INCOMPLETE {note}")
    print(f"report written to {rep.path}")
    return rep.exit_code


def build_parser():
    p = argparse.ArgumentParser(prog="paving-lab", description="Paving searches and certificates.")
    _globals(p)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("pave", help="pave a matrix read from JSON")
    _globals(sp)
    sp.add_argument("--input", required=True)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--strategy", choices=("exhaustive", "local"), default="exhaustive")
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--zero-diagonal", action="store_true", help="pave T - diag(T)")
    sp.set_defaults(func=cmd_pave)

    sp = sub.add_parser("symmetry-scan", help="minimise ||PSP|| over diagonal symmetries")
    _globals(sp)
    sp.add_argument("--gram", required=True, help="projection matrix JSON or FrameSpec JSON")
    sp.add_argument("--strategy", choices=("exhaustive", "random", "greedy-flip"), default="exhaustive")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--restarts", type=int, default=8)
    sp.set_defaults(func=cmd_symmetry_scan)

    sp = sub.add_parser("frames", help="construct frames and difference sets")
    _globals(sp)
    sp.add_argument("family", choices=("harmonic", "conference", "block", "difference-set"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--q", type=int, default=5)
    sp.add_argument("--elements", help="comma separated residues for a harmonic frame")
    sp.add_argument("--gram", action="store_true", help="emit the Gram projection instead")
    sp.set_defaults(func=cmd_frames)

    sp = sub.add_parser("laurent", help="fat-Cantor truncations")
    _globals(sp)
    sp.add_argument("action", choices=("gen", "report"))
    sp.add_argument("--stage", type=int, default=3)
    sp.add_argument("--N", type=int, default=32)
    sp.add_argument("--Ns", type=int, nargs="+", default=[8, 16, 32, 64])
    sp.add_argument("--kind", choices=("projection", "reflection"), default="reflection")
    sp.add_argument("--h", help="cell width, e.g. 1/4 (default 2^(1-stage))")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_laurent)

    sp = sub.add_parser("experiment", help="run, verify or list registered experiments")
    _globals(sp)
    sp.add_argument("action", choices=("run", "verify", "list"))
    sp.add_argument("target", nargs="?", help="experiment name for run, report directory for verify")
    sp.add_argument("--param", action="append", help="key=value with JSON values, repeatable")
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    for k, v in GLOBAL_DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    if args.command == "experiment" and args.action != "list" and not args.target:
        parser.error(f"experiment {args.action} needs a target")
    if args.command == "frames" and args.family != "conference" and (args.n is None or args.k is None):
        parser.error(f"frames {args.family} needs --n and --k")
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except NoCertificate as exc:
        print(f"no certificate: {exc}", file=sys.stderr)
        return 4
    except PavingLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
