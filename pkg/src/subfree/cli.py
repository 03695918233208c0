"""``subfree`` command line: gen | run | oracle | report.

Config files are flat ``key = value`` lines; ``#`` starts a comment. Keys are
the long option names with dashes or underscores (``trials = 200``,
``pattern = C5``). Flags given on the command line win over the file, and the
``SEED`` environment variable wins over both.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__, oracle
from .behrend import build_bc, build_bk, build_behrend_set
from .directed import GADGETS, random_gapdisj
from .generators import make_h_free, plant_disjoint_copies
from .graph import GraphError, SizeLimitError, parse_edge_list, pattern_from_name, write_edge_list
from .harness import (SUMMARY_COLUMNS, TESTERS, TRIAL_COLUMNS, RunSpec, default_workers, load_instance,
                      read_csv, replay_row, run_trials, summarize, write_csv)
from .hclass import is_in_H
from .sim import RoundLimitError

EXIT_OK, EXIT_FAIL, EXIT_VALIDATION, EXIT_RESOURCE = 0, 1, 2, 3
BOOL_TRUE = ("1", "true", "yes", "on")


def read_config(path: str | Path) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _apply_config(parser: argparse.ArgumentParser, config: dict[str, str]) -> None:
    known = {a.dest: a for a in parser._actions}
    defaults = {}
    for key, val in config.items():
        act = known.get(key)
        if act is None or key in ("help", "config"):
            raise ValueError(f"config key {key!r} is not an option of this command")
        if isinstance(act, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            defaults[key] = val.lower() in BOOL_TRUE
        else:
            defaults[key] = val
    parser.set_defaults(**defaults)


# ----------------------------------------------------------------------- gen

def _write_instance(prefix: str, graph, sidecar: dict) -> tuple[Path, Path]:
    edges = Path(prefix).with_suffix(".edges")
    side = Path(prefix).with_suffix(".json")
    edges.parent.mkdir(parents=True, exist_ok=True)
    edges.write_text(write_edge_list(graph) + "\n")
    side.write_text(json.dumps(sidecar, indent=1, sort_keys=True) + "\n")
    return edges, side


def cmd_gen(args) -> int:
    kinds = [k for k in ("planted", "free", "behrend_bk", "behrend_bc", "gapdisj") if getattr(args, k)]
    if len(kinds) != 1:
        raise ValueError("choose exactly one of --planted, --free, --behrend-bk, --behrend-bc, --gapdisj")
    kind = kinds[0]
    meta = {"kind": kind, "seed": args.seed}
    if kind in ("planted", "free"):
        if args.pattern is None or args.n is None or args.m is None:
            raise ValueError(f"--{kind} needs --pattern, --n and --m")
        h = pattern_from_name(args.pattern)
        if kind == "planted":
            inst = plant_disjoint_copies(args.n, args.m, h, args.eps, args.seed)
            graph, meta["construction"] = inst.graph, inst.sidecar()
            default = f"planted_{h.name}_n{args.n}_m{args.m}"
        else:
            graph = make_h_free(args.n, args.m, h, args.seed)
            meta["construction"] = {"pattern": h.name, "free_of": h.name}
            default = f"free_{h.name}_n{args.n}_m{args.m}"
    elif kind in ("behrend_bk", "behrend_bc"):
        b = build_behrend_set(args.layer, args.s)
        lg = (build_bk if kind == "behrend_bk" else build_bc)(args.s, args.layer, b)
        graph, meta["construction"] = lg.graph, lg.sidecar()
        default = f"{lg.variant}_{args.s}_{args.layer}"
    else:
        inst = random_gapdisj(args.nU, args.overlap, args.seed, args.gadget)
        graph, meta["construction"] = inst.graph, inst.sidecar()
        default = f"gapdisj_{args.gadget}_nU{args.nU}_o{args.overlap}"
    edges, side = _write_instance(args.out or default, graph, meta)
    print(f"wrote {edges} ({graph.n} vertices, {graph.m} edges) and {side}")
    return EXIT_OK


# ----------------------------------------------------------------------- run

def cmd_run(args) -> int:
    if args.replay:
        return _replay(args)
    if args.tester is None:
        raise ValueError("run needs a tester name (or --replay)")
    if args.instance is None:
        raise ValueError("run needs --instance")
    params = {k: getattr(args, k, None) for k in ("k", "eps", "pattern", "s", "alpha", "m_estimate",
                                                   "attempts", "repetitions", "max_reps", "mode")}
    if args.guess_m:
        params["guess_m"] = "true"
    spec = RunSpec.make(args.tester, args.instance, params, args.seed, args.engine)
    rows = run_trials(spec, args.trials, args.workers)
    n = load_instance(args.instance).graph.n
    summary = summarize(rows, n)
    prefix = Path(args.out or f"{args.tester}")
    prefix.parent.mkdir(parents=True, exist_ok=True)
    trials_csv = prefix.with_name(prefix.name + "_trials.csv")
    summary_csv = prefix.with_name(prefix.name + "_summary.csv")
    write_csv(trials_csv, rows, TRIAL_COLUMNS)
    write_csv(summary_csv, summary, SUMMARY_COLUMNS)
    for s in summary:
        print(f"{s['tester']} {s['params'] or '-'}: reject_rate={s['reject_rate']:.4f} "
              f"95% CI [{s['ci_low']:.4f}, {s['ci_high']:.4f}] over {s['trials']} trials; "
              f"rounds<={s['max_rounds']}, max_bits={s['max_bits']} (limit {s['bits_limit']})")
    print(f"wrote {trials_csv} and {summary_csv}")
    return EXIT_OK


def _replay(args) -> int:
    if args.trial is None:
        raise ValueError("--replay needs --trial")
    rows = [r for r in read_csv(args.replay) if int(r["trial"]) == args.trial]
    if not rows:
        raise ValueError(f"{args.replay} has no row for trial {args.trial}")
    fresh, diffs = replay_row(rows[0])
    print(json.dumps(fresh, sort_keys=True))
    if diffs:
        print("replay differs in: " + ", ".join(diffs))
        return EXIT_FAIL
    print("replay identical")
    return EXIT_OK


# -------------------------------------------------------------------- oracle

def cmd_oracle(args) -> int:
    q = args.query
    if q == "enumerate":
        if args.k is None:
            raise ValueError("enumerate needs --k")
        graphs = oracle.enumerate_connected(args.k)
        for p in graphs:
            print(f"{p.name}: {list(map(list, p.graph.edges))}")
        print(f"{len(graphs)} connected graphs on {args.k} vertices")
        return EXIT_OK
    if args.pattern is None:
        raise ValueError(f"{q} needs --pattern")
    h = pattern_from_name(args.pattern)
    if q == "member-H":
        anchor = is_in_H(h)
        print("not a member" if anchor is None else f"member; witness edge {anchor[0]} {anchor[1]}")
        return EXIT_OK
    if args.instance is None:
        raise ValueError(f"{q} needs --instance")
    g = parse_edge_list(Path(args.instance).read_text())
    if q == "contains":
        phi = oracle.contains_copy(g, h)
        print("no copy" if phi is None else f"copy at {list(phi)}")
    elif q == "count":
        print(oracle.count_copies(g, h))
    elif q == "packing":
        count, copies = oracle.packing_lb(g, h)
        print(count)
        for c in copies:
            print(" ".join(f"{u}-{v}" for u, v in c))
    else:
        print(oracle.min_deletion_to_h_free(g, h))
    return EXIT_OK


# -------------------------------------------------------------------- report

def cmd_report(args) -> int:
    rows = []
    for path in args.csv:
        rows.extend(read_csv(path))
    if not rows:
        raise ValueError("no trial rows to report")
    summary = summarize(rows)
    if args.out:
        write_csv(args.out, summary, SUMMARY_COLUMNS)
    for s in summary:
        print(f"{s['tester']} {s['instance']} {s['params'] or '-'} engine={s['engine']} seed={s['seed']}: "
              f"{s['rejects']}/{s['trials']} rejects, reject_rate={s['reject_rate']:.4f} "
              f"[{s['ci_low']:.4f}, {s['ci_high']:.4f}], max_bits={s['max_bits']}")
    return EXIT_OK


# -------------------------------------------------------------------- parser

def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="subfree", description="Distributed subgraph-freeness testers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value file; flags override it")
        p.add_argument("--seed", type=int, default=0, help="global seed (env SEED overrides)")

    g = sub.add_parser("gen", help="generate an instance (edge list + JSON sidecar)")
    common(g)
    for flag in ("--planted", "--free", "--behrend-bk", "--behrend-bc", "--gapdisj"):
        g.add_argument(flag, action="store_true")
    g.add_argument("--pattern")
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--eps", type=float, default=0.1)
    g.add_argument("--s", type=int, default=5)
    g.add_argument("--layer", type=int, default=11, help="prime layer size of the layered construction")
    g.add_argument("--nU", type=int, default=10)
    g.add_argument("--overlap", type=int, default=0)
    g.add_argument("--gadget", choices=GADGETS, default="paper")
    g.add_argument("--out", help="output prefix; writes PREFIX.edges and PREFIX.json")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run a tester for many seeded trials")
    common(r)
    r.add_argument("tester", nargs="?", choices=sorted(TESTERS))
    r.add_argument("--instance")
    r.add_argument("--k", type=int)
    r.add_argument("--eps", type=float)
    r.add_argument("--pattern")
    r.add_argument("--s", type=int)
    r.add_argument("--alpha", type=float)
    r.add_argument("--m-estimate", type=int)
    r.add_argument("--guess-m", action="store_true")
    r.add_argument("--attempts", type=int, help="override the attempt count")
    r.add_argument("--repetitions", type=int, help="override the tree tester repetition count")
    r.add_argument("--max-reps", type=int)
    r.add_argument("--mode", choices=("sample", "rigged", "adversarial"))
    r.add_argument("--engine", choices=("fast", "sim"), default="fast")
    r.add_argument("--trials", type=int, default=100)
    r.add_argument("--workers", type=int, default=default_workers())
    r.add_argument("--out", help="output prefix; writes PREFIX_trials.csv and PREFIX_summary.csv")
    r.add_argument("--replay", help="trial CSV to replay a row from")
    r.add_argument("--trial", type=int, help="trial index to replay")
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("oracle", help="exact answers on small instances")
    common(o)
    o.add_argument("query", choices=("contains", "count", "packing", "distance", "enumerate", "member-H"))
    o.add_argument("--instance")
    o.add_argument("--pattern")
    o.add_argument("--k", type=int)
    o.set_defaults(func=cmd_oracle)

    rep = sub.add_parser("report", help="summarise trial CSVs")
    common(rep)
    rep.add_argument("csv", nargs="+")
    rep.add_argument("--out", help="write the summary CSV here")
    rep.set_defaults(func=cmd_report)
    return parser, {"gen": g, "run": r, "oracle": o, "report": rep}


def parse_args(argv=None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        command = next((a for a in argv if a in subs), None)
        if command is None:
            raise ValueError("--config needs a subcommand")
        _apply_config(subs[command], read_config(known.config))
    args = parser.parse_args(argv)
    if os.environ.get("SEED", "").strip():
        args.seed = int(os.environ["SEED"])
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return args.func(args)
    except (SizeLimitError, RoundLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (GraphError, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
