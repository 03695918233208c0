"""Experiment orchestration: trial specs, the worker pool, CSV rows, replay.

A trial is fully described by ``(seed, tester, instance, params, engine,
trial)``; its global seed is ``trial_seed(seed, trial)``. Every CSV row
carries those fields, so any row can be rerun on its own.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

from .behrend import BehrendSet, LayeredGraph, build_bc, build_bk, detect_ks_behrend
from .cliques import test_ks_bounded_degree, test_ks_freeness, test_triangle_freeness
from .cycles import test_ck_freeness
from .directed import test_directed_ck, test_directed_diamond
from .graph import DiGraph, Graph, GraphError, parse_edge_list, pattern_from_name
from .hclass import HMember, test_h_freeness
from .rng import trial_seed
from .sim import Verdict, id_bits
from .trees import TreePattern, test_t_freeness

TRIAL_COLUMNS = ["seed", "tester", "instance", "instance_sha256", "params", "engine", "trial",
                 "trial_seed", "verdict", "rounds", "max_bits", "attempts", "witness"]
SUMMARY_COLUMNS = ["tester", "instance", "params", "engine", "seed", "trials", "rejects", "reject_rate",
                   "ci_low", "ci_high", "mean_rounds", "max_rounds", "max_bits", "bits_limit"]


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


# ------------------------------------------------------------------ instances

@dataclass
class Instance:
    path: str
    graph: Graph | DiGraph
    sidecar: dict = field(default_factory=dict)
    sha256: str = ""


def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".json")


def load_instance(path: str | Path) -> Instance:
    p = Path(path)
    data = p.read_bytes()
    g = parse_edge_list(data.decode())
    side = {}
    sp = sidecar_path(p)
    if sp.exists() and sp != p:
        side = json.loads(sp.read_text())
    return Instance(str(p), g, side, hashlib.sha256(data).hexdigest())


def layered_from_sidecar(inst: Instance) -> LayeredGraph:
    side = inst.sidecar.get("construction", inst.sidecar)
    if "X" not in side or "variant" not in side:
        raise GraphError(f"{inst.path}: sidecar lacks the layered construction (X, variant)")
    s, n = int(side["s"]), int(side["n"])
    build = build_bk if side["variant"] == "BK" else build_bc
    lg = build(s, n, BehrendSet(n, s, tuple(side["X"])))
    if lg.graph.edges != inst.graph.edges:
        raise GraphError(f"{inst.path}: edges do not match the construction in the sidecar")
    return lg


# ------------------------------------------------------------------- testers

def _f(params, key, default=None, cast: Callable = float):
    val = params.get(key, default)
    if val is None:
        raise ValueError(f"missing parameter {key!r}")
    return cast(val)


def _opt_int(params, key):
    val = params.get(key)
    return None if val in (None, "") else int(val)


def _need_undirected(g, tester):
    if g.directed:
        raise GraphError(f"tester {tester!r} runs on undirected instances")


def _need_directed(g, tester):
    if not g.directed:
        raise GraphError(f"tester {tester!r} runs on directed instances")


def _run_ck(inst, p, seed, engine):
    _need_undirected(inst.graph, "ck")
    return test_ck_freeness(inst.graph, _f(p, "k", cast=int), _f(p, "eps"), seed, engine,
                            _opt_int(p, "attempts"))


def _run_tree(inst, p, seed, engine):
    t = TreePattern.from_pattern(pattern_from_name(_f(p, "pattern", cast=str)))
    return test_t_freeness(inst.graph, t, seed, engine, _opt_int(p, "repetitions"))


def _run_hclass(inst, p, seed, engine):
    _need_undirected(inst.graph, "hclass")
    member = HMember.of(pattern_from_name(_f(p, "pattern", cast=str)))
    return test_h_freeness(inst.graph, member, _f(p, "eps"), seed, engine, _opt_int(p, "attempts"))


def _run_triangle(inst, p, seed, engine):
    _need_undirected(inst.graph, "triangle")
    return test_triangle_freeness(inst.graph, seed, engine)


def _run_ks(inst, p, seed, engine):
    _need_undirected(inst.graph, "ks")
    guess = str(p.get("guess_m", "false")).lower() in ("1", "true", "yes")
    return test_ks_freeness(inst.graph, _f(p, "s", cast=int), _f(p, "eps"), _opt_int(p, "m_estimate"),
                            seed, engine, guess)


def _run_ks_bounded(inst, p, seed, engine):
    _need_undirected(inst.graph, "ks-bounded")
    return test_ks_bounded_degree(inst.graph, _f(p, "s", cast=int), _f(p, "alpha"), _f(p, "eps"),
                                  seed, engine)


def _run_behrend(inst, p, seed, engine):
    _need_undirected(inst.graph, "behrend")
    mode = _f(p, "mode", "sample", str)
    target = layered_from_sidecar(inst) if mode != "sample" else inst.graph
    s = _f(p, "s", inst.sidecar.get("construction", inst.sidecar).get("s"), int)
    return detect_ks_behrend(target, s, seed, _f(p, "max_reps", 100, int), mode, engine)


def _run_directed_diamond(inst, p, seed, engine):
    _need_directed(inst.graph, "directed-diamond")
    return test_directed_diamond(inst.graph, _f(p, "eps"), seed, engine, _opt_int(p, "attempts"))


def _run_directed_ck(inst, p, seed, engine):
    _need_directed(inst.graph, "directed-ck")
    return test_directed_ck(inst.graph, _f(p, "k", cast=int), _f(p, "eps"), seed, engine,
                            _opt_int(p, "attempts"))


TESTERS: dict[str, Callable[[Instance, dict, int, str], Verdict]] = {
    "ck": _run_ck,
    "tree": _run_tree,
    "hclass": _run_hclass,
    "triangle": _run_triangle,
    "ks": _run_ks,
    "ks-bounded": _run_ks_bounded,
    "behrend": _run_behrend,
    "directed-diamond": _run_directed_diamond,
    "directed-ck": _run_directed_ck,
}

# parameters each tester reads; anything else given on the command line is dropped
TESTER_PARAMS = {
    "ck": ("k", "eps", "attempts"),
    "tree": ("pattern", "repetitions"),
    "hclass": ("pattern", "eps", "attempts"),
    "triangle": (),
    "ks": ("s", "eps", "m_estimate", "guess_m"),
    "ks-bounded": ("s", "alpha", "eps"),
    "behrend": ("s", "max_reps", "mode"),
    "directed-diamond": ("eps", "attempts"),
    "directed-ck": ("k", "eps", "attempts"),
}


def encode_params(params: dict) -> str:
    return ";".join(f"{k}={params[k]}" for k in sorted(params) if params[k] is not None)


def decode_params(text: str) -> dict:
    out = {}
    for part in filter(None, text.split(";")):
        key, _, val = part.partition("=")
        out[key] = val
    return out


# ---------------------------------------------------------------------- runs

@dataclass(frozen=True)
class RunSpec:
    tester: str
    instance: str
    params: tuple[tuple[str, str], ...]
    seed: int
    engine: str = "fast"

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    @classmethod
    def make(cls, tester: str, instance: str, params: dict, seed: int, engine: str = "fast") -> "RunSpec":
        if tester not in TESTERS:
            raise ValueError(f"unknown tester {tester!r}; choose from {sorted(TESTERS)}")
        keep = {k: str(v) for k, v in params.items() if k in TESTER_PARAMS[tester] and v is not None}
        return cls(tester, str(instance), tuple(sorted(keep.items())), int(seed), engine)


def _witness_text(w: Any) -> str:
    return "" if w is None else json.dumps(w, separators=(",", ":"), default=_plain)


def _plain(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def trial_row(spec: RunSpec, inst: Instance, trial: int) -> dict:
    ts = trial_seed(spec.seed, trial)
    v = TESTERS[spec.tester](inst, spec.param_dict, ts, spec.engine)
    return {"seed": spec.seed, "tester": spec.tester, "instance": spec.instance,
            "instance_sha256": inst.sha256, "params": encode_params(spec.param_dict),
            "engine": spec.engine, "trial": trial, "trial_seed": ts, "verdict": v.decision,
            "rounds": v.rounds, "max_bits": v.max_bits if v.max_bits is not None else "",
            "attempts": v.attempts, "witness": _witness_text(v.witness)}


_WORKER: dict = {}


def _init_worker(spec: RunSpec) -> None:
    _WORKER["spec"] = spec
    _WORKER["inst"] = load_instance(spec.instance)


def _work(trial: int) -> dict:
    return trial_row(_WORKER["spec"], _WORKER["inst"], trial)


def run_trials(spec: RunSpec, trials: int, workers: int = 1,
               first: int = 0) -> list[dict]:
    """Rows for trials ``first .. first+trials-1``, ordered by trial index."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    indices = range(first, first + trials)
    if workers == 1:
        inst = load_instance(spec.instance)
        return [trial_row(spec, inst, t) for t in indices]
    with Pool(workers, initializer=_init_worker, initargs=(spec,)) as pool:
        rows = pool.map(_work, indices, chunksize=max(1, trials // (4 * workers)))
    return sorted(rows, key=lambda r: r["trial"])


def summarize(rows: Sequence[dict], n: int | None = None) -> list[dict]:
    """One summary line per (tester, instance, params, engine, seed) group."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        key = (r["tester"], r["instance"], r["params"], r["engine"], int(r["seed"]))
        groups.setdefault(key, []).append(r)
    out = []
    for (tester, instance, params, engine, seed), rs in groups.items():
        rej = sum(1 for r in rs if r["verdict"] == "reject")
        lo, hi = wilson_interval(rej, len(rs))
        rounds = [int(r["rounds"]) for r in rs]
        bits = [int(r["max_bits"]) for r in rs if str(r["max_bits"]) != ""]
        out.append({"tester": tester, "instance": instance, "params": params, "engine": engine,
                    "seed": seed, "trials": len(rs), "rejects": rej,
                    "reject_rate": round(rej / len(rs), 6), "ci_low": round(lo, 6), "ci_high": round(hi, 6),
                    "mean_rounds": round(sum(rounds) / len(rounds), 3), "max_rounds": max(rounds),
                    "max_bits": max(bits) if bits else "",
                    "bits_limit": 8 * id_bits(n) if n is not None else ""})
    return out


def write_csv(path: str | Path, rows: Iterable[dict], columns: Sequence[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns))
        w.writeheader()
        for r in rows:
            w.writerow(r)


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def replay_row(row: dict) -> tuple[dict, list[str]]:
    """Rerun the trial a CSV row describes; returns the fresh row and the
    names of the columns that differ."""
    spec = RunSpec(row["tester"], row["instance"], tuple(sorted(decode_params(row["params"]).items())),
                   int(row["seed"]), row["engine"])
    inst = load_instance(spec.instance)
    if row.get("instance_sha256") and row["instance_sha256"] != inst.sha256:
        raise GraphError(f"{spec.instance} changed since the row was written (sha256 mismatch)")
    fresh = trial_row(spec, inst, int(row["trial"]))
    diffs = [c for c in TRIAL_COLUMNS if str(fresh[c]) != str(row.get(c, ""))]
    return fresh, diffs


def default_workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))
