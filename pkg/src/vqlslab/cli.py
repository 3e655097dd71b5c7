"""Command line for the whole bench: generate, label, export, run, report.

Exit codes: 0 success, 1 usage or domain error, 2 finished with partial
failures (instances whose cost degenerated are listed on stderr).

Every value has three sources with fixed precedence: command-line flag,
then the --config INI file (section named after the subcommand), then the
built-in default.  The fully resolved configuration is stamped into every
artifact this tool writes, next to the package version, so a result file
identifies the run that produced it.  VQLS_BENCH_THREADS caps the worker
threads used for per-instance work (default 1).
"""

import argparse
import configparser
import json
import os
import sys
import zlib
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, driver, graphenc, initializers, problem
from .driver import OptimizerSpec, RunConfig
from .simulator import ParamSet


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; this tool reserves 2 for
    # partial failures, so usage problems are rerouted to exit 1
    def error(self, message):
        raise UsageError(message)


_OPT_KEYS = {
    "cost-kind": (str, "local", "cost to optimize: global or local"),
    "optimizer": (str, "adam", "update rule: adam or gradient_descent"),
    "lr": (float, 0.05, "learning rate"),
    "max-iters": (int, 800, "iteration budget per run"),
    "gamma": (float, 0.01, "convergence threshold on the cost"),
}

_SPECS = {
    "gen-data": {
        "qubits": (str, "4", "qubit sizes: single value or lo..hi range"),
        "count": (int, 10, "instances per size"),
        "density": (float, 0.01, "off-diagonal fill fraction"),
        "seed": (int, 0, "base seed for generation and the split"),
        "out": (str, None, "corpus directory to create"),
    },
    "label": {
        "corpus": (str, None, "corpus directory"),
        "restarts": (int, 3, "random restarts per instance"),
        "seed": (int, 0, "base seed for restart draws"),
        **_OPT_KEYS,
    },
    "export-graphs": {
        "corpus": (str, None, "corpus directory"),
        "out": (str, None, "dataset JSONL to write"),
    },
    "run": {
        "corpus": (str, None, "corpus directory"),
        "strategies": (str, "uniform", "comma-separated strategy tags"),
        "predictions": (str, None, "predictions JSONL for the predicted strategy"),
        "seeds": (int, 1, "independent runs per (instance, strategy)"),
        "split": (str, "all", "instance subset: train, val, test or all"),
        "seed": (int, 0, "base seed for uniform starts"),
        "out": (str, None, "output directory for trace and summary CSVs"),
        **_OPT_KEYS,
    },
    "report": {
        "runs": (str, None, "directory holding traces.csv"),
        "out": (str, None, "directory for report CSVs"),
        "gamma": (float, 0.01, "threshold for steps-to-threshold tables"),
        "baseline": (str, "uniform", "strategy the step reduction compares against"),
    },
}

_REQUIRED = {
    "gen-data": ("out",),
    "label": ("corpus",),
    "export-graphs": ("corpus", "out"),
    "run": ("corpus", "out"),
    "report": ("runs", "out"),
}


def build_parser() -> _Parser:
    parser = _Parser(prog="vqlslab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")
    for command, spec in _SPECS.items():
        p = sub.add_parser(command, add_help=True)
        p.add_argument("--config", type=str, default=None,
                       help="INI file with a [%s] section" % command)
        for name, (_, default, help_text) in spec.items():
            p.add_argument(f"--{name}", type=str, default=None,
                           help=f"{help_text} (default: {default})")
    return parser


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    """Merge flag > config-file > default into one plain dict."""
    spec = _SPECS[command]
    file_values = {}
    if args.config is not None:
        ini = configparser.ConfigParser()
        if not ini.read(args.config):
            raise UsageError(f"config file {args.config!r} not readable")
        if ini.has_section(command):
            file_values = dict(ini.items(command))
    resolved = {}
    for name, (conv, default, _) in spec.items():
        flag = getattr(args, name.replace("-", "_"))
        if flag is not None:
            raw = flag
        elif name in file_values:
            raw = file_values[name]
        else:
            resolved[name] = default
            continue
        try:
            resolved[name] = conv(raw)
        except ValueError as exc:
            raise UsageError(f"--{name}: {exc}") from exc
    for name in _REQUIRED[command]:
        if resolved.get(name) is None:
            raise UsageError(f"--{name} is required for {command}")
    return resolved


def _thread_count() -> int:
    raw = os.environ.get("VQLS_BENCH_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _run_config(cfg: dict, seed: int = 0) -> RunConfig:
    return RunConfig(
        cost_kind=cfg["cost-kind"],
        optimizer=OptimizerSpec(kind=cfg["optimizer"], lr=cfg["lr"]),
        max_iters=cfg["max-iters"],
        gamma=cfg["gamma"],
        seed=seed,
    )


def _stamp(cfg: dict) -> dict:
    return {"version": __version__, "config": cfg}


def _parse_qubit_range(text: str):
    if ".." in text:
        lo, hi = text.split("..", 1)
        values = list(range(int(lo), int(hi) + 1))
    else:
        values = [int(text)]
    if not values:
        raise ValueError(f"empty qubit range {text!r}")
    return values


def _instance_seed(base: int, *parts) -> int:
    tag = ":".join(str(p) for p in parts)
    return (zlib.crc32(tag.encode()) ^ base) & 0x7FFFFFFF


def _load_manifest(corpus: Path) -> dict:
    path = corpus / "manifest.json"
    if not path.exists():
        raise ValueError(f"no manifest.json under {corpus}")
    with open(path) as fh:
        return json.load(fh)


def cmd_gen_data(cfg: dict) -> int:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    ids = []
    for q in _parse_qubit_range(cfg["qubits"]):
        for k in range(cfg["count"]):
            sys_k = problem.gen_random_system(q, cfg["density"], cfg["seed"] + k)
            problem.save_instance(sys_k, out / sys_k.id)
            ids.append(sys_k.id)
    split = problem.split_dataset(ids, cfg["seed"])
    manifest = {
        **_stamp(cfg),
        "instances": ids,
        "split": {"train": split.train, "val": split.val, "test": split.test},
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(ids)} instances to {out}")
    return 0


def _label_one(corpus: Path, cfg: dict, run_cfg: RunConfig, iid: str):
    label_path = corpus / iid / "label.json"
    if label_path.exists():
        return iid, "skipped"
    sys_i = problem.load_instance(corpus / iid)
    result = driver.label_instance(
        sys_i, run_cfg, cfg["restarts"], _instance_seed(cfg["seed"], iid)
    )
    payload = {
        **_stamp(cfg),
        "id": iid,
        "qubits": sys_i.qubits,
        "params": result.params.angles.tolist(),
        "final_cost": result.final_cost,
        "final_costs": result.final_costs,
        "init_cost": float(result.trace.costs[0]),
        "steps": result.trace.converged_at,
        "converged": result.trace.converged_at is not None,
    }
    with open(label_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return iid, "labeled" if payload["converged"] else "unconverged"


def cmd_label(cfg: dict) -> int:
    corpus = Path(cfg["corpus"])
    manifest = _load_manifest(corpus)
    targets = manifest["split"]["train"] + manifest["split"]["val"]
    run_cfg = _run_config(cfg, cfg["seed"])
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        outcomes = list(pool.map(
            lambda iid: _label_one(corpus, cfg, run_cfg, iid), targets
        ))
    counts = {}
    for _, status in outcomes:
        counts[status] = counts.get(status, 0) + 1
    for iid, status in outcomes:
        if status == "unconverged":
            print(f"unconverged: {iid}", file=sys.stderr)
    print(", ".join(f"{v} {k}" for k, v in sorted(counts.items())) or "nothing to do")
    return 0


def _load_label(corpus: Path, iid: str):
    path = corpus / iid / "label.json"
    if not path.exists():
        return None
    with open(path) as fh:
        return json.load(fh)


def cmd_export_graphs(cfg: dict) -> int:
    corpus = Path(cfg["corpus"])
    manifest = _load_manifest(corpus)
    split_of = {}
    for name, ids in manifest["split"].items():
        for iid in ids:
            split_of[iid] = name
    records = []
    for iid in manifest["instances"]:
        sys_i = problem.load_instance(corpus / iid)
        meta = {"split": split_of.get(iid, "all")}
        label = None
        payload = _load_label(corpus, iid)
        if payload is not None:
            label = ParamSet(sys_i.qubits, np.asarray(payload["params"]))
            meta.update(
                init_cost=payload["init_cost"],
                final_cost=payload["final_cost"],
                steps=payload["steps"],
                converged=payload["converged"],
            )
        records.append(graphenc.record_from_system(sys_i, label=label, meta=meta))
    graphenc.export_dataset(records, cfg["out"])
    print(f"wrote {len(records)} records to {cfg['out']}")
    return 0


def _initial_params(strategy: str, sys_i, cfg: dict, run_index: int) -> ParamSet:
    if strategy == "uniform":
        seed = _instance_seed(cfg["seed"], sys_i.id, run_index)
        return initializers.init_uniform(sys_i.qubits, seed)
    if strategy == "predicted":
        return initializers.load_predicted(cfg["predictions"], sys_i.id)
    return initializers.initialize(initializers.InitStrategy(strategy), sys_i)


def cmd_run(cfg: dict) -> int:
    strategies = [s.strip() for s in cfg["strategies"].split(",") if s.strip()]
    if not strategies:
        raise UsageError("--strategies must name at least one strategy")
    for tag in strategies:
        if tag not in ("uniform", "pca", "minnorm", "rowmean", "predicted"):
            raise UsageError(f"unknown strategy {tag!r}")
    if "predicted" in strategies and cfg["predictions"] is None:
        raise UsageError("--predictions is required when the predicted strategy runs")

    corpus = Path(cfg["corpus"])
    manifest = _load_manifest(corpus)
    if cfg["split"] == "all":
        ids = manifest["instances"]
    elif cfg["split"] in manifest["split"]:
        ids = manifest["split"][cfg["split"]]
    else:
        raise UsageError(f"unknown split {cfg['split']!r}")

    run_cfg = _run_config(cfg, cfg["seed"])
    systems = {iid: problem.load_instance(corpus / iid) for iid in ids}
    tasks = [
        (iid, strategy, k)
        for iid in ids
        for strategy in strategies
        for k in range(cfg["seeds"])
    ]

    failures = []

    def work(task):
        iid, strategy, k = task
        sys_i = systems[iid]
        try:
            p0 = _initial_params(strategy, sys_i, cfg, k)
            return driver.optimize(sys_i, p0, run_cfg, strategy=strategy)
        except (driver.DegenerateCostError, ValueError) as exc:
            failures.append(f"{iid}/{strategy}/{k}: {exc}")
            return None

    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        results = list(pool.map(work, tasks))
    traces = [t for t in results if t is not None]

    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    driver.write_trace_csv(traces, out / "traces.csv")
    if traces:
        driver.write_summary_csv(driver.summarize(traces), out / "summary.csv")
    with open(out / "run_config.json", "w") as fh:
        json.dump({**_stamp(cfg), "failures": sorted(failures)}, fh,
                  indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(traces)} traces to {out}")
    if failures:
        for line in sorted(failures):
            print(f"failed: {line}", file=sys.stderr)
        return 2
    return 0


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def cmd_report(cfg: dict) -> int:
    runs = Path(cfg["runs"])
    traces = driver.read_trace_csv(runs / "traces.csv")
    if not traces:
        raise ValueError(f"no traces found under {runs}")
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    gamma = cfg["gamma"]

    sizes = sorted({t.qubits for t in traces})
    for q in sizes:
        with open(out / f"init_loss_q{q}.csv", "w") as fh:
            fh.write("strategy,instance,cost\n")
            for t in traces:
                if t.qubits == q:
                    fh.write(f"{t.strategy},{t.instance_id},{float(t.costs[0])!r}\n")

    # per-iteration mean and spread; finished traces hold their last value
    groups = {}
    for t in traces:
        groups.setdefault((t.strategy, t.qubits), []).append(t)
    with open(out / "convergence.csv", "w") as fh:
        fh.write("strategy,qubits,iter,mean_cost,std_cost\n")
        for (strategy, q) in sorted(groups):
            ts = groups[(strategy, q)]
            depth = max(len(t.costs) for t in ts)
            padded = np.stack([
                np.concatenate([t.costs, np.full(depth - len(t.costs), t.costs[-1])])
                for t in ts
            ])
            means = padded.mean(axis=0)
            stds = padded.std(axis=0)
            for k in range(depth):
                fh.write(f"{strategy},{q},{k},{float(means[k])!r},{float(stds[k])!r}\n")

    baseline = cfg["baseline"]
    with open(out / "steps_reduction.csv", "w") as fh:
        fh.write("strategy,qubits,median_steps,baseline_median_steps,reduction\n")
        for (strategy, q) in sorted(groups):
            base_ts = groups.get((baseline, q))
            med = _median_steps(groups[(strategy, q)], gamma)
            base_med = _median_steps(base_ts, gamma) if base_ts else None
            reduction = None
            if med is not None and base_med not in (None, 0.0):
                reduction = 1.0 - med / base_med
            fh.write(f"{strategy},{q},{_fmt(med)},{_fmt(base_med)},{_fmt(reduction)}\n")

    with open(out / "report_config.json", "w") as fh:
        json.dump(_stamp(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote report for {len(traces)} traces to {out}")
    return 0


def _median_steps(traces, gamma):
    steps = [driver.steps_to_threshold(t, gamma) for t in traces]
    steps = np.array([s for s in steps if s is not None])
    if steps.size == 0:
        return None
    return float(np.quantile(steps, 0.5, method="lower"))


_COMMANDS = {
    "gen-data": cmd_gen_data,
    "label": cmd_label,
    "export-graphs": cmd_export_graphs,
    "run": cmd_run,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required (try --help)")
        cfg = resolve_config(args.command, args)
        return _COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
