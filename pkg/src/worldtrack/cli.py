"""Command-line front end: simulate, track, eval, run, sweep and stats.

Every subcommand accepts ``--config FILE`` (JSON or YAML) whose keys mirror
:class:`RunSpec`; explicit flags override the file.
"""

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import __version__
from .baselines import make_tracker
from .bench import (
    EvalConfig,
    aggregate,
    evaluate_scenario,
    projection_error_stats,
    stationary_pairs,
    stationary_pairs_from_log,
)
from .exceptions import ConfigError, WorldTrackError
from .io import (
    ingest_log,
    load_ground_truth,
    load_result,
    save_ground_truth,
    save_result,
    write_csv,
    write_log,
    write_report,
    write_timeline_csv,
)
from .simulator import ScenarioConfig, generate

METHODS = ("lmk", "random", "osl", "osom", "retrieval")
MATCHER_KEYS = ("beta_L", "beta_V", "alpha", "gamma")


@dataclass
class RunSpec:
    """One experiment: an input (scenario config or log), methods, configs,
    outputs and a seed.

    ``methods`` entries are ``"lmk"`` or ``"lmk:V"`` style strings; a bare
    method runs in ``mode``.  ``seeds`` turns a scenario input into a suite.
    """

    scenario: dict = None
    log: str = None
    truth: str = None
    methods: tuple = ("lmk",)
    mode: str = "V+L"
    matcher: dict = field(default_factory=dict)
    eval: dict = field(default_factory=dict)
    output: str = None
    seed: int = 0
    seeds: tuple = None

    def __post_init__(self):
        if (self.scenario is None) == (self.log is None):
            raise ConfigError("a run needs exactly one input: a scenario config or a log")
        if isinstance(self.methods, str):
            self.methods = tuple(m.strip() for m in self.methods.split(",") if m.strip())
        self.methods = tuple(self.methods)
        for m in self.methods:
            if m.split(":")[0].lower() not in METHODS:
                raise ConfigError(f"unknown method {m!r}; expected one of {METHODS}")
        unknown = set(self.matcher) - set(MATCHER_KEYS)
        if unknown:
            raise ConfigError(f"unknown matcher keys {sorted(unknown)}")
        if self.seeds is not None:
            self.seeds = tuple(int(s) for s in self.seeds)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "method" in d:
            d["methods"] = d.pop("method")
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown run config keys {sorted(unknown)}")
        return cls(**d)

    def eval_config(self):
        d = dict(self.eval)
        for key in ("radii", "deltas"):
            if d.get(key) is not None and not isinstance(d[key], (int, float, str)):
                d[key] = tuple(d[key])
        try:
            return EvalConfig(**d)
        except TypeError as exc:
            raise ConfigError(f"bad eval config: {exc}") from None

    def scenario_config(self, seed):
        d = dict(self.scenario)
        d["seed"] = seed
        return ScenarioConfig.from_dict(d)

    def method_modes(self):
        for m in self.methods:
            name, _, mode = m.partition(":")
            yield name.lower(), mode or self.mode

    def provenance(self):
        d = asdict(self)
        d.pop("output")
        if self.scenario is not None:
            d["scenario"] = ScenarioConfig.from_dict(dict(self.scenario)).to_dict()
            d["scenario"].pop("seed")
        d["eval"] = self.eval_config().to_dict()
        d["version"] = __version__
        return d


def load_config_file(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith((".yaml", ".yml")):
        import yaml

        data = yaml.safe_load(text)
    else:
        data = json.loads(text)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    return data


def _inputs(spec):
    """Yield (name, stream, ground truth) for each session of the run."""
    if spec.log is not None:
        log = ingest_log(spec.log)
        truth = load_ground_truth(spec.truth) if spec.truth else log.lifted_ground_truth()
        yield os.path.splitext(os.path.basename(spec.log))[0], log, truth
        return
    for seed in (spec.seeds if spec.seeds is not None else (spec.seed,)):
        scenario = generate(spec.scenario_config(seed))
        yield f"seed{seed}", scenario, scenario


def track(stream, method, mode="V+L", seed=0, matcher=None):
    tracker = make_tracker(method, mode=mode, seed=seed, **(matcher or {}))
    return tracker.fit(stream).result()


def run(spec):
    """Generate or load observations, track with every method, evaluate and
    write the report tables (and per-track timelines) when ``output`` is set."""
    config = spec.eval_config()
    evaluations, results = [], []
    for name, stream, truth in _inputs(spec):
        for method, mode in spec.method_modes():
            result = track(stream, method, mode, spec.seed, spec.matcher)
            evaluations.append(evaluate_scenario(result, truth, config, name))
            results.append((name, method, mode, result))
    report = aggregate(evaluations, spec.provenance())
    if spec.output:
        _ensure_parent(spec.output)
        write_report(report, spec.output)
        for name, method, mode, result in results:
            tag = f"{name}_{method}_{mode.replace('+', '')}"
            write_timeline_csv(result, f"{spec.output}_tracks_{tag}.csv")
    return report


def _ensure_parent(prefix):
    parent = os.path.dirname(prefix)
    if parent:
        os.makedirs(parent, exist_ok=True)


def _sweep_one(args):
    spec_dict, param, value = args
    d = dict(spec_dict)
    d["matcher"] = dict(d.get("matcher") or {}, **{param: value})
    d["output"] = None
    report = run(RunSpec.from_dict(d))
    return [dict(r, param=param, value=value) for r in report.rows]


def sweep(spec, param, values, workers=1):
    """Grid over one matcher hyperparameter; returns rows with ``param`` and
    ``value`` columns added."""
    if param not in MATCHER_KEYS:
        raise ConfigError(f"can only sweep matcher parameters {MATCHER_KEYS}, got {param!r}")
    base = asdict(spec)
    jobs = [(base, param, v) for v in values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_sweep_one, jobs))
    else:
        chunks = [_sweep_one(j) for j in jobs]
    rows = [r for chunk in chunks for r in chunk]
    if spec.output:
        _ensure_parent(spec.output)
        write_csv(rows, ("param", "value", "method", "mode", "delta_seconds", "radius_m", "pcl_mean",
                         "pcl_std", "n_keyframes", "n_objects"), f"{spec.output}.csv",
                  spec.provenance())
    return rows


# -- argument parsing ---------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", help="JSON or YAML file with run settings")
    p.add_argument("--seed", type=int, help="seed for the scenario and stochastic methods")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_input(p):
    p.add_argument("--log", help="observation log (JSONL)")
    p.add_argument("--truth", help="ground-truth .npz written by `simulate`")


def _add_method(p):
    p.add_argument("--method", help="comma-separated methods, e.g. lmk,osl or lmk:V")
    p.add_argument("--mode", choices=("V+L", "V", "L"))
    p.add_argument("--beta-L", dest="beta_L", type=float)
    p.add_argument("--beta-V", dest="beta_V", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=int)


def _add_eval(p):
    p.add_argument("--radii", help="comma-separated radii in meters, or 'object'")
    p.add_argument("--deltas", help="comma-separated offsets in seconds")
    p.add_argument("--seeds", help="comma-separated scenario seeds (suite)")


def build_parser():
    parser = argparse.ArgumentParser(prog="worldtrack", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a scenario, its log and ground truth")
    _add_common(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-aligned", action="store_true", help="omit aligned depth from the log")

    p = sub.add_parser("track", help="run one method and save its timelines")
    _add_common(p)
    _add_input(p)
    _add_method(p)
    p.add_argument("--out", required=True, help="result JSON path")
    p.add_argument("--timeline", help="also write a per-track CSV here")

    p = sub.add_parser("eval", help="evaluate saved timelines")
    _add_common(p)
    _add_eval(p)
    p.add_argument("--result", required=True)
    p.add_argument("--truth", help="ground-truth .npz")
    p.add_argument("--log", help="log to derive ground truth from when no .npz is given")
    p.add_argument("--out", required=True, help="report path prefix")

    p = sub.add_parser("run", help="simulate or load, track, evaluate and report")
    _add_common(p)
    _add_input(p)
    _add_method(p)
    _add_eval(p)
    p.add_argument("--out", help="report path prefix")

    p = sub.add_parser("sweep", help="grid over a matcher hyperparameter")
    _add_common(p)
    _add_input(p)
    _add_method(p)
    _add_eval(p)
    p.add_argument("--param", required=True, choices=MATCHER_KEYS)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV path prefix")

    p = sub.add_parser("stats", help="pairwise projection-error analysis")
    _add_common(p)
    p.add_argument("--log", help="analyse a log instead of a generated scenario")
    p.add_argument("--pairs", type=int, default=10000)
    p.add_argument("--out", help="JSON output path (default: stdout)")
    return parser


def _csv_list(text, kind=float):
    return [kind(x) if x != "object" else x for x in text.split(",") if x.strip()]


def _spec_from_args(args, need_input=True):
    d = load_config_file(args.config) if args.config else {}
    if "method" in d:
        d["methods"] = d.pop("method")
    if getattr(args, "log", None):
        d["log"] = args.log
        d.pop("scenario", None)
    if getattr(args, "truth", None):
        d["truth"] = args.truth
    if d.get("log") is None and d.get("scenario") is None:
        d["scenario"] = {}
    if getattr(args, "method", None):
        d["methods"] = args.method
    if getattr(args, "mode", None):
        d["mode"] = args.mode
    matcher = dict(d.get("matcher") or {})
    for key in MATCHER_KEYS:
        if getattr(args, key, None) is not None:
            matcher[key] = getattr(args, key)
    d["matcher"] = matcher
    ev = dict(d.get("eval") or {})
    if getattr(args, "radii", None):
        ev["radii"] = _csv_list(args.radii)
    if getattr(args, "deltas", None):
        ev["deltas"] = _csv_list(args.deltas)
    d["eval"] = ev
    if getattr(args, "seeds", None):
        d["seeds"] = _csv_list(args.seeds, int)
    if args.seed is not None:
        d["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        d["output"] = args.out
    return RunSpec.from_dict(d)


def _cmd_simulate(args):
    d = load_config_file(args.config) if args.config else {}
    scenario_d = d.get("scenario", d if "scenario" not in d and "log" not in d else {})
    scenario_d = {k: v for k, v in scenario_d.items()
                  if k in ScenarioConfig.__dataclass_fields__}
    if args.seed is not None:
        scenario_d["seed"] = args.seed
    config = ScenarioConfig.from_dict(scenario_d)
    scenario = generate(config)
    os.makedirs(args.out, exist_ok=True)
    write_log(scenario, os.path.join(args.out, "log.jsonl"), include_aligned=not args.no_aligned)
    save_ground_truth(scenario.ground_truth(), os.path.join(args.out, "truth.npz"))
    with open(os.path.join(args.out, "scenario.json"), "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote {scenario.obs_frame.size} observations over {scenario.n_frames} frames to {args.out}")


def _cmd_track(args):
    spec = _spec_from_args(args)
    _, stream, _ = next(_inputs(spec))
    method, mode = next(spec.method_modes())
    result = track(stream, method, mode, spec.seed, spec.matcher)
    save_result(result, args.out)
    if args.timeline:
        write_timeline_csv(result, args.timeline)
    print(f"{method} ({mode}): {result.n_tracks} tracks -> {args.out}")


def _cmd_eval(args):
    d = load_config_file(args.config) if args.config else {}
    ev = dict(d.get("eval") or {})
    if args.radii:
        ev["radii"] = tuple(_csv_list(args.radii))
    if args.deltas:
        ev["deltas"] = tuple(_csv_list(args.deltas))
    config = EvalConfig(**ev)
    result = load_result(args.result)
    if args.truth:
        truth = load_ground_truth(args.truth)
    elif args.log:
        truth = ingest_log(args.log).lifted_ground_truth()
    else:
        raise ConfigError("eval needs --truth or --log")
    params = {"result": os.path.basename(args.result), "method": result.method, "mode": result.mode,
              "matcher": result.params, "eval": config.to_dict(), "version": __version__}
    report = aggregate([evaluate_scenario(result, truth, config, os.path.basename(args.result))], params)
    _ensure_parent(args.out)
    write_report(report, args.out)
    _print_rows(report.rows)


def _print_rows(rows):
    for r in rows:
        print(f"{r['method']:>9} {r['mode']:>3}  delta={r['delta_seconds']:>6g}s  R={r['radius_m']}  "
              f"PCL={r['pcl_mean']:.3f} (n={r['n_keyframes']})")


def _cmd_run(args):
    report = run(_spec_from_args(args))
    _print_rows(report.rows)


def _cmd_sweep(args):
    spec = _spec_from_args(args)
    rows = sweep(spec, args.param, _csv_list(args.values, int if args.param == "gamma" else float),
                 workers=args.workers)
    for r in rows:
        print(f"{args.param}={r['value']:<8g} {r['method']:>9} {r['mode']:>3}  delta={r['delta_seconds']:g}s  "
              f"PCL={r['pcl_mean']:.3f}")


def _cmd_stats(args):
    if args.log:
        pairs = stationary_pairs_from_log(ingest_log(args.log), args.pairs, seed=args.seed or 0)
    else:
        d = load_config_file(args.config) if args.config else {}
        scenario_d = {k: v for k, v in d.get("scenario", d).items()
                      if k in ScenarioConfig.__dataclass_fields__}
        if args.seed is not None:
            scenario_d["seed"] = args.seed
        pairs = stationary_pairs(generate(ScenarioConfig.from_dict(scenario_d)), args.pairs)
    text = json.dumps(projection_error_stats(pairs).to_dict(), indent=1, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


COMMANDS = {"simulate": _cmd_simulate, "track": _cmd_track, "eval": _cmd_eval, "run": _cmd_run,
            "sweep": _cmd_sweep, "stats": _cmd_stats}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (WorldTrackError, ValueError, OSError) as exc:
        print(f"worldtrack {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
