"""Command-line front end: ``simulate``, ``fit``, ``train``, ``evaluate``, ``act``.

Every command that writes files also writes ``<out>.manifest.json`` with
input/output SHA-256 digests, the configuration and the wall-clock time.

Exit codes: 0 success, 2 usage, 3 data format, 4 numeric or capacity failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import core, estimator, learner, propensity, simworld
from .errors import (CapacityError, ConfigError, DomainError, EstimationError, FormatError,
                     PolicyError, TrainingError)

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_NUMERIC = 0, 2, 3, 4
WORKERS_ENV = "WARMSTART_WORKERS"
REPORT_HEADER = "method\ttau\tdelta\tT\testimate\tinterval"


class UsageError(Exception):
    pass


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out, command: str, inputs, outputs, config: dict, started: float) -> None:
    manifest = {
        "command": command,
        "inputs": {str(p): sha256(p) for p in inputs if p},
        "outputs": {str(p): sha256(p) for p in outputs},
        "config": config,
        "wall_clock_seconds": round(time.time() - started, 6),
    }
    core.atomic_write(f"{out}.manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _positive_tau(value: str) -> float:
    tau = float(value)
    if not 0 < tau <= 1:
        raise UsageError(f"--tau must lie in (0, 1], got {value}")
    return tau


def _rates(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"bad --learning-rates {text!r}") from None


def _load_events(path, catalog_path=None) -> core.Dataset:
    catalog = core.read_catalog(catalog_path) if catalog_path else None
    return core.read_events(path, catalog)


def _catalog(data: core.Dataset, catalog_path=None) -> dict:
    catalog = data.action_catalog()
    if catalog_path:
        catalog.update(core.read_catalog(catalog_path))
    return catalog


# --------------------------------------------------------------------------
# commands

def cmd_simulate(args) -> int:
    started = time.time()
    world = simworld.read_world(args.world)
    seq = simworld.read_sequence(args.sequence, world)
    if args.rounds is not None:
        if args.rounds < 1:
            raise UsageError("--rounds must be >= 1")
        seq = simworld.cycle_sequence(seq, args.rounds)
    if seq.T < 1:
        raise UsageError("the policy sequence has no rounds")
    data = simworld.log_events(world, seq, args.seed)
    if args.split_at is not None:
        if not 0 <= args.split_at <= data.T:
            raise UsageError("--split-at outside the log")
        data = core.Dataset(data.events, args.split_at)
    core.write_events(args.out, data)
    outputs = [args.out]
    if args.catalog_out:
        core.write_catalog(args.catalog_out, world.action_features)
        outputs.append(args.catalog_out)
    write_manifest(args.out, "simulate", [args.world, args.sequence], outputs,
                   {"seed": args.seed, "rounds": seq.T, "split_at": args.split_at}, started)
    print(f"wrote {data.T} events to {args.out}")
    return EXIT_OK


def cmd_fit(args) -> int:
    started = time.time()
    data = _load_events(args.events)
    if data.T == 0:
        raise FormatError("events file is empty")
    if args.scope == "split" and data.split is None:
        raise UsageError("--scope split needs a #split marker in the events file")
    result = propensity.fit_scoped(data, args.scope)
    if args.scope == "split":
        stem, suffix = os.path.splitext(args.out)
        outs = [f"{stem}.train{suffix}", f"{stem}.test{suffix}"]
        for path, table in zip(outs, result):
            propensity.write_table(path, table)
    else:
        outs = [args.out]
        propensity.write_table(args.out, result)
    write_manifest(args.out, "fit", [args.events], outs, {"scope": args.scope}, started)
    for p in outs:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_train(args) -> int:
    started = time.time()
    tau = _positive_tau(args.tau)
    data = _load_events(args.events, args.catalog).train_part()
    if data.T == 0:
        raise FormatError("no training events")
    cfg = learner.TrainConfig(_rates(args.learning_rates), args.passes, tau, args.seed,
                              weighted=not args.naive)
    table = propensity.read_table(args.table) if not args.naive else None
    candidates = learner.sweep(data, table, cfg, workers=args.workers)
    print("learning_rate\ttrain_error\tstatus")
    for c in candidates:
        status = "diverged" if c.diverged else "ok"
        print(f"{c.learning_rate!r}\t{c.train_error:.6g}\t{status}")
    best = learner.choose(candidates)
    print(f"selected\t{best.learning_rate!r}")
    learner.write_model(args.out, best.model)
    write_manifest(args.out, "train", [args.events, args.table, args.catalog], [args.out],
                   {"tau": tau, "learning_rates": list(cfg.learning_rates), "passes": cfg.passes,
                    "seed": cfg.seed, "naive": args.naive}, started)
    return EXIT_OK


def parse_policy_spec(spec: str):
    """``random``, ``model:PATH`` (or a bare path) or ``naive:PATH``."""
    if spec == "random":
        return "Random", None
    kind, sep, path = spec.partition(":")
    if sep and kind == "naive":
        return "Naive", path
    if sep and kind == "model":
        return "Learned", path
    return "Learned", spec


def format_row(name: str, est: estimator.ValueEstimate) -> str:
    return (f"{name}\t{est.tau!r}\t{est.delta!r}\t{est.T}\t{est.point:.6f}\t"
            f"[{est.ci_low:.6f},{est.ci_high:.6f}]")


def evaluate_specs(data: core.Dataset, table, specs, cfg: core.EstimatorConfig, catalog: dict,
                   seed=None) -> list:
    rows = [REPORT_HEADER]
    for spec in specs:
        name, path = parse_policy_spec(spec)
        if path is None:
            est = estimator.evaluate_random_baseline(data, table, cfg, seed)
        else:
            model = learner.read_model(path)
            policy = learner.ArgmaxPolicy(model, catalog, table, restrict_to_feasible=name != "Naive")
            est = estimator.evaluate_policy(data, policy, table, cfg)
        rows.append(format_row(name, est))
    return rows


def cmd_evaluate(args) -> int:
    started = time.time()
    tau = _positive_tau(args.tau)
    if not 0 < args.delta < 1:
        raise UsageError("--delta must lie in (0, 1)")
    full = _load_events(args.events, args.catalog)
    data = full.test_part()
    if data.T == 0:
        raise FormatError("no evaluation events")
    table = propensity.read_table(args.table)
    cfg = core.EstimatorConfig(tau, args.delta)
    rows = evaluate_specs(data, table, args.policy or ["random"], cfg,
                          _catalog(full, args.catalog), args.seed)
    text = "\n".join(rows) + "\n"
    sys.stdout.write(text)
    if args.out:
        core.atomic_write(args.out, text)
        inputs = [args.events, args.table, args.catalog]
        inputs += [p for _, p in map(parse_policy_spec, args.policy or []) if p]
        write_manifest(args.out, "evaluate", inputs, [args.out],
                       {"tau": tau, "delta": args.delta, "policies": args.policy, "seed": args.seed},
                       started)
    return EXIT_OK


def cmd_act(args) -> int:
    model = learner.read_model(args.model)
    catalog = core.read_catalog(args.catalog)
    if args.candidates:
        wanted = [a.strip() for a in args.candidates.split(",") if a.strip()]
        missing = [a for a in wanted if a not in catalog]
        if missing:
            raise UsageError(f"candidates missing from the catalog: {missing}")
        cands = {a: catalog[a] for a in wanted}
    elif args.table:
        table = propensity.read_table(args.table)
        cands = {a: catalog.get(a, core.EMPTY) for a in table.feasible_set(args.context_id)}
    else:
        cands = catalog
    context = core.parse_features(args.context_features)
    print(learner.act(model, context, cands))
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="warmstart",
                                description="Offline policy evaluation and warm-start training from logs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="log events from a synthetic world")
    s.add_argument("--world", required=True)
    s.add_argument("--sequence", required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--rounds", type=int)
    s.add_argument("--split-at", type=int)
    s.add_argument("--catalog-out", help="also write the world's full action catalog")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fit", help="fit the empirical propensity table")
    f.add_argument("events")
    f.add_argument("--scope", choices=[s.value for s in propensity.FitScope], default="all")
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_fit)

    t = sub.add_parser("train", help="learning-rate sweep of the SGD regressor")
    t.add_argument("events")
    t.add_argument("--table")
    t.add_argument("--catalog")
    t.add_argument("--tau", default="0.05")
    t.add_argument("--learning-rates", default=",".join(map(str, learner.DEFAULT_LEARNING_RATES)))
    t.add_argument("--passes", type=int, default=1)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--naive", action="store_true", help="unweighted baseline")
    t.add_argument("--workers", type=int, default=int(os.environ.get(WORKERS_ENV, "1")))
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate", help="clipped IPS estimate with Chernoff interval")
    e.add_argument("events")
    e.add_argument("--table", required=True)
    e.add_argument("--catalog")
    e.add_argument("--policy", action="append",
                   help="random | model:PATH | naive:PATH (repeatable)")
    e.add_argument("--tau", default="0.05")
    e.add_argument("--delta", type=float, default=0.05)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")
    e.set_defaults(func=cmd_evaluate)

    a = sub.add_parser("act", help="choose an action for one context")
    a.add_argument("--model", required=True)
    a.add_argument("--catalog", required=True)
    a.add_argument("--table")
    a.add_argument("--context-id", default="")
    a.add_argument("--context-features", default="")
    a.add_argument("--candidates")
    a.set_defaults(func=cmd_act)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "train" and not args.naive and not args.table:
            raise UsageError("--table is required unless --naive")
        return args.func(args)
    except (UsageError, ConfigError, ValueError) as exc:
        if isinstance(exc, FormatError) or isinstance(exc, DomainError):
            code = EXIT_FORMAT if isinstance(exc, FormatError) else EXIT_NUMERIC
        else:
            code = EXIT_USAGE
        print(f"error: {exc}", file=sys.stderr)
        return code
    except (EstimationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (TrainingError, CapacityError, PolicyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
