"""Experiment runner: reproducible commands over the whole lab.

Subcommands
    env-report   environment counts as JSON
    baselines    metrics CSV for the four baselines (info + control + actor)
    library      sample a representation library, evaluate it, CSV + JSON
    rollout      control evaluation for a library file (or the baselines)
    actor        actor training for a library sample (or the baselines)
    line1d       the 1d-line experiment as a small CSV
    verify       run every identity/bound verifier; nonzero exit on violation
    all          env-report + baselines + library + line1d + verify

Every command is a pure function of its flags and seed: outputs carry no
timestamps and rerunning reproduces files byte for byte.  The library
command appends one CSV row per representation and can resume an
interrupted run; resuming under a different configuration is refused (the
config hash is embedded in the CSV header).

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import reps, rng
from .actor import train_actor
from .lab import CubeLab
from .line1d import LineConfig, line_info_report, line_mixed_policy_eval
from .metrics_csv import (
    COLUMNS,
    LINE_COLUMNS,
    LINE_SCHEMA,
    append_row,
    config_hash,
    read_file,
    start_file,
)
from .policy import RolloutConfig, evaluate
from .reps import RepresentationSpec, spec_from_json, spec_to_json
from .verify import ACTOR_CERT_ITERS, ACTOR_CERT_LR, ACTOR_CERT_TOL, run_verification

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def metrics_row(
    lab: CubeLab,
    spec: RepresentationSpec,
    run_seed: int,
    rollout_cfg: RolloutConfig | None = None,
    actor_budget: tuple[float, int, float] | None = None,
) -> dict:
    """One CSV row: exact info metrics plus optional control/actor results."""
    report = lab.info_report(spec)
    row = {
        "spec_id": spec.id,
        "template": spec.name,
        "delta_a": report.delta_a,
        "delta_v": report.delta_v,
        "i_az_sv": report.i_az_sv,
        "i_ag_sv": report.i_ag_sv,
        "i_av_sz": report.i_av_sz,
        "h_a_sg": report.h_a_sg,
        "seed": spec.seed if spec.seed is not None else run_seed,
        "log_base": "nats",
    }
    if rollout_cfg is not None:
        outcome = evaluate(lab, spec, rollout_cfg)
        row["success_rate"] = outcome.success_rate
        row["off_support_steps"] = outcome.off_support_steps
    if actor_budget is not None:
        lr, iters, tol = actor_budget
        tr = train_actor(lab, spec, lr=lr, max_iters=iters, tol=tol, delta_a=report.delta_a)
        row.update(
            nll=tr.nll,
            excess=tr.excess,
            modeling_error=tr.modeling_error,
            iterations=tr.iterations,
            converged=tr.converged,
        )
    return row


def _map_ordered(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            yield from pool.map(fn, items)
    else:
        yield from map(fn, items)


def stratified_subset(specs: list[RepresentationSpec], k: int, seed: int) -> list[int]:
    """Indices of a template-stratified subset (largest-remainder quotas)."""
    if k <= 0 or k >= len(specs):
        return list(range(len(specs)))
    by_name: dict[str, list[int]] = {}
    for i, sp in enumerate(specs):
        by_name.setdefault(sp.name, []).append(i)
    names = sorted(by_name)
    quotas = {n: k * len(by_name[n]) / len(specs) for n in names}
    take = {n: int(quotas[n]) for n in names}
    remainder = k - sum(take.values())
    for n in sorted(names, key=lambda n: (-(quotas[n] - take[n]), n))[:remainder]:
        take[n] += 1
    gen = rng.substream(seed, rng.STREAM_SUBSET)
    chosen: list[int] = []
    for n in names:
        t = min(take[n], len(by_name[n]))
        if t:
            idx = gen.choice(len(by_name[n]), size=t, replace=False)
            chosen.extend(by_name[n][j] for j in idx)
    return sorted(chosen)


def _rollout_cfg(args) -> RolloutConfig:
    return RolloutConfig(
        n_tasks=args.tasks,
        n_rollouts_per_task=args.rollouts,
        margin=args.margin,
        horizon_cap=args.cap,
        seed=args.seed,
    )


def _actor_budget(args) -> tuple[float, int, float]:
    return (args.actor_lr, args.actor_iters, args.actor_tol)


def _build_lab(args) -> CubeLab:
    return CubeLab.build(args.grid_size, oracle_cache=args.oracle_cache)


# --- commands -----------------------------------------------------------------


def cmd_env_report(args) -> int:
    out = _out_dir(args)
    lab = _build_lab(args)
    _write_json(
        out / "env_report.json",
        {
            "grid_size": lab.n,
            "states": lab.world.n_states,
            "goals": lab.world.n_goals,
            "valid_pairs": lab.world.n_pairs,
            "unreachable_pairs": lab.oracle.n_unreachable,
        },
    )
    print(f"wrote {out / 'env_report.json'}")
    return EXIT_OK


def cmd_baselines(args) -> int:
    out = _out_dir(args)
    lab = _build_lab(args)
    cfg = _rollout_cfg(args)
    budget = _actor_budget(args)
    chash = config_hash(_config_dict(args, command="baselines"))
    path = out / "baselines.csv"
    start_file(path, chash)
    for spec in reps.baselines():
        append_row(path, metrics_row(lab, spec, args.seed, cfg, budget))
    print(f"wrote {path}")
    return EXIT_OK


def _config_dict(args, command: str, **extra) -> dict:
    cfg = {
        "command": command,
        "grid_size": args.grid_size,
        "seed": args.seed,
        "tasks": getattr(args, "tasks", None),
        "rollouts": getattr(args, "rollouts", None),
        "margin": getattr(args, "margin", None),
        "cap": getattr(args, "cap", None),
        "actor_lr": getattr(args, "actor_lr", None),
        "actor_iters": getattr(args, "actor_iters", None),
        "actor_tol": getattr(args, "actor_tol", None),
    }
    cfg.update(extra)
    return cfg


def cmd_library(args) -> int:
    out = _out_dir(args)
    lab = _build_lab(args)
    specs = reps.sample_library(args.library_size, args.seed)
    _write_json(out / "library.json", [spec_to_json(s) for s in specs])

    cfg_dict = _config_dict(
        args,
        command="library",
        library_size=args.library_size,
        rollout_subset=args.rollout_subset,
        train_actors=args.train_actors,
        vs_threshold=args.vs_threshold,
    )
    chash = config_hash(cfg_dict)
    _write_json(
        out / "library_config.json",
        {**cfg_dict, "template_weights": reps.TEMPLATE_WEIGHTS, "config_hash": chash},
    )

    path = out / "library_metrics.csv"
    done: set[str] = set()
    if path.exists():
        meta, rows = read_file(path)
        if meta.get("config_hash") != chash:
            print(
                f"refusing to resume {path}: config hash mismatch "
                f"({meta.get('config_hash')} != {chash})",
                file=sys.stderr,
            )
            return EXIT_USAGE
        done = {r["spec_id"] for r in rows}
    else:
        start_file(path, chash)

    roll_idx = set(stratified_subset(specs, args.rollout_subset, args.seed))
    cfg = _rollout_cfg(args)
    budget = _actor_budget(args) if args.train_actors else None
    todo = [(i, s) for i, s in enumerate(specs) if s.id not in done]

    def work(item):
        i, spec = item
        return metrics_row(lab, spec, args.seed, cfg if i in roll_idx else None, budget)

    for row in _map_ordered(work, todo, args.threads):
        append_row(path, row)
    print(f"wrote {path} ({len(todo)} new rows, {len(done)} resumed)")
    return EXIT_OK


def _load_specs(args) -> list[RepresentationSpec]:
    if args.library:
        objs = json.loads(Path(args.library).read_text())
        specs = [spec_from_json(o) for o in objs]
        if args.spec_id:
            wanted = set(args.spec_id)
            specs = [s for s in specs if s.id in wanted]
            missing = wanted - {s.id for s in specs}
            if missing:
                raise ValueError(f"spec ids not in library: {sorted(missing)}")
        return specs
    return reps.baselines()


def cmd_rollout(args) -> int:
    out = _out_dir(args)
    lab = _build_lab(args)
    specs = _load_specs(args)
    idx = set(stratified_subset(specs, args.rollout_subset, args.seed))
    specs = [s for i, s in enumerate(specs) if i in idx]
    cfg = _rollout_cfg(args)
    path = out / "rollout_metrics.csv"
    start_file(path, config_hash(_config_dict(args, command="rollout")))
    for row in _map_ordered(
        lambda s: metrics_row(lab, s, args.seed, cfg, None), specs, args.threads
    ):
        append_row(path, row)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_actor(args) -> int:
    out = _out_dir(args)
    lab = _build_lab(args)
    specs = _load_specs(args)
    if args.sample and args.library:
        gen = rng.substream(args.seed, rng.STREAM_VERIFY)
        pick = sorted(gen.choice(len(specs), size=min(args.sample, len(specs)), replace=False))
        specs = [specs[i] for i in pick]
    budget = _actor_budget(args)
    path = out / "actor_metrics.csv"
    start_file(path, config_hash(_config_dict(args, command="actor")))
    for row in _map_ordered(
        lambda s: metrics_row(lab, s, args.seed, None, budget), specs, args.threads
    ):
        append_row(path, row)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_line1d(args) -> int:
    out = _out_dir(args)
    cfg = LineConfig(
        radius=args.radius,
        gamma=args.gamma,
        horizon=args.line_horizon,
        n_rollouts_per_pair=args.line_rollouts,
        seed=args.seed,
    )
    path = out / "line1d.csv"
    start_file(
        path,
        config_hash(
            {
                "command": "line1d",
                "radius": args.radius,
                "gamma": args.gamma,
                "horizon": args.line_horizon,
                "rollouts": args.line_rollouts,
                "seed": args.seed,
            }
        ),
        schema=LINE_SCHEMA,
        columns=LINE_COLUMNS,
    )
    for phi in ("sign", "dist"):
        report = line_info_report(cfg, phi)
        outcome = line_mixed_policy_eval(cfg, phi)
        for d, rate in zip(outcome.distances.tolist(), outcome.success_rates.tolist()):
            append_row(
                path,
                {
                    "phi": phi,
                    "distance_class": d,
                    "success_rate": rate,
                    "delta_a": report.delta_a,
                    "delta_v": report.delta_v,
                    "i_az_sv": report.i_az_sv,
                },
                columns=LINE_COLUMNS,
            )
    print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    out = _out_dir(args)
    lab = _build_lab(args)
    library = reps.sample_library(args.library_size, args.seed)
    gen = rng.substream(args.seed, rng.STREAM_VERIFY)
    k = min(args.verify_specs, len(library))
    pick = sorted(gen.choice(len(library), size=k, replace=False))
    sample = [library[i] for i in pick]
    checks = run_verification(
        lab,
        sample,
        actor_lr=args.actor_lr,
        actor_iters=args.actor_iters,
        corrupt=args.inject_corruption,
    )
    ok = all(c.passed for c in checks)
    _write_json(
        out / "verification_report.json",
        {
            "all_pass": ok,
            "checks": [
                {
                    "name": c.name,
                    "subject": c.subject,
                    "value": c.value,
                    "threshold": c.threshold,
                    "pass": c.passed,
                }
                for c in checks
            ],
        },
    )
    for c in checks:
        if not c.passed:
            print(f"FAIL {c.name}[{c.subject}]: {c.value:.3e} > {c.threshold:.3e}", file=sys.stderr)
    print(f"wrote {out / 'verification_report.json'} ({'pass' if ok else 'FAIL'})")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_all(args) -> int:
    rc = cmd_env_report(args)
    rc = rc or cmd_baselines(args)
    rc = rc or cmd_library(args)
    rc = rc or cmd_line1d(args)
    return rc or cmd_verify(args)


# --- argument plumbing ----------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid-size", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--out-dir",
        default=os.environ.get("ASL_OUT_DIR", "out"),
        help="output directory (env ASL_OUT_DIR overrides the default 'out')",
    )
    p.add_argument("--threads", type=int, default=1, help="parallel spec evaluation fan-out")
    p.add_argument("--oracle-cache", default=None, help="optional binary cache file for the oracle")
    p.add_argument(
        "--config",
        default=None,
        help="JSON file of flag defaults (snake_case keys); explicit flags win",
    )


def _add_rollout_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tasks", type=int, default=600)
    p.add_argument("--rollouts", type=int, default=50)
    p.add_argument("--margin", type=int, default=6)
    p.add_argument("--cap", type=int, default=30)


def _add_actor_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--actor-lr", type=float, default=ACTOR_CERT_LR)
    p.add_argument("--actor-iters", type=int, default=ACTOR_CERT_ITERS)
    p.add_argument("--actor-tol", type=float, default=ACTOR_CERT_TOL)


def _add_line_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--gamma", type=float, default=0.9)
    p.add_argument("--line-horizon", type=int, default=None)
    p.add_argument("--line-rollouts", type=int, default=200)


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    """CLI parser; ``defaults`` (from --config JSON) overrides flag defaults.

    Subparsers parse into fresh namespaces, so the overrides are applied to
    every subparser rather than the root.
    """
    parser = argparse.ArgumentParser(
        prog="asl",
        description="exact goal-representation sufficiency lab on the Discrete Cube",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers: list[argparse.ArgumentParser] = []

    def add_parser(name: str, **kwargs) -> argparse.ArgumentParser:
        p = sub.add_parser(name, **kwargs)
        subparsers.append(p)
        return p

    p = add_parser("env-report", help="environment counts as JSON")
    _add_common(p)
    p.set_defaults(handler=cmd_env_report)

    p = add_parser("baselines", help="metrics for the four baselines")
    _add_common(p)
    _add_rollout_flags(p)
    _add_actor_flags(p)
    p.set_defaults(handler=cmd_baselines)

    p = add_parser("library", help="sample and evaluate a representation library")
    _add_common(p)
    _add_rollout_flags(p)
    _add_actor_flags(p)
    p.add_argument("--library-size", type=int, default=2000)
    p.add_argument(
        "--rollout-subset",
        type=int,
        default=0,
        help="evaluate control on a template-stratified subset (0 = all)",
    )
    p.add_argument("--train-actors", action="store_true")
    p.add_argument("--vs-threshold", type=float, default=0.2)
    p.set_defaults(handler=cmd_library)

    p = add_parser("rollout", help="control evaluation for a library file")
    _add_common(p)
    _add_rollout_flags(p)
    p.add_argument("--library", default=None, help="library JSON (default: the four baselines)")
    p.add_argument("--spec-id", action="append", default=None)
    p.add_argument("--rollout-subset", type=int, default=0)
    p.set_defaults(handler=cmd_rollout)

    p = add_parser("actor", help="actor training for a library sample")
    _add_common(p)
    _add_actor_flags(p)
    p.add_argument("--library", default=None)
    p.add_argument("--spec-id", action="append", default=None)
    p.add_argument("--sample", type=int, default=0, help="train on a seeded sample of the library")
    p.set_defaults(handler=cmd_actor)

    p = add_parser("line1d", help="1d integer-line experiment")
    _add_common(p)
    _add_line_flags(p)
    p.set_defaults(handler=cmd_line1d)

    p = add_parser("verify", help="run all identity/bound verifiers")
    _add_common(p)
    _add_actor_flags(p)
    p.add_argument("--library-size", type=int, default=2000)
    p.add_argument("--verify-specs", type=int, default=50)
    p.add_argument("--inject-corruption", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(handler=cmd_verify)

    p = add_parser("all", help="env-report + baselines + library + line1d + verify")
    _add_common(p)
    _add_rollout_flags(p)
    _add_actor_flags(p)
    _add_line_flags(p)
    p.add_argument("--library-size", type=int, default=2000)
    p.add_argument("--rollout-subset", type=int, default=0)
    p.add_argument("--train-actors", action="store_true")
    p.add_argument("--vs-threshold", type=float, default=0.2)
    p.add_argument("--verify-specs", type=int, default=50)
    p.add_argument("--inject-corruption", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(handler=cmd_all)

    if defaults:
        known = {a.dest for sp in subparsers for a in sp._actions}
        unknown = set(defaults) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for sp in subparsers:
            sp.set_defaults(**{k: v for k, v in defaults.items()})
    return parser


def _config_defaults(argv) -> dict:
    """Defaults from a --config JSON file; explicit flags still override."""
    path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif arg.startswith("--config="):
            path = arg.split("=", 1)[1]
    if path is None:
        return {}
    loaded = json.loads(Path(path).read_text())
    if not isinstance(loaded, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return loaded


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        parser = build_parser(_config_defaults(argv))
        args = parser.parse_args(argv)
        return args.handler(args)
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
