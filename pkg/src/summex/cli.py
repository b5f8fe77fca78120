"""Command-line entry point for the offline and batch phases.

Subcommands: mine, calibrate, swap, pipeline, train, evaluate, serve.
Every run is reproducible from its flags and input files; --seed controls
all randomness. A --config key-value file supplies defaults, flags win.
"""

import argparse
import json
import sys

from .catalog import load_catalog, mine_closed_itemsets, save_catalog
from .config import merged, parse_config
from .engine import SessionConfig, run_full_pipeline, start_session, write_pipeline_log
from .ingest import BINNED_MAGIC, IngestError, equi_depth_bin, load_binned, load_table, save_binned
from .metrics import (
    ComponentScales,
    UtilityWeights,
    calibrate_scales,
    load_scales,
    save_scales,
)
from .swap import swap_summary

SCHEME_TOKENS = {"IC": "increasing-novelty", "DC": "decreasing-novelty"}


def _load_input(path, bins: int):
    """Accept either a binned matrix file or a raw CSV (binned on the fly)."""
    try:
        with open(path, "rb") as fh:
            magic = fh.read(len(BINNED_MAGIC))
    except FileNotFoundError:
        raise IngestError(f"input file not found: {path}") from None
    if magic == BINNED_MAGIC:
        return load_binned(path)
    return equi_depth_bin(load_table(path), bins)


def _weights_from(preset: str | None, scheme: str | None) -> UtilityWeights:
    if scheme in SCHEME_TOKENS:
        scheme = SCHEME_TOKENS[scheme]
    if scheme and scheme != "fixed":
        return UtilityWeights(scheme=scheme)
    return UtilityWeights(scheme="fixed", preset=preset or "BL")


def _load_scales(path) -> ComponentScales:
    if path is None:
        return ComponentScales.disabled()
    return load_scales(path)


def _summary_json(catalog, summary, extra=None) -> dict:
    from .metrics import uniformity_from_sd_sum

    items = []
    for iid in summary:
        it = catalog.itemset(iid)
        items.append(
            {
                "id": it.id,
                "description": {catalog.attribute_names[a]: v for a, v in it.desc},
                "size": it.size,
                "uniformity": uniformity_from_sd_sum(it.sd_sum, catalog.n_attrs),
            }
        )
    out = {"summary": list(summary), "itemsets": items}
    if extra:
        out.update(extra)
    return out


def cmd_mine(args, config) -> int:
    bins = merged(args.bins, config, "bins", 10, int)
    support = merged(args.support, config, "support", 10, int)
    data = _load_input(args.input, bins)
    catalog = mine_closed_itemsets(data, support, max_itemsets=args.max_itemsets)
    save_catalog(catalog, args.out)
    binned_out = args.binned_out or (args.out + ".bin")
    save_binned(data, binned_out)
    print(
        json.dumps(
            {
                "itemsets": len(catalog),
                "rows": catalog.n_rows,
                "attributes": catalog.attribute_names,
                "catalog": args.out,
                "binned": binned_out,
            }
        )
    )
    return 0


def cmd_calibrate(args, config) -> int:
    bins = merged(args.bins, config, "bins", 10, int)
    data = _load_input(args.input, bins)
    catalog = load_catalog(args.catalog, data)
    scales = calibrate_scales(
        catalog,
        data,
        sample_size=merged(args.sample_size, config, "scaling.sample_size", 200, int),
        seed=merged(args.seed, config, "scaling.seed", 0, int),
        k=merged(args.k, config, "k", 10, int),
    )
    save_scales(scales, args.out)
    print(json.dumps({"scales": args.out, "means": list(scales.means), "sds": list(scales.sds)}))
    return 0


def cmd_swap(args, config) -> int:
    bins = merged(args.bins, config, "bins", 10, int)
    data = _load_input(args.input, bins)
    catalog = load_catalog(args.catalog, data)
    summary = swap_summary(
        catalog,
        k=merged(args.k, config, "k", 10, int),
        uniformity_threshold=merged(args.threshold, config, "swap.threshold", 2.0, float),
    )
    print(json.dumps(_summary_json(catalog, summary)))
    return 0


def cmd_pipeline(args, config) -> int:
    bins = merged(args.bins, config, "bins", 10, int)
    data = _load_input(args.input, bins)
    catalog = load_catalog(args.catalog, data)
    scales = _load_scales(args.scales)
    weights = _weights_from(
        merged(args.preset, config, "weights.preset", None),
        merged(args.scheme, config, "weights.scheme", None),
    )
    session_config = SessionConfig(
        mode="full",
        strategy=merged(args.strategy, config, "strategy", "top1sum"),
        weights=weights,
        k=merged(args.k, config, "k", 10, int),
        t_total=merged(args.t, config, "t", 50, int),
        swap_threshold=merged(args.threshold, config, "swap.threshold", 2.0, float),
        operators=merged(args.operators, config, "operators", "all"),
        seed=merged(args.seed, config, "seed", 0, int),
        checkpoint_path=args.checkpoint,
    )
    session = start_session(catalog, session_config, scales)
    run_full_pipeline(session)
    if args.out:
        write_pipeline_log(session, args.out)
    from .engine import cumulated_utility

    print(
        json.dumps(
            _summary_json(
                catalog,
                session.current,
                extra={
                    "steps": session.step_index,
                    "cumulated_utility": cumulated_utility(session),
                    "truncated": session.truncated,
                    "log": args.out,
                },
            )
        )
    )
    return 0


def cmd_train(args, config) -> int:
    from .rl.checkpoint import TrainSettings, save_checkpoint
    from .rl.env import EnvSpec
    from .rl.train import train

    bins = merged(args.bins, config, "bins", 10, int)
    data = _load_input(args.input, bins)
    catalog = load_catalog(args.catalog, data)
    scales = _load_scales(args.scales)
    weights = _weights_from(
        merged(args.preset, config, "weights.preset", None),
        merged(args.scheme, config, "weights.scheme", None),
    )
    spec = EnvSpec(
        catalog=catalog,
        scales=scales,
        weights=weights,
        k=merged(args.k, config, "k", 10, int),
        steps_per_episode=merged(args.steps, config, "rl.steps_per_episode", 50, int),
        swap_threshold=merged(args.threshold, config, "swap.threshold", 2.0, float),
        operators=merged(args.operators, config, "operators", "all"),
    )
    settings = TrainSettings(
        discount=merged(args.discount, config, "rl.discount", 0.99, float),
        lr=merged(args.lr, config, "rl.lr", 1e-4, float),
        entropy_coef=merged(args.entropy, config, "rl.entropy", 0.01, float),
        workers=merged(args.workers, config, "rl.workers", 6, int),
        update_interval=merged(args.update_interval, config, "rl.update_interval", 20, int),
        episodes=merged(args.episodes, config, "rl.episodes", 4000, int),
        steps_per_episode=spec.steps_per_episode,
    )
    seed = merged(args.seed, config, "seed", 0, int)
    ckpt, reward_log = train(spec, settings, seed=seed)
    save_checkpoint(ckpt, args.out)
    if args.reward_log:
        with open(args.reward_log, "w", encoding="utf-8") as fh:
            fh.write("episode,worker,reward\n")
            for ep, worker, reward in reward_log:
                fh.write(f"{ep},{worker},{reward!r}\n")
    mean_tail = (
        sum(r for _, _, r in reward_log[-50:]) / max(1, len(reward_log[-50:]))
        if reward_log
        else 0.0
    )
    print(
        json.dumps(
            {
                "checkpoint": args.out,
                "episodes": settings.episodes,
                "mean_reward_last_50": mean_tail,
                "reward_log": args.reward_log,
            }
        )
    )
    return 0


def _parse_variant(token: str):
    from .evaluation import Variant

    parts = token.split(":")
    strategy = parts[0]
    preset, scheme, ckpt = "BL", "fixed", None
    if len(parts) > 1 and parts[1]:
        if parts[1] in SCHEME_TOKENS:
            scheme = SCHEME_TOKENS[parts[1]]
        else:
            preset = parts[1]
    if len(parts) > 2:
        ckpt = parts[2]
    name = parts[0] if len(parts) == 1 else f"{parts[0]}_{parts[1]}"
    return Variant(
        name=name, strategy=strategy, preset=preset, scheme=scheme, checkpoint_path=ckpt
    )


def cmd_evaluate(args, config) -> int:
    from .evaluation import load_ground_truth, run_benchmark

    bins = merged(args.bins, config, "bins", 10, int)
    data = _load_input(args.input, bins)
    catalog = load_catalog(args.catalog, data)
    scales = _load_scales(args.scales)
    gt = load_ground_truth(args.ground_truth) if args.ground_truth else None
    variants = [_parse_variant(tok) for tok in args.variant]
    seeds = [int(s) for s in (args.seeds or "0").split(",")]
    result = run_benchmark(
        catalog,
        scales,
        variants,
        t=merged(args.t, config, "t", 50, int),
        seeds=seeds,
        k=merged(args.k, config, "k", 10, int),
        gt=gt,
        swap_threshold=merged(args.threshold, config, "swap.threshold", 2.0, float),
    )
    result.to_csv(args.out)
    print(json.dumps({"rows": len(result.rows), "csv": args.out}))
    return 0


def cmd_serve(args, config) -> int:
    import uvicorn

    from .api import build_app_from_config

    addr = merged(args.addr, config, "serve.addr", "127.0.0.1:8000")
    host, _, port = addr.partition(":")
    app = build_app_from_config(config, cli_datasets=args.dataset, ui_dir=args.ui)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="summex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, needs_catalog=True):
        p.add_argument("--config", help="key-value config file; flags win")
        p.add_argument("--input", required=True, help="CSV or binned matrix file")
        p.add_argument("--bins", type=int, help="equi-depth bin count (default 10)")
        if needs_catalog:
            p.add_argument("--catalog", required=True, help="mined catalog file")
        p.add_argument("--seed", type=int, help="seed for all randomness (default 0)")

    p = sub.add_parser("mine", help="mine a closed-itemset catalog from a table")
    common(p, needs_catalog=False)
    p.add_argument("--support", type=int, help="minimum itemset support (default 10)")
    p.add_argument("--out", required=True, help="catalog output path")
    p.add_argument("--binned-out", help="binned matrix output (default: <out>.bin)")
    p.add_argument("--max-itemsets", type=int, help="abort when the catalog would exceed this")

    p = sub.add_parser("calibrate", help="estimate component scaling from random summaries")
    common(p)
    p.add_argument("--sample-size", type=int, help="calibration draws (default 200)")
    p.add_argument("--k", type=int, help="summary size (default 10)")
    p.add_argument("--out", required=True, help="scales output path")

    p = sub.add_parser("swap", help="one-shot bootstrap summary")
    common(p)
    p.add_argument("--k", type=int)
    p.add_argument("--threshold", type=float, help="uniformity threshold (default 2)")

    p = sub.add_parser("pipeline", help="run a full-guidance pipeline")
    common(p)
    p.add_argument("--k", type=int)
    p.add_argument("--t", type=int, help="pipeline length incl. bootstrap (default 50)")
    p.add_argument("--strategy", choices=["top1sum", "rlsum", "random"])
    p.add_argument("--preset", choices=["HU", "HD", "HN", "BL"])
    p.add_argument("--scheme", help="fixed | IC | DC | increasing-novelty | decreasing-novelty")
    p.add_argument("--threshold", type=float)
    p.add_argument("--operators", choices=["all", "2op"])
    p.add_argument("--checkpoint", help="policy checkpoint for rlsum")
    p.add_argument("--scales", help="component scales file")
    p.add_argument("--out", help="pipeline log output (JSON lines)")

    p = sub.add_parser("train", help="train the actor-critic policy")
    common(p)
    p.add_argument("--k", type=int)
    p.add_argument("--preset", choices=["HU", "HD", "HN", "BL"])
    p.add_argument("--scheme")
    p.add_argument("--threshold", type=float)
    p.add_argument("--operators", choices=["all", "2op"])
    p.add_argument("--scales")
    p.add_argument("--episodes", type=int)
    p.add_argument("--steps", type=int, help="operator steps per episode (default 50)")
    p.add_argument("--workers", type=int)
    p.add_argument("--update-interval", type=int)
    p.add_argument("--discount", type=float)
    p.add_argument("--lr", type=float)
    p.add_argument("--entropy", type=float)
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.add_argument("--reward-log", help="per-episode reward CSV")

    p = sub.add_parser("evaluate", help="benchmark variants into a CSV")
    common(p)
    p.add_argument("--k", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--scales")
    p.add_argument("--ground-truth", help="label<TAB>id,id,... file")
    p.add_argument("--variant", action="append", required=True, help="strategy[:preset|IC|DC[:ckpt]]")
    p.add_argument("--seeds", help="comma-separated seeds (default 0)")
    p.add_argument("--out", required=True, help="benchmark CSV path")

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--config", help="config with serve.addr and serve.datasets[]")
    p.add_argument("--addr", help="host:port (default 127.0.0.1:8000)")
    p.add_argument(
        "--dataset",
        action="append",
        help="id:input:catalog[:scales[:checkpoint]] (repeatable)",
    )
    p.add_argument("--ui", help="serve a built frontend directory at /ui")

    return parser


COMMANDS = {
    "mine": cmd_mine,
    "calibrate": cmd_calibrate,
    "swap": cmd_swap,
    "pipeline": cmd_pipeline,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "serve": cmd_serve,
}


def run_command(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = parse_config(args.config) if getattr(args, "config", None) else {}
    try:
        return COMMANDS[args.command](args, config)
    except BrokenPipeError:
        return 1
    except Exception as exc:
        print(f"summex {args.command}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
