"""Command-line pipelines over the library.

Subcommands: ``synth-data`` (generate a synthetic dataset), ``pretrain``
(supervised actor training), ``train-rl`` (actor-critic fine-tuning),
``eval`` (metric reports), and ``broadcast-sim`` (style imitation on a
synthetic lecture).  Every command rereads its configuration from
``--config`` (flat ``key = value``) with explicit flags winning, derives
all randomness from ``--seed``, and drops a ``manifest.json`` next to
its outputs.  Reruns with identical inputs and seed produce identical
bytes except for the manifest's duration field.

The environment variable ``SHOTWRIGHT_THREADS`` caps worker parallelism;
execution is currently serial, so any cap of at least one is honored
as-is and recorded in the manifest.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .attributes import default_taxonomy
from .broadcast import (
    STYLE_PRESETS,
    BroadcastTrainConfig,
    actor_view_sequence,
    generate_scene,
    heuristic_edit,
    overlap_ratio,
    save_scene,
    save_sequence,
    style_metrics,
    train_broadcast_actor,
)
from .dataset import (
    DatasetFormatError,
    EPISODE_SHOTS,
    load_dataset,
    sample_episodes,
    save_dataset,
    save_taxonomy,
)
from .evaluation import (
    GreedyActorPolicy,
    UniformRandomPolicy,
    evaluate,
    format_report_row,
    report_to_pairs,
)
from .nn import CheckpointError
from .policy import ActorNetwork, CriticNetwork
from .training import (
    TrainConfig,
    apply_representation,
    generate_markov_dataset,
    load_checkpoint,
    load_config,
    pretrain_supervised,
    save_checkpoint,
    train_rl,
)

REPR_CHOICES = ("stored", "onehot", "synthetic")


def _thread_cap() -> int | None:
    raw = os.environ.get("SHOTWRIGHT_THREADS")
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"SHOTWRIGHT_THREADS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"SHOTWRIGHT_THREADS must be >= 1, got {value}")
    return value


def _write_manifest(
    out_dir: str,
    command: str,
    config: dict,
    inputs: dict[str, str],
    outputs: list[str],
    started: float,
) -> None:
    manifest = {
        "command": command,
        "config": config,
        "duration_seconds": round(time.time() - started, 3),
        "inputs": inputs,
        "outputs": sorted(outputs),
        "thread_cap": _thread_cap(),
        "tool": "shotwright",
        "version": __version__,
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_config(args: argparse.Namespace) -> TrainConfig:
    """Config file first, explicit flags override, defaults fill the rest."""
    config = load_config(args.config) if getattr(args, "config", None) else TrainConfig()
    overrides: dict[str, object] = {}
    mapping = {
        "seed": "seed",
        "epochs": "epochs",
        "batch_size": "batch_size",
        "actor_lr": "actor_lr",
        "critic_lr": "critic_lr",
        "gamma": "gamma",
        "iterations": "rl_iterations",
        "stride": "stride",
        "repr": "repr_mode",
        "concentration": "concentration",
    }
    for flag, field in mapping.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    if getattr(args, "teacher_forcing", None) is not None:
        overrides["teacher_forcing"] = args.teacher_forcing == "on"
    return dataclasses.replace(config, **overrides)


def _load_episodes(args: argparse.Namespace, config: TrainConfig):
    scenes = load_dataset(args.dataset)
    repr_rng = np.random.default_rng(np.random.SeedSequence([config.seed, 404]))
    scenes = apply_representation(scenes, config, repr_rng)
    episodes = sample_episodes(scenes, stride=config.stride)
    if not episodes:
        raise ValueError(
            f"dataset {args.dataset!r} yields no {EPISODE_SHOTS}-shot episodes"
        )
    return episodes


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_synth_data(args: argparse.Namespace) -> int:
    started = time.time()
    if args.shots < EPISODE_SHOTS and not args.allow_short:
        raise ValueError(
            f"--shots {args.shots} is below the {EPISODE_SHOTS}-shot episode window; "
            "pass --allow-short to write it anyway"
        )
    scenes = generate_markov_dataset(
        seed=args.seed, scenes=args.scenes, shots_per_scene=args.shots,
        determinism=args.determinism, law_seed=args.law_seed,
    )
    if args.with_distributions:
        config = TrainConfig(
            seed=args.seed, repr_mode="synthetic", concentration=args.concentration
        )
        rng = np.random.default_rng(np.random.SeedSequence([args.seed, 404]))
        scenes = apply_representation(scenes, config, rng)
    os.makedirs(args.out, exist_ok=True)
    dataset_path = os.path.join(args.out, "dataset.txt")
    taxonomy_path = os.path.join(args.out, "taxonomy.txt")
    save_dataset(scenes, dataset_path)
    save_taxonomy(default_taxonomy(), taxonomy_path)
    _write_manifest(
        args.out,
        "synth-data",
        {
            "scenes": args.scenes,
            "shots": args.shots,
            "seed": args.seed,
            "determinism": args.determinism,
            "law_seed": args.law_seed,
            "with_distributions": args.with_distributions,
            "concentration": args.concentration,
            "allow_short": args.allow_short,
        },
        inputs={},
        outputs=[dataset_path, taxonomy_path],
        started=started,
    )
    print(f"wrote {len(scenes)} scenes to {dataset_path}")
    return 0


def _cmd_pretrain(args: argparse.Namespace) -> int:
    started = time.time()
    config = _resolve_config(args)
    episodes = _load_episodes(args, config)
    init_rng = np.random.default_rng(np.random.SeedSequence([config.seed, 505]))
    actor = ActorNetwork(init_rng)
    critic = CriticNetwork(init_rng)
    losses = pretrain_supervised(actor, episodes, config)
    os.makedirs(args.out, exist_ok=True)
    ckpt_path = os.path.join(args.out, "checkpoint.txt")
    log_path = os.path.join(args.out, "pretrain_log.txt")
    save_checkpoint(ckpt_path, actor, critic)
    with open(log_path, "w", encoding="utf-8") as fh:
        for epoch, loss in enumerate(losses):
            fh.write(f"epoch {epoch} loss {loss:.6f}\n")
    _write_manifest(
        args.out,
        "pretrain",
        dataclasses.asdict(config),
        inputs={"dataset": args.dataset},
        outputs=[ckpt_path, log_path],
        started=started,
    )
    final = f"{losses[-1]:.6f}" if losses else "n/a"
    print(f"pretrained on {len(episodes)} episodes; final epoch loss {final}")
    return 0


def _cmd_train_rl(args: argparse.Namespace) -> int:
    started = time.time()
    config = _resolve_config(args)
    episodes = _load_episodes(args, config)
    actor, critic = load_checkpoint(args.ckpt)
    logs = train_rl(actor, critic, episodes, config)
    os.makedirs(args.out, exist_ok=True)
    ckpt_path = os.path.join(args.out, "checkpoint.txt")
    log_path = os.path.join(args.out, "rl_log.txt")
    save_checkpoint(ckpt_path, actor, critic)
    with open(log_path, "w", encoding="utf-8") as fh:
        for entry in logs:
            fh.write(
                f"iteration {entry.iteration} reward {entry.mean_total_reward:.4f} "
                f"actor_loss {entry.actor_loss:.6f} critic_loss {entry.critic_loss:.6f}\n"
            )
    _write_manifest(
        args.out,
        "train-rl",
        dataclasses.asdict(config),
        inputs={"dataset": args.dataset, "ckpt": args.ckpt},
        outputs=[ckpt_path, log_path],
        started=started,
    )
    if logs:
        print(
            f"fine-tuned for {len(logs)} iterations; "
            f"mean episode reward {logs[-1].mean_total_reward:.3f}"
        )
    else:
        print("fine-tuned for 0 iterations")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    started = time.time()
    config = _resolve_config(args)
    episodes = _load_episodes(args, config)
    eval_rng = np.random.default_rng(np.random.SeedSequence([config.seed, 606]))
    inputs = {"dataset": args.dataset}
    if args.policy == "random":
        policy = UniformRandomPolicy(eval_rng)
        label = "random"
    else:
        if not args.ckpt:
            raise ValueError("--ckpt is required unless --policy random")
        actor, _ = load_checkpoint(args.ckpt)
        policy = GreedyActorPolicy(actor)
        label = "actor"
        inputs["ckpt"] = args.ckpt
    report = evaluate(episodes, policy, eval_rng)
    if not np.all(np.isfinite(report.per_attribute)) or not np.isfinite(
        report.mean_reward_total
    ):
        raise ArithmeticError("evaluation produced a non-finite metric")

    os.makedirs(args.out, exist_ok=True)
    taxonomy = default_taxonomy()
    pairs = report_to_pairs(report, taxonomy)
    report_path = os.path.join(args.out, "report.txt")
    with open(report_path, "w", encoding="utf-8") as fh:
        for key, value in pairs:
            fh.write(f"{key} = {value}\n")
    record_path = os.path.join(args.out, "report.jsonl")
    with open(record_path, "w", encoding="utf-8") as fh:
        record = {"policy": label, **{k: v for k, v in pairs}}
        json.dump(record, fh, sort_keys=True)
        fh.write("\n")
    outputs = [report_path, record_path]
    if args.emit_csv:
        csv_path = os.path.join(args.out, "report.csv")
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(",".join(k for k, _ in pairs) + "\n")
            fh.write(",".join(v for _, v in pairs) + "\n")
        outputs.append(csv_path)
    _write_manifest(
        args.out,
        "eval",
        {**dataclasses.asdict(config), "policy": args.policy},
        inputs=inputs,
        outputs=outputs,
        started=started,
    )
    print(format_report_row(report, label=label))
    return 0


def _cmd_broadcast_sim(args: argparse.Namespace) -> int:
    started = time.time()
    if args.style not in STYLE_PRESETS:
        raise ValueError(
            f"unknown style {args.style!r}; choose from {', '.join(sorted(STYLE_PRESETS))}"
        )
    style = STYLE_PRESETS[args.style]
    train_seed, test_seed = (int(s.generate_state(1)[0]) for s in
                             np.random.SeedSequence([args.seed, 707]).spawn(2))
    scene_train = generate_scene(train_seed, args.length, args.event_rate, "train")
    scene_test = generate_scene(test_seed, args.length, args.event_rate, "test")
    ref_train = heuristic_edit(scene_train, style)
    ref_test = heuristic_edit(scene_test, style)
    config = BroadcastTrainConfig(
        seed=args.seed,
        clone_epochs=args.clone_epochs,
        aggregation_rounds=args.aggregation_rounds,
        rl_iterations=args.rl_iterations,
        gamma=args.gamma if args.gamma is not None else 0.95,
    )
    actor, _, _ = train_broadcast_actor(scene_train, style, config)
    predicted = actor_view_sequence(actor, scene_test)

    os.makedirs(args.out, exist_ok=True)
    paths = {
        "scene_train": os.path.join(args.out, "scene_train.txt"),
        "scene_test": os.path.join(args.out, "scene_test.txt"),
        "views_train_reference": os.path.join(args.out, "views_train_reference.txt"),
        "views_test_reference": os.path.join(args.out, "views_test_reference.txt"),
        "views_test_predicted": os.path.join(args.out, "views_test_predicted.txt"),
    }
    save_scene(scene_train, paths["scene_train"])
    save_scene(scene_test, paths["scene_test"])
    save_sequence(ref_train, paths["views_train_reference"])
    save_sequence(ref_test, paths["views_test_reference"])
    save_sequence(predicted, paths["views_test_predicted"])

    truth_m = style_metrics(ref_test)
    pred_m = style_metrics(predicted)
    overlap = overlap_ratio(predicted, ref_test)
    report_path = os.path.join(args.out, "style_report.txt")
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(f"style = {args.style}\n")
        fh.write(f"overlap = {overlap:.6f}\n")
        fh.write(f"avg_shot_length_predicted = {pred_m.average_shot_length:.4f}\n")
        fh.write(f"avg_shot_length_reference = {truth_m.average_shot_length:.4f}\n")
        fh.write(f"max_shot_length_predicted = {pred_m.max_shot_length}\n")
        fh.write(f"max_shot_length_reference = {truth_m.max_shot_length}\n")
        fh.write(f"switch_count_predicted = {pred_m.switch_count}\n")
        fh.write(f"switch_count_reference = {truth_m.switch_count}\n")
    _write_manifest(
        args.out,
        "broadcast-sim",
        {
            "style": args.style,
            "length": args.length,
            "seed": args.seed,
            "event_rate": args.event_rate,
            "clone_epochs": config.clone_epochs,
            "aggregation_rounds": config.aggregation_rounds,
            "rl_iterations": config.rl_iterations,
            "gamma": config.gamma,
        },
        inputs={},
        outputs=[*paths.values(), report_path],
        started=started,
    )
    print(
        f"style {args.style}: overlap {overlap:.3f}, "
        f"avg shot {pred_m.average_shot_length:.1f} vs {truth_m.average_shot_length:.1f}, "
        f"switches {pred_m.switch_count} vs {truth_m.switch_count}"
    )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_train_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--gamma", type=float, help="discount factor")
    parser.add_argument("--repr", choices=REPR_CHOICES, help="context representation")
    parser.add_argument("--concentration", type=float, help="synthetic distribution sharpness")
    parser.add_argument("--stride", type=int, help="episode window stride")
    parser.add_argument("--batch-size", type=int, dest="batch_size")
    parser.add_argument("--actor-lr", type=float, dest="actor_lr")
    parser.add_argument("--critic-lr", type=float, dest="critic_lr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shotwright",
        description="Sequential shot editing: attribute prediction and broadcast imitation.",
    )
    parser.add_argument("--version", action="version", version=f"shotwright {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-data", help="generate a synthetic Markov dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--scenes", type=int, default=100)
    p.add_argument("--shots", type=int, default=12, help="shots per scene")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--determinism", type=float, default=1.0)
    p.add_argument("--law-seed", type=int, dest="law_seed",
                   help="seed of the transition law (default: --seed); share it "
                        "across runs to get train/held-out splits of one dynamics")
    p.add_argument("--with-distributions", action="store_true", dest="with_distributions")
    p.add_argument("--concentration", type=float, default=1.0)
    p.add_argument("--allow-short", action="store_true", dest="allow_short",
                   help="permit scenes shorter than one episode window")
    p.set_defaults(func=_cmd_synth_data)

    p = sub.add_parser("pretrain", help="supervised actor pretraining")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int)
    p.add_argument("--teacher-forcing", choices=("on", "off"), dest="teacher_forcing")
    _add_train_flags(p)
    p.set_defaults(func=_cmd_pretrain)

    p = sub.add_parser("train-rl", help="actor-critic fine-tuning")
    p.add_argument("--dataset", required=True)
    p.add_argument("--ckpt", required=True, help="checkpoint to start from")
    p.add_argument("--out", required=True)
    p.add_argument("--iterations", type=int, help="policy-gradient iterations")
    _add_train_flags(p)
    p.set_defaults(func=_cmd_train_rl)

    p = sub.add_parser("eval", help="metric report over a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--ckpt", help="checkpoint holding the actor")
    p.add_argument("--out", required=True)
    p.add_argument("--policy", choices=("greedy", "random"), default="greedy")
    p.add_argument("--emit-csv", action="store_true", dest="emit_csv")
    _add_train_flags(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("broadcast-sim", help="train a style imitator on a synthetic lecture")
    p.add_argument("--out", required=True)
    p.add_argument("--style", default="slide_anchor",
                   help=f"one of: {', '.join(sorted(STYLE_PRESETS))}")
    p.add_argument("--length", type=int, default=600, help="ticks per scene")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--event-rate", type=float, default=1.0, dest="event_rate")
    p.add_argument("--clone-epochs", type=int, default=60, dest="clone_epochs")
    p.add_argument("--aggregation-rounds", type=int, default=8, dest="aggregation_rounds")
    p.add_argument("--rl-iterations", type=int, default=30, dest="rl_iterations")
    p.add_argument("--gamma", type=float)
    p.set_defaults(func=_cmd_broadcast_sim)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _thread_cap()  # validate early so a bad value fails every command
        return args.func(args)
    except (
        ValueError,
        ArithmeticError,
        DatasetFormatError,
        CheckpointError,
        FileNotFoundError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
