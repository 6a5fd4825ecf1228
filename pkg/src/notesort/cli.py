"""Command-line interface for batch experiments.

Subcommands: gen, train, calibrate, evaluate, sweep, sort, bench. Every run
echoes its fully resolved configuration (defaults and seeds included) into
the report header, so any output can be reproduced from the report alone.
Exit codes: 0 success, 1 runtime or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import datasets, evaluation, rejector, sorter
from .core import Authenticity, Fitness, SampleSet
from .head import HeadParams, TrainConfig, forward, load_head, save_head, train

__all__ = ["build_parser", "main"]


def _config_header(command: str, cfg: dict) -> str:
    pairs = " ".join(f"{k}={v}" for k, v in cfg.items())
    return f"# notesort {command}\n# config: {pairs}\n"


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def _caps_list(text: str) -> list[int | None]:
    return [None if part == "all" else int(part) for part in text.split(",") if part]


def _load_data(path: str) -> SampleSet:
    manifest = datasets.manifest_path(path)
    n_classes = None
    if manifest.exists():
        n_classes = datasets.read_manifest(manifest)["n_classes"]
    return datasets.read_fvec(path, n_classes=n_classes)


def _write_text(path: str, content: str) -> None:
    Path(path).write_text(content)
    print(f"wrote {path}")


def _emit_report(out: str | None, header: str, text: str, csv: str | None, doc: dict | None):
    """Print the text report; write --out in the format its extension selects."""
    print(header + text, end="")
    if out is None:
        return
    if out.endswith(".json") and doc is not None:
        _write_text(out, json.dumps(doc, indent=2) + "\n")
    elif out.endswith(".csv") and csv is not None:
        _write_text(out, "".join(f"# {line}\n" for line in header.splitlines()) + csv)
    else:
        _write_text(out, header + text)


def _train_config(args, seed: int | None = None) -> TrainConfig:
    return TrainConfig(
        episodes=args.episodes,
        batch_size=args.batch,
        learning_rate=args.lr,
        beta1=args.beta1,
        beta2=args.beta2,
        epsilon=args.epsilon,
        seed=args.seed if seed is None else seed,
    )


def _add_split_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--val-ratio", type=float, default=0.10, help="validation split ratio per class")
    p.add_argument("--test-ratio", type=float, default=0.10, help="test split ratio per class")


def _add_adam_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--batch", type=int, default=300, help="training batch size")
    p.add_argument("--lr", type=float, default=0.001, help="learning rate")
    p.add_argument("--beta1", type=float, default=0.9)
    p.add_argument("--beta2", type=float, default=0.999)
    p.add_argument("--epsilon", type=float, default=1e-8)


def cmd_gen(args) -> int:
    cfg = datasets.SynthConfig(
        n_classes=args.classes,
        dim=args.dim,
        per_class_counts=tuple(args.per_class) if len(args.per_class) > 1 else args.per_class[0],
        separation=args.separation,
        legacy_reject_fraction=args.legacy_fraction,
        legacy_widen=args.legacy_widen,
        legacy_shrink=args.legacy_shrink,
        cat1_count=args.cat1,
        cat1_dispersion=args.cat1_dispersion,
        seed=args.seed,
    )
    samples = datasets.gen_synthetic(cfg)
    datasets.write_fvec(args.out, samples)
    datasets.write_manifest(datasets.manifest_path(args.out), cfg)
    header = _config_header("gen", {
        "classes": args.classes, "dim": args.dim, "per_class": ",".join(map(str, args.per_class)),
        "separation": args.separation, "legacy_fraction": args.legacy_fraction,
        "legacy_widen": args.legacy_widen, "legacy_shrink": args.legacy_shrink,
        "cat1": args.cat1, "cat1_dispersion": args.cat1_dispersion,
        "seed": args.seed, "out": args.out,
    })
    print(header, end="")
    print(f"wrote {args.out}: {len(samples)} samples, dim {samples.dim}, {cfg.n_classes} classes")
    print(f"wrote {datasets.manifest_path(args.out)}")
    return 0


def cmd_train(args) -> int:
    data = _load_data(args.data)
    cfg = _train_config(args)
    # Split the full dataset so every subcommand with the same seed and
    # ratios sees the same partition, then train on the banknote strata.
    parts = datasets.stratified_split(data, args.val_ratio, args.test_ratio, seed=args.seed)
    train_set, val_set, test_set = (p.banknotes() for p in parts)
    params, history = train(train_set, cfg)
    save_head(args.out, params)
    history_path = args.history or args.out + ".loss.csv"
    lines = ["episode,loss"] + [f"{i},{float(v)!r}" for i, v in enumerate(history)]
    Path(history_path).write_text("\n".join(lines) + "\n")

    header = _config_header("train", {
        "data": args.data, "episodes": cfg.episodes, "batch": cfg.batch_size,
        "lr": cfg.learning_rate, "beta1": cfg.beta1, "beta2": cfg.beta2,
        "epsilon": cfg.epsilon, "seed": cfg.seed, "val_ratio": args.val_ratio,
        "test_ratio": args.test_ratio, "out": args.out, "history": history_path,
    })
    print(header, end="")
    print(f"train samples: {len(train_set)}  val: {len(val_set)}  test: {len(test_set)}")
    if cfg.episodes > 0:
        print(f"final loss: {history[-1]:.6f}")
    for name, subset in (("train", train_set), ("val", val_set), ("test", test_set)):
        predicted = np.argmax(forward(subset.features, params), axis=1) + 1
        print(f"{name} accuracy: {evaluation.accuracy(predicted, subset.labels):.6f}")
    print(f"wrote {args.out}")
    print(f"wrote {history_path}")
    return 0


def cmd_calibrate(args) -> int:
    if not 0.0 < args.quantile < 1.0:
        raise UsageError("--quantile must lie strictly between 0 and 1")
    params = load_head(args.model)
    data = _load_data(args.data)
    # Hold out the test split; calibration sees only train+val samples.
    train_set, val_set, _ = datasets.stratified_split(
        data, args.val_ratio, args.test_ratio, seed=args.seed
    )
    merged = SampleSet(
        np.concatenate([train_set.features, val_set.features]),
        np.concatenate([train_set.labels, val_set.labels]),
        np.concatenate([train_set.provenance, val_set.provenance]),
        data.n_classes,
    )
    max_probs = rejector.legacy_recognized_max_probs(params, merged)
    if max_probs.size == 0:
        raise DataError("no legacy-rejected samples recognized by the head")
    threshold = rejector.calibrate_threshold(max_probs, args.quantile)
    header = _config_header("calibrate", {
        "model": args.model, "data": args.data, "quantile": args.quantile,
        "seed": args.seed, "val_ratio": args.val_ratio, "test_ratio": args.test_ratio,
        "ecdf_out": args.ecdf_out,
    })
    print(header, end="")
    print(f"calibration samples (legacy-rejected, correctly classified): {max_probs.size}")
    print(f"threshold: {threshold!r}")
    if args.ecdf_out:
        ecdf = rejector.build_ecdf(max_probs)
        _write_text(args.ecdf_out, ecdf.to_csv())
    return 0


def cmd_sweep(args) -> int:
    params = load_head(args.model)
    data = _load_data(args.data)
    _, _, test_set = datasets.stratified_split(
        data, args.val_ratio, args.test_ratio, seed=args.seed
    )
    genuine = test_set.banknotes()
    cat1 = test_set.cat1()
    rows = rejector.threshold_sweep(params, args.thresholds, genuine, cat1)
    header = _config_header("sweep", {
        "model": args.model, "data": args.data,
        "thresholds": ",".join(repr(t) for t in args.thresholds),
        "seed": args.seed, "val_ratio": args.val_ratio, "test_ratio": args.test_ratio,
        "genuine_test": len(genuine), "cat1_test": len(cat1),
    })
    doc = {
        "config": {"model": args.model, "data": args.data, "seed": args.seed},
        "rows": [vars(r) for r in rows],
    }
    _emit_report(args.out, header, rejector.sweep_to_text(rows), rejector.sweep_to_csv(rows), doc)
    return 0


def cmd_evaluate(args) -> int:
    data = _load_data(args.data)
    if args.grid:
        # Episode counts come from the grid itself; the base carries the rest.
        base = TrainConfig(
            episodes=0, batch_size=args.batch, learning_rate=args.lr,
            beta1=args.beta1, beta2=args.beta2, epsilon=args.epsilon, seed=args.seed,
        )
        result = evaluation.run_grid(
            data, args.images_per_class, args.episodes, base, args.val_ratio, args.test_ratio
        )
        header = _config_header("evaluate", {
            "data": args.data, "grid": True,
            "images_per_class": ",".join("all" if c is None else str(c) for c in result.caps),
            "episodes": ",".join(str(e) for e in result.episodes),
            "batch": base.batch_size, "lr": base.learning_rate, "seed": base.seed,
            "val_ratio": args.val_ratio, "test_ratio": args.test_ratio,
        })
        doc = {
            "config": {"data": args.data, "seed": base.seed},
            "caps": ["all" if c is None else c for c in result.caps],
            "episodes": list(result.episodes),
            "accuracy": result.cells.tolist(),
        }
        _emit_report(args.out, header, result.to_text(), result.to_csv(), doc)
        return 0
    if not args.model:
        raise UsageError("evaluate needs --model unless --grid is given")
    params = load_head(args.model)
    _, _, test_part = datasets.stratified_split(
        data, args.val_ratio, args.test_ratio, seed=args.seed
    )
    test_set = test_part.banknotes()
    probs = forward(test_set.features, params)
    if args.threshold is not None:
        top = np.max(probs, axis=1)
        predicted = np.where(top > args.threshold, np.argmax(probs, axis=1) + 1, 0)
    else:
        predicted = np.argmax(probs, axis=1) + 1
    acc = evaluation.accuracy(predicted, test_set.labels)
    matrix = evaluation.confusion(predicted, test_set.labels, data.n_classes)
    header = _config_header("evaluate", {
        "data": args.data, "model": args.model, "threshold": args.threshold,
        "seed": args.seed, "val_ratio": args.val_ratio, "test_ratio": args.test_ratio,
        "test_samples": len(test_set),
    })
    text = f"test accuracy: {acc:.6f}\n"
    if args.threshold is not None:
        text += f"reject rate: {float(np.mean(predicted == 0)):.6f}\n"
    csv = "predicted\\true," + ",".join(str(i) for i in range(1, data.n_classes + 1)) + "\n"
    csv += "\n".join(
        f"{i}," + ",".join(str(v) for v in row) for i, row in enumerate(matrix)
    ) + "\n"
    doc = {
        "config": {"data": args.data, "model": args.model, "seed": args.seed},
        "accuracy": acc,
        "confusion": matrix.tolist(),
    }
    _emit_report(args.out, header, text, csv, doc)
    return 0


_AUTH = {
    "passes": Authenticity.PASSES,
    "unclear": Authenticity.UNCLEAR,
    "clearly-fails": Authenticity.CLEARLY_FAILS,
}
_FITNESS = {"fit": Fitness.FIT, "unfit": Fitness.UNFIT}


def _sort_deck(params, deck: SampleSet, threshold: float, checks: sorter.CheckOutcome):
    probs = forward(deck.features, params)
    top = np.max(probs, axis=1)
    decisions = np.where(top > threshold, np.argmax(probs, axis=1) + 1, 0)
    return [sorter.sort_note(int(d), checks) for d in decisions]


def cmd_sort(args) -> int:
    params = load_head(args.model)
    threshold = rejector.validate_threshold(args.threshold)
    ecb_decks = (args.counterfeit, args.unfit, args.fit)
    if args.deck is None and any(d is None for d in ecb_decks):
        raise UsageError("sort needs either --deck or all of --counterfeit/--unfit/--fit")
    if args.deck is not None:
        deck = _load_data(args.deck)
        checks = sorter.CheckOutcome(_AUTH[args.authenticity], _FITNESS[args.fitness])
        cats = _sort_deck(params, deck, threshold, checks)
        hist = sorter.category_histogram(cats)
        header = _config_header("sort", {
            "model": args.model, "deck": args.deck, "threshold": args.threshold,
            "authenticity": args.authenticity, "fitness": args.fitness,
        })
        text = "".join(f"category {k}: {v}\n" for k, v in hist.items())
        doc = {"config": {"deck": args.deck, "threshold": args.threshold}, "histogram": hist}
        _emit_report(args.out, header, text, None, doc)
        return 0
    counterfeit = _sort_deck(
        params, _load_data(args.counterfeit), threshold,
        sorter.CheckOutcome(_AUTH[args.counterfeit_authenticity]),
    )
    unfit = _sort_deck(params, _load_data(args.unfit), threshold, sorter.CheckOutcome.genuine_unfit())
    fit = _sort_deck(params, _load_data(args.fit), threshold, sorter.CheckOutcome.genuine_fit())
    report = sorter.ecb_test(counterfeit, unfit, fit)
    header = _config_header("sort", {
        "model": args.model, "counterfeit": args.counterfeit, "unfit": args.unfit,
        "fit": args.fit, "threshold": args.threshold,
        "counterfeit_authenticity": args.counterfeit_authenticity,
    })
    doc = {"config": {"threshold": args.threshold}} | report.to_dict()
    _emit_report(args.out, header, report.to_json(), None, doc)
    return 0


def cmd_bench(args) -> int:
    data = _load_data(args.data)
    if args.model:
        params = load_head(args.model)
    else:
        params = HeadParams.zeros(data.n_classes, data.dim)
    report = evaluation.bench(
        params,
        data,
        reps=args.reps,
        threshold=args.threshold,
        calls=args.calls,
        retrain_episodes=args.episodes_grid,
        retrain_batches=args.batch_grid,
    )
    header = _config_header("bench", {
        "data": args.data, "model": args.model, "reps": args.reps,
        "calls": args.calls, "threshold": args.threshold,
        "episodes_grid": ",".join(map(str, args.episodes_grid)),
        "batch_grid": ",".join(map(str, args.batch_grid)),
    })
    _emit_report(args.out, header, report.to_text(), report.to_csv(), None)
    return 0


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="notesort",
        description="Banknote recognition experiments: synthetic data, head training, "
        "reject-threshold calibration and ECB category sorting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic feature-vector dataset")
    p.add_argument("--classes", type=int, default=40)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--per-class", type=_int_list, default=[300],
                   help="samples per class, one value or a comma list")
    p.add_argument("--separation", type=float, default=6.0)
    p.add_argument("--legacy-fraction", type=float, default=0.0)
    p.add_argument("--legacy-widen", type=float, default=3.0)
    p.add_argument("--legacy-shrink", type=float, default=1.0)
    p.add_argument("--cat1", type=int, default=0)
    p.add_argument("--cat1-dispersion", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="train the classification head")
    p.add_argument("--data", required=True)
    p.add_argument("--episodes", type=int, default=1000)
    _add_adam_options(p)
    _add_split_options(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--history", help="loss history CSV path (default: <out>.loss.csv)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("calibrate", help="calibrate the reject threshold from a quantile")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--quantile", type=float, required=True)
    _add_split_options(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ecdf-out", help="write the calibration ecdf as CSV")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("sweep", help="evaluate sorting counts over a threshold list")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--thresholds", type=_float_list, required=True)
    _add_split_options(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("evaluate", help="test accuracy of a model, or a training-condition grid")
    p.add_argument("--data", required=True)
    p.add_argument("--model")
    p.add_argument("--threshold", type=float)
    p.add_argument("--grid", action="store_true")
    p.add_argument("--images-per-class", type=_caps_list, default=[50, 150, None],
                   help="per-class caps for --grid; 'all' lifts the cap")
    p.add_argument("--episodes", type=_int_list, default=[200, 1000, 3000],
                   help="episode counts for --grid")
    _add_adam_options(p)
    _add_split_options(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sort", help="sort decks into ECB categories, optionally the full test")
    p.add_argument("--model", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--deck", help="single deck to sort")
    p.add_argument("--authenticity", choices=sorted(_AUTH), default="passes",
                   help="check outcome applied to accepted notes of --deck")
    p.add_argument("--fitness", choices=sorted(_FITNESS), default="fit")
    p.add_argument("--counterfeit", help="counterfeit deck for the certification test")
    p.add_argument("--unfit", help="unfit genuine deck for the certification test")
    p.add_argument("--fit", help="fit genuine deck for the certification test")
    p.add_argument("--counterfeit-authenticity", choices=["clearly-fails", "unclear"],
                   default="clearly-fails")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sort)

    p = sub.add_parser("bench", help="measure inference and retraining wall times")
    p.add_argument("--data", required=True)
    p.add_argument("--model")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--calls", type=int, default=10_000)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--episodes-grid", type=_int_list, default=[])
    p.add_argument("--batch-grid", type=_int_list, default=[])
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits 2
    except (DataError, ValueError, ArithmeticError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
