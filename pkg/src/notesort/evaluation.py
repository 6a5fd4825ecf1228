"""Experiment harness: metrics, the training-condition grid and timing.

The grid trains a fresh head for every combination of per-class training-set
cap and episode count and reports test accuracy per cell, the layout used to
compare training conditions. Timing covers per-vector inference with the
reject step and wall-clock retraining time over an episodes/batch grid.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import SampleSet
from .head import HeadParams, TrainConfig, forward, train
from .rejector import apply
from . import datasets

__all__ = [
    "GridResult",
    "TimingReport",
    "accuracy",
    "bench",
    "confusion",
    "run_grid",
    "subsample_per_class",
]


def _check_pair(predictions, labels):
    p = np.asarray(predictions, dtype=np.int64)
    t = np.asarray(labels, dtype=np.int64)
    if p.shape != t.shape or p.ndim != 1:
        raise ValueError("predictions and labels must be 1-D of equal length")
    if p.size == 0:
        raise ValueError("empty prediction list")
    return p, t


def accuracy(predictions: Sequence[int], labels: Sequence[int]) -> float:
    """Ratio of exact matches. Rejects (index 0) never match a banknote label."""
    p, t = _check_pair(predictions, labels)
    return float(np.mean(p == t))


def confusion(
    predictions: Sequence[int], labels: Sequence[int], n_classes: int
) -> np.ndarray:
    """Count matrix with rows predicted 0..n and columns true 1..n."""
    p, t = _check_pair(predictions, labels)
    if np.any(t < 1) or np.any(t > n_classes):
        raise ValueError("labels must be banknote class indices in 1..n")
    if np.any(p < 0) or np.any(p > n_classes):
        raise ValueError("predictions out of range 0..n")
    matrix = np.zeros((n_classes + 1, n_classes), dtype=np.int64)
    np.add.at(matrix, (p, t - 1), 1)
    return matrix


def subsample_per_class(data: SampleSet, cap: int | None, seed) -> SampleSet:
    """Cap the number of samples per class, drawn without replacement.

    ``cap`` of None keeps everything; a cap above the available count keeps
    all samples of that class.
    """
    if cap is None:
        return data
    if cap < 1:
        raise ValueError("per-class cap must be >= 1")
    rng = np.random.default_rng(seed)
    keep = []
    for label in sorted(data.class_counts()):
        stratum = np.flatnonzero(data.labels == label)
        if stratum.size > cap:
            stratum = rng.choice(stratum, size=cap, replace=False)
        keep.append(stratum)
    return data.subset(np.sort(np.concatenate(keep)))


@dataclass(frozen=True)
class GridResult:
    """Test accuracy per (images-per-class cap, episode count) cell."""

    caps: tuple[int | None, ...]
    episodes: tuple[int, ...]
    cells: np.ndarray  # shape (len(caps), len(episodes)), ratios in [0, 1]

    def to_text(self) -> str:
        width = 12
        out = io.StringIO()
        out.write(" " * 16 + "episodes\n")
        out.write(f"{'images/class':<16}")
        for e in self.episodes:
            out.write(f"{e:>{width}d}")
        out.write("\n")
        for cap, row in zip(self.caps, self.cells):
            name = "all" if cap is None else str(cap)
            out.write(f"{name:<16}")
            for v in row:
                out.write(f"{100.0 * v:>{width - 1}.3f}%")
            out.write("\n")
        return out.getvalue()

    def to_csv(self) -> str:
        lines = ["images_per_class," + ",".join(str(e) for e in self.episodes)]
        for cap, row in zip(self.caps, self.cells):
            name = "all" if cap is None else str(cap)
            lines.append(name + "," + ",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def run_grid(
    data: SampleSet,
    caps: Sequence[int | None],
    episodes: Sequence[int],
    base: TrainConfig,
    val_ratio: float = 0.10,
    test_ratio: float = 0.10,
) -> GridResult:
    """Train and evaluate one head per grid cell.

    The dataset is split once with the base seed. Every cell subsamples the
    training split to its per-class cap and trains a fresh head, both with
    seeds derived deterministically from (base seed, cell position), then
    reports plain argmax accuracy on the test split.
    """
    if not caps or not episodes:
        raise ValueError("grid settings must be nonempty")
    labeled = data.banknotes()
    train_set, _, test_set = datasets.stratified_split(
        labeled, val_ratio, test_ratio, seed=base.seed
    )
    cells = np.zeros((len(caps), len(episodes)))
    for i, cap in enumerate(caps):
        for j, n_episodes in enumerate(episodes):
            ss = np.random.SeedSequence(entropy=base.seed, spawn_key=(i, j))
            sub_seed, train_seed = ss.generate_state(2, dtype=np.uint64)
            subset = subsample_per_class(train_set, cap, sub_seed)
            cfg = TrainConfig(
                episodes=n_episodes,
                batch_size=base.batch_size,
                learning_rate=base.learning_rate,
                beta1=base.beta1,
                beta2=base.beta2,
                epsilon=base.epsilon,
                seed=int(train_seed),
            )
            params, _ = train(subset, cfg)
            predicted = np.argmax(forward(test_set.features, params), axis=1) + 1
            cells[i, j] = accuracy(predicted, test_set.labels)
    return GridResult(tuple(caps), tuple(episodes), cells)


@dataclass(frozen=True)
class TimingReport:
    """Median wall times for inference and retraining.

    ``per_image_ms`` and ``throughput_ips`` come from one batched
    forward+reject pass over at least ``calls`` vectors; ``single_call_ms``
    times one-vector-at-a-time evaluation. ``retrain_seconds`` is indexed by
    (episodes, batch size).
    """

    per_image_ms: float
    throughput_ips: float
    single_call_ms: float
    calls: int
    reps: int
    retrain_episodes: tuple[int, ...]
    retrain_batches: tuple[int, ...]
    retrain_seconds: np.ndarray  # shape (len(batches), len(episodes))

    def to_text(self) -> str:
        out = io.StringIO()
        out.write(
            f"per-image inference: {self.per_image_ms:.4f} ms "
            f"(batched, {self.calls} calls, median of {self.reps})\n"
        )
        out.write(f"throughput: {self.throughput_ips:.0f} images/s\n")
        out.write(f"single-call latency: {self.single_call_ms:.4f} ms\n")
        if self.retrain_seconds.size:
            out.write("retraining time (s):\n")
            out.write(" " * 12 + "episodes\n")
            out.write(f"{'batch size':<12}")
            for e in self.retrain_episodes:
                out.write(f"{e:>10d}")
            out.write("\n")
            for b, row in zip(self.retrain_batches, self.retrain_seconds):
                out.write(f"{b:<12d}")
                for v in row:
                    out.write(f"{v:>10.2f}")
                out.write("\n")
        return out.getvalue()

    def to_csv(self) -> str:
        lines = [
            "metric,value",
            f"per_image_ms,{self.per_image_ms!r}",
            f"throughput_ips,{self.throughput_ips!r}",
            f"single_call_ms,{self.single_call_ms!r}",
        ]
        for b, row in zip(self.retrain_batches, self.retrain_seconds):
            for e, v in zip(self.retrain_episodes, row):
                lines.append(f"retrain_s[episodes={e};batch={b}],{float(v)!r}")
        return "\n".join(lines) + "\n"


def _median_time(fn, reps: int) -> float:
    fn()  # warmup, discarded
    times = []
    for _ in range(reps):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def bench(
    params: HeadParams,
    data: SampleSet,
    reps: int = 5,
    threshold: float = 0.5,
    calls: int = 10_000,
    retrain_episodes: Sequence[int] = (),
    retrain_batches: Sequence[int] = (),
    single_calls: int = 1_000,
) -> TimingReport:
    """Measure inference and retraining wall times on one dataset.

    Inference tiles the dataset to at least ``calls`` vectors and runs the
    full forward+reject decision; retraining trains a fresh head per
    (episodes, batch size) cell on the labeled samples.
    """
    if reps < 3:
        raise ValueError("reps must be >= 3")
    if len(data) == 0:
        raise ValueError("dataset is empty")
    features = data.features.astype(np.float64)
    if len(data) < calls:
        tiles = -(-calls // len(data))
        features = np.tile(features, (tiles, 1))[:calls]
    count = features.shape[0]

    def batched():
        probs = forward(features, params)
        top = np.max(probs, axis=1)
        decisions = np.where(top > threshold, np.argmax(probs, axis=1) + 1, 0)
        return decisions

    elapsed = _median_time(batched, reps)
    per_image_ms = 1000.0 * elapsed / count
    throughput = count / elapsed

    singles = features[:single_calls]

    def one_at_a_time():
        for row in singles:
            apply(forward(row, params), threshold)

    single_ms = 1000.0 * _median_time(one_at_a_time, reps) / singles.shape[0]

    labeled = data.banknotes()
    retrain = np.zeros((len(retrain_batches), len(retrain_episodes)))
    for i, batch in enumerate(retrain_batches):
        for j, n_episodes in enumerate(retrain_episodes):
            cfg = TrainConfig(episodes=n_episodes, batch_size=batch, seed=0)
            start = time.perf_counter()
            train(labeled, cfg)
            retrain[i, j] = time.perf_counter() - start
    return TimingReport(
        per_image_ms=per_image_ms,
        throughput_ips=throughput,
        single_call_ms=single_ms,
        calls=count,
        reps=reps,
        retrain_episodes=tuple(retrain_episodes),
        retrain_batches=tuple(retrain_batches),
        retrain_seconds=retrain,
    )
