#!/usr/bin/env python3
"""Measure inference latency and retraining wall time.

Inference is the head forward pass plus the reject decision on vectors of
the canonical embedding width (2048). Retraining covers a grid of episode
counts and batch sizes; since only the last layer trains, even the largest
cell stays in the range of seconds on a plain CPU.
"""

from notesort import HeadParams, SynthConfig, TrainConfig, bench, gen_synthetic, train

data = gen_synthetic(
    SynthConfig(n_classes=40, dim=2048, per_class_counts=10, separation=6.0, seed=1)
)
params, _ = train(data, TrainConfig(episodes=20, batch_size=50, seed=1))

report = bench(
    params,
    data,
    reps=5,
    calls=10_000,
    retrain_episodes=(100, 300, 1000),
    retrain_batches=(30, 100, 300),
)
print(report.to_text(), end="")
