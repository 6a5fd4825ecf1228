#!/usr/bin/env python3
"""Calibrate the reject threshold and sweep it over sorting counts.

The reject module sends an input to class 0 whenever its maximal class
probability stays at or below a threshold T. This script builds a world with
three populations: clean genuine notes, degraded genuine notes (the kind a
conventional field classifier gives up on), and category-1 objects that are
no banknotes at all. It then compares their confidence distributions,
calibrates T from quantiles of the degraded-but-recognized population, and
tabulates reject rates and leakage per threshold.
"""

import numpy as np

from notesort import (
    Provenance,
    SampleSet,
    SynthConfig,
    TrainConfig,
    build_ecdf,
    calibrate_threshold,
    forward,
    gen_synthetic,
    legacy_recognized_max_probs,
    stratified_split,
    threshold_sweep,
    train,
)
from notesort.rejector import sweep_to_text

config = SynthConfig(
    n_classes=40,
    dim=64,
    per_class_counts=300,
    separation=8.0,
    legacy_reject_fraction=0.0033,  # one degraded note per class
    legacy_widen=0.6,
    legacy_shrink=0.35,
    cat1_count=400,
    cat1_dispersion=1.0,
    seed=7,
)
data = gen_synthetic(config)
train_set, val_set, test_set = stratified_split(data, seed=7)
params, _ = train(train_set.banknotes(), TrainConfig(episodes=2000, seed=7))

# Confidence distributions per population, on the test split.
for name, subset in (
    ("accepted genuine", test_set.with_provenance(Provenance.ACCEPTED_GENUINE)),
    ("degraded genuine", test_set.with_provenance(Provenance.LEGACY_REJECTED_GENUINE)),
    ("category-1 objects", test_set.cat1()),
):
    scores = np.max(forward(subset.features, params), axis=1)
    ecdf = build_ecdf(scores)
    print(
        f"{name:<20} n={len(subset):>4}  median confidence {np.median(scores):.4f}  "
        f"share below 0.9: {ecdf(0.9):.1%}"
    )

# Calibration population: degraded notes the head still recognizes, with the
# test split held out.
pool = SampleSet(
    np.concatenate([train_set.features, val_set.features]),
    np.concatenate([train_set.labels, val_set.labels]),
    np.concatenate([train_set.provenance, val_set.provenance]),
    data.n_classes,
)
max_probs = legacy_recognized_max_probs(params, pool)
print(f"\ncalibration samples: {max_probs.size}")

quantiles = (0.99, 0.95, 0.80, 0.50)
thresholds = [calibrate_threshold(max_probs, q) for q in quantiles]
for q, t in zip(quantiles, thresholds):
    print(f"  q={q:.2f} -> T={t:.6f}")

rows = threshold_sweep(params, thresholds, test_set.banknotes(), test_set.cat1())
print("\nsorting counts on the test split:")
print(sweep_to_text(rows), end="")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for name, subset in (
        ("accepted genuine", test_set.with_provenance(Provenance.ACCEPTED_GENUINE)),
        ("degraded genuine", test_set.with_provenance(Provenance.LEGACY_REJECTED_GENUINE)),
        ("category-1", test_set.cat1()),
    ):
        scores = np.sort(np.max(forward(subset.features, params), axis=1))
        ax.step(scores, np.arange(1, scores.size + 1) / scores.size, where="post", label=name)
    ax.set_xlabel("maximal class probability")
    ax.set_ylabel("ecdf")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig("reject_calibration_ecdf.png", dpi=120)
    print("\nwrote reject_calibration_ecdf.png")
except ImportError:
    pass
