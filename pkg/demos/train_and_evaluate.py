#!/usr/bin/env python3
"""Train the classification head on synthetic embeddings and evaluate it.

Walks the basic pipeline: generate Gaussian class clusters standing in for
banknote feature vectors, split them per class, train the softmax head with
the optimizer defaults, and look at accuracy plus the worst confusions.
"""

import numpy as np

from notesort import (
    SynthConfig,
    TrainConfig,
    accuracy,
    confusion,
    forward,
    gen_synthetic,
    stratified_split,
    train,
)

# A moderately hard benchmark: 40 classes in 64 dimensions. Class means sit
# at distance 6 from the origin on orthonormal directions, within-class
# spread is 1, so clusters overlap a little and accuracy stays below 100%
# for small training budgets.
config = SynthConfig(
    n_classes=40, dim=64, per_class_counts=300, separation=6.0, seed=13
)
data = gen_synthetic(config)
print(f"dataset: {len(data)} samples, {config.n_classes} classes, dim {config.dim}")

train_set, val_set, test_set = stratified_split(data, seed=13)
print(f"split: {len(train_set)} train / {len(val_set)} val / {len(test_set)} test")

cfg = TrainConfig(episodes=1500, batch_size=300, seed=13)
params, history = train(train_set, cfg)
print(f"trained {cfg.episodes} episodes, loss {history[0]:.3f} -> {history[-1]:.4f}")

for name, subset in (("train", train_set), ("val", val_set), ("test", test_set)):
    predicted = np.argmax(forward(subset.features, params), axis=1) + 1
    print(f"{name:>5} accuracy: {accuracy(predicted, subset.labels):.4%}")

predicted = np.argmax(forward(test_set.features, params), axis=1) + 1
matrix = confusion(predicted, test_set.labels, data.n_classes)
errors = matrix.copy()
errors[np.arange(1, data.n_classes + 1), np.arange(data.n_classes)] = 0
if errors.sum() == 0:
    print("no test confusions")
else:
    print("largest confusions (predicted <- true: count):")
    flat = np.argsort(errors.ravel())[::-1][:5]
    for k in flat:
        p, t = divmod(int(k), data.n_classes)
        if errors[p, t]:
            print(f"  {p:>2} <- {t + 1:>2}: {errors[p, t]}")
