#!/usr/bin/env python3
"""Compare test accuracy under different training conditions.

Trains one head per cell of a (training images per class) x (episodes) grid
and prints the resulting accuracy table. More data and more episodes should
never hurt beyond noise, and the best cell should saturate.
"""

from notesort import SynthConfig, TrainConfig, gen_synthetic, run_grid

config = SynthConfig(n_classes=40, dim=64, per_class_counts=300, separation=6.0, seed=42)
data = gen_synthetic(config)

result = run_grid(
    data,
    caps=[50, 150, None],
    episodes=[200, 1000, 3000],
    base=TrainConfig(seed=42, batch_size=300),
)
print(result.to_text(), end="")

worst = result.cells.min()
best = result.cells.max()
print(f"\nworst cell {worst:.4%}, best cell {best:.4%}")
