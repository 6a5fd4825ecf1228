"""Reject-class module: threshold rule, ecdf and quantile calibration.

A probability vector is rejected (mapped to class 0) when its maximal entry
does not exceed the threshold T; the boundary case max(y) == T rejects.
Thresholds are calibrated from the maximal class probabilities of genuine
notes that the incumbent field classifier rejected but the head recognizes
correctly. All functions here are pure and safe for concurrent use.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Provenance, SampleSet, argmax_decision
from .head import HeadParams, forward

__all__ = [
    "Ecdf",
    "SweepRow",
    "apply",
    "build_ecdf",
    "calibrate_threshold",
    "legacy_recognized_max_probs",
    "max_prob",
    "sweep_to_csv",
    "sweep_to_text",
    "threshold_sweep",
    "validate_threshold",
]

SWEEP_CSV_HEADER = "threshold,reject_rate_pct,cat1_accepted,genuine_wrong_class"


def validate_threshold(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"reject threshold must lie in [0, 1], got {t}")
    return t


def apply(y: np.ndarray, threshold: float) -> int:
    """Class decision with reject option: 0 if max(y) <= T, else argmax(y)."""
    if float(np.max(y)) <= threshold:
        return 0
    return argmax_decision(y)


def max_prob(y: np.ndarray) -> float:
    """Maximal class probability of a probability vector."""
    return float(np.max(y))


@dataclass(frozen=True)
class Ecdf:
    """Empirical cumulative distribution function over a finite sample.

    F(x) = #{v <= x} / N. F is nondecreasing and right-continuous, 0 below
    the smallest sample value and 1 from the largest on.
    """

    values: np.ndarray  # nondecreasing
    n: int

    def __call__(self, x):
        counts = np.searchsorted(self.values, x, side="right")
        return counts / self.n

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("value,cumulative_probability\n")
        for k, v in enumerate(self.values, start=1):
            out.write(f"{float(v)!r},{k / self.n!r}\n")
        return out.getvalue()


def build_ecdf(values: Sequence[float]) -> Ecdf:
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("cannot build an ecdf from an empty sample")
    if not np.all(np.isfinite(v)):
        raise ValueError("ecdf sample has non-finite values")
    return Ecdf(np.sort(v), int(v.size))


def calibrate_threshold(values: Sequence[float], q: float) -> float:
    """Lower empirical quantile of a calibration sample.

    Returns the k-th order statistic with k = ceil(q * N), which guarantees
    that at least ceil(q * N) calibration values fall at or below the
    returned threshold. The result is always a member of the sample.
    """
    v = np.sort(np.asarray(values, dtype=np.float64))
    if v.size == 0:
        raise ValueError("calibration set is empty")
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile must lie strictly between 0 and 1, got {q}")
    k = int(np.ceil(q * v.size))
    return float(v[k - 1])


def legacy_recognized_max_probs(params: HeadParams, data: SampleSet) -> np.ndarray:
    """Maximal class probabilities of the calibration population.

    The population is the legacy-rejected-genuine stratum restricted to
    samples the head classifies correctly.
    """
    legacy = data.with_provenance(Provenance.LEGACY_REJECTED_GENUINE)
    if len(legacy) == 0:
        return np.empty(0, dtype=np.float64)
    probs = forward(legacy.features, params)
    predicted = np.argmax(probs, axis=1) + 1
    correct = predicted == legacy.labels
    return np.max(probs, axis=1)[correct]


@dataclass(frozen=True)
class SweepRow:
    """Sorting outcome counts for one reject threshold."""

    threshold: float
    reject_rate_pct: float
    cat1_accepted: int
    genuine_wrong_class: int


def threshold_sweep(
    params: HeadParams,
    thresholds: Sequence[float],
    genuine: SampleSet,
    cat1: SampleSet,
) -> list[SweepRow]:
    """Evaluate reject/misclassification counts for each threshold.

    A genuine sample counts as rejected iff its decision is 0 and as wrong
    class iff it is accepted into an index other than its true label. A
    category-1 sample counts as accepted iff its decision is nonzero.
    """
    if len(genuine) == 0 or len(cat1) == 0:
        raise ValueError("genuine and category-1 test sets must be nonempty")
    if np.any(genuine.labels == 0):
        raise ValueError("genuine test set contains category-1 samples")
    probs = forward(genuine.features, params)
    gen_max = np.max(probs, axis=1)
    gen_pred = np.argmax(probs, axis=1) + 1
    wrong = gen_pred != genuine.labels
    cat1_max = np.max(forward(cat1.features, params), axis=1)
    rows = []
    for t in thresholds:
        t = validate_threshold(t)
        rejected = gen_max <= t
        rows.append(
            SweepRow(
                threshold=t,
                reject_rate_pct=100.0 * float(np.mean(rejected)),
                cat1_accepted=int(np.sum(cat1_max > t)),
                genuine_wrong_class=int(np.sum(~rejected & wrong)),
            )
        )
    return rows


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    out = [SWEEP_CSV_HEADER]
    for r in rows:
        out.append(
            f"{r.threshold!r},{r.reject_rate_pct!r},{r.cat1_accepted},{r.genuine_wrong_class}"
        )
    return "\n".join(out) + "\n"


def sweep_to_text(rows: Sequence[SweepRow]) -> str:
    header = f"{'threshold':>12}  {'reject rate (%)':>16}  {'cat1 accepted':>14}  {'wrong class':>12}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.threshold:>12.6g}  {r.reject_rate_pct:>16.4f}  {r.cat1_accepted:>14d}  {r.genuine_wrong_class:>12d}"
        )
    return "\n".join(lines) + "\n"
