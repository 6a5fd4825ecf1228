"""Domain types shared across the banknote recognition pipeline.

Class decisions are 1-based: banknote classes are indexed 1..n and index 0
is reserved for the reject class. All types here are immutable values and
safe to share between workers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np

__all__ = [
    "PROB_SUM_TOL",
    "Authenticity",
    "BanknoteClassLabel",
    "CANONICAL_LABELS",
    "Category",
    "Disposition",
    "Fitness",
    "Provenance",
    "SampleSet",
    "LabeledSample",
    "argmax_decision",
    "class_index",
    "format_class_label",
    "label_for_index",
    "parse_class_label",
    "validate_probability_vector",
]

# Tolerance on the sum-to-one check for probability vectors.
PROB_SUM_TOL = 1e-9

# Denominations that exist in both series; the remaining ones only in series a.
_SERIES_B_DENOMS = (5, 10, 20)
_ALL_DENOMS = (5, 10, 20, 50, 100, 200, 500)

_LABEL_RE = re.compile(r"^EUR_(\d{3})_([ab])_([1-4])$")


class Provenance(IntEnum):
    """Origin of a sample within the test populations."""

    ACCEPTED_GENUINE = 0
    LEGACY_REJECTED_GENUINE = 1
    NON_EURO_CAT1 = 2


class Disposition(Enum):
    """What a banknote handling machine does with a note of a given category."""

    REJECT_TO_CUSTOMER = "reject-to-customer"
    WITHDRAW_NO_CREDIT = "withdraw-no-credit"
    WITHDRAW_MAY_CREDIT = "withdraw-may-credit"
    CREDIT_RECIRCULATE = "credit-recirculate"
    CREDIT_RETURN_TO_NCB = "credit-return-to-NCB"


class Category(Enum):
    """ECB sorting category for inputs to a banknote handling machine.

    Category 1 covers objects not recognized as Euro banknotes, 2 suspect
    counterfeits with clearly failing security features, 3 notes that cannot
    clearly be authenticated, 4a genuine fit notes and 4b genuine unfit notes.
    """

    CAT1 = "1"
    CAT2 = "2"
    CAT3 = "3"
    CAT4A = "4a"
    CAT4B = "4b"

    @property
    def disposition(self) -> Disposition:
        return _DISPOSITIONS[self]


_DISPOSITIONS = {
    Category.CAT1: Disposition.REJECT_TO_CUSTOMER,
    Category.CAT2: Disposition.WITHDRAW_NO_CREDIT,
    Category.CAT3: Disposition.WITHDRAW_MAY_CREDIT,
    Category.CAT4A: Disposition.CREDIT_RECIRCULATE,
    Category.CAT4B: Disposition.CREDIT_RETURN_TO_NCB,
}


class Authenticity(Enum):
    CLEARLY_FAILS = "clearly-fails"
    UNCLEAR = "unclear"
    PASSES = "passes"


class Fitness(Enum):
    FIT = "fit"
    UNFIT = "unfit"


@dataclass(frozen=True)
class BanknoteClassLabel:
    """Structured denomination/series/orientation label of a banknote class.

    Orientations 1..4 are front side, front side upside down, back side and
    back side upside down.
    """

    denomination: int
    series: str
    orientation: int

    def __post_init__(self) -> None:
        if self.denomination not in _ALL_DENOMS:
            raise ValueError(f"invalid denomination: {self.denomination}")
        if self.series not in ("a", "b"):
            raise ValueError(f"invalid series: {self.series!r}")
        if self.series == "b" and self.denomination not in _SERIES_B_DENOMS:
            raise ValueError(
                f"no series-b {self.denomination} in the class set"
            )
        if self.orientation not in (1, 2, 3, 4):
            raise ValueError(f"invalid orientation: {self.orientation}")

    @property
    def canonical(self) -> str:
        """Canonical rendering, e.g. ``EUR_005_a_1``."""
        return f"EUR_{self.denomination:03d}_{self.series}_{self.orientation}"


def parse_class_label(text: str) -> BanknoteClassLabel:
    """Parse a canonical ``EUR_<DDD>_<s>_<o>`` label string.

    Raises ValueError for a malformed pattern or for a well-formed string
    naming a combination outside the 40-class set.
    """
    m = _LABEL_RE.match(text)
    if m is None:
        raise ValueError(f"malformed class label: {text!r}")
    return BanknoteClassLabel(int(m.group(1)), m.group(2), int(m.group(3)))


def format_class_label(label: BanknoteClassLabel) -> str:
    return label.canonical


def _all_labels() -> tuple[str, ...]:
    labels = [
        BanknoteClassLabel(d, s, o).canonical
        for d in _ALL_DENOMS
        for s in (("a", "b") if d in _SERIES_B_DENOMS else ("a",))
        for o in (1, 2, 3, 4)
    ]
    return tuple(sorted(labels))


# The 40 canonical class labels in lexicographic order. Class index i (1-based)
# is the position of a label in this tuple.
CANONICAL_LABELS: tuple[str, ...] = _all_labels()

_INDEX_BY_LABEL = {s: i + 1 for i, s in enumerate(CANONICAL_LABELS)}


def class_index(label: str | BanknoteClassLabel) -> int:
    """1-based class index of a label in the sorted canonical class list."""
    text = label if isinstance(label, str) else label.canonical
    if isinstance(label, str):
        parse_class_label(text)  # reject strings outside the class set
    return _INDEX_BY_LABEL[text]


def label_for_index(index: int) -> str:
    if not 1 <= index <= len(CANONICAL_LABELS):
        raise ValueError(f"class index out of range: {index}")
    return CANONICAL_LABELS[index - 1]


def validate_probability_vector(y: np.ndarray) -> np.ndarray:
    """Check probability-vector invariants and return the vector as float64.

    Entries must lie in [0, 1], sum to 1 within ``PROB_SUM_TOL`` and there
    must be at least two of them.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("probability vector must be 1-D with length >= 2")
    if not np.all(np.isfinite(y)):
        raise ValueError("probability vector has non-finite entries")
    if np.any(y < 0.0) or np.any(y > 1.0):
        raise ValueError("probability vector entries outside [0, 1]")
    if abs(float(y.sum()) - 1.0) > PROB_SUM_TOL:
        raise ValueError("probability vector does not sum to 1")
    return y


def argmax_decision(y: np.ndarray) -> int:
    """1-based index of the maximal entry; ties break to the lowest index."""
    return int(np.argmax(y)) + 1


@dataclass(frozen=True)
class LabeledSample:
    """A single feature vector with its class index and provenance.

    ``label`` is a banknote class index in 1..n, or 0 for category-1 objects
    (which never carry a banknote class).
    """

    features: np.ndarray
    label: int
    provenance: Provenance

    def __post_init__(self) -> None:
        x = np.asarray(self.features)
        if x.ndim != 1 or not np.all(np.isfinite(x)):
            raise ValueError("features must be a finite 1-D vector")
        if self.label < 0:
            raise ValueError(f"label out of range: {self.label}")
        is_cat1 = self.provenance is Provenance.NON_EURO_CAT1
        if is_cat1 != (self.label == 0):
            raise ValueError("category-1 objects carry label 0, all others a class index")


@dataclass(frozen=True)
class SampleSet:
    """An array-backed collection of labeled samples sharing one dimension.

    features: (N, l) float32, labels: (N,) int32 in 0..n_classes,
    provenance: (N,) uint8. Label 0 marks category-1 objects and must pair
    with NON_EURO_CAT1 provenance, and vice versa.
    """

    features: np.ndarray
    labels: np.ndarray
    provenance: np.ndarray
    n_classes: int

    def __post_init__(self) -> None:
        feats = np.asarray(self.features, dtype=np.float32)
        labels = np.asarray(self.labels, dtype=np.int32)
        prov = np.asarray(self.provenance, dtype=np.uint8)
        if feats.ndim != 2:
            raise ValueError("features must be a (N, l) array")
        n = feats.shape[0]
        if labels.shape != (n,) or prov.shape != (n,):
            raise ValueError("labels/provenance length must match sample count")
        if self.n_classes < 2:
            raise ValueError("n_classes must be >= 2")
        if not np.all(np.isfinite(feats)):
            raise ValueError("non-finite feature values")
        if np.any(labels < 0) or np.any(labels > self.n_classes):
            raise ValueError("label out of range")
        if np.any(prov > max(Provenance)):
            raise ValueError("invalid provenance value")
        is_cat1 = prov == Provenance.NON_EURO_CAT1
        if np.any(is_cat1 != (labels == 0)):
            raise ValueError("label/provenance mismatch: label 0 is reserved for category-1 objects")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "provenance", prov)

    def __len__(self) -> int:
        return self.features.shape[0]

    def __getitem__(self, i: int) -> LabeledSample:
        return LabeledSample(
            self.features[i].copy(), int(self.labels[i]), Provenance(int(self.provenance[i]))
        )

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def subset(self, indices) -> "SampleSet":
        idx = np.asarray(indices)
        return SampleSet(
            self.features[idx], self.labels[idx], self.provenance[idx], self.n_classes
        )

    def with_provenance(self, provenance: Provenance) -> "SampleSet":
        return self.subset(np.flatnonzero(self.provenance == provenance))

    def banknotes(self) -> "SampleSet":
        """Samples carrying a banknote class index (label >= 1)."""
        return self.subset(np.flatnonzero(self.labels > 0))

    def cat1(self) -> "SampleSet":
        return self.with_provenance(Provenance.NON_EURO_CAT1)

    def class_counts(self) -> dict[int, int]:
        """Sample count per present label (0 = category-1 stratum)."""
        values, counts = np.unique(self.labels, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}
