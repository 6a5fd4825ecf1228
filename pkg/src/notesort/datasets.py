"""Feature-vector files, dataset manifests, splitting and synthetic data.

The FVEC interchange format stores labeled feature vectors bit-exactly:

    magic "FVEC" | version u8 | dim u32 | count u32
    payload: count x dim float32 little-endian, row-major
    labels:  count int32 little-endian (class index 1..n, 0 = category-1)
    provenance: count u8

Values are stored at 32-bit precision; computation elsewhere runs at 64-bit.
A JSON manifest alongside each generated file records the configuration and
the class-name mapping, so every dataset is reproducible from its manifest.
"""

from __future__ import annotations

import dataclasses
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import CANONICAL_LABELS, Provenance, SampleSet

__all__ = [
    "FVEC_VERSION",
    "SynthConfig",
    "gen_synthetic",
    "manifest_path",
    "read_fvec",
    "read_manifest",
    "stratified_split",
    "write_fvec",
    "write_manifest",
]

_FVEC_MAGIC = b"FVEC"
FVEC_VERSION = 1
_HEADER = "<4sBII"


def write_fvec(path: str | Path, samples: SampleSet) -> None:
    """Write samples to an FVEC file."""
    blob = struct.pack(_HEADER, _FVEC_MAGIC, FVEC_VERSION, samples.dim, len(samples))
    blob += samples.features.astype("<f4").tobytes()
    blob += samples.labels.astype("<i4").tobytes()
    blob += samples.provenance.astype(np.uint8).tobytes()
    Path(path).write_bytes(blob)


def read_fvec(path: str | Path, n_classes: int | None = None) -> SampleSet:
    """Read and validate an FVEC file.

    When ``n_classes`` is omitted it is inferred as the largest label in the
    file; passing it enforces the label range 0..n_classes.
    """
    blob = Path(path).read_bytes()
    header = struct.calcsize(_HEADER)
    if len(blob) < header:
        raise ValueError("truncated header in FVEC file")
    magic, version, dim, count = struct.unpack_from(_HEADER, blob)
    if magic != _FVEC_MAGIC:
        raise ValueError(f"bad magic in FVEC file: {magic!r}")
    if version != FVEC_VERSION:
        raise ValueError(f"unsupported FVEC format version: {version}")
    if dim == 0:
        raise ValueError("FVEC file declares dimension 0")
    payload = 4 * count * dim
    labels_off = header + payload
    prov_off = labels_off + 4 * count
    expected = prov_off + count
    if len(blob) < expected:
        raise ValueError("truncated payload in FVEC file")
    if len(blob) > expected:
        raise ValueError("trailing data in FVEC file")
    features = np.frombuffer(blob, dtype="<f4", count=count * dim, offset=header)
    features = features.reshape(count, dim)
    labels = np.frombuffer(blob, dtype="<i4", count=count, offset=labels_off)
    prov = np.frombuffer(blob, dtype=np.uint8, count=count, offset=prov_off)
    if not np.all(np.isfinite(features)):
        raise ValueError("non-finite feature values in FVEC file")
    if np.any(labels < 0):
        raise ValueError("label out of range in FVEC file")
    if n_classes is None:
        n_classes = max(int(labels.max(initial=0)), 2)
    elif np.any(labels > n_classes):
        raise ValueError("label out of range in FVEC file")
    if np.any(prov > max(Provenance)):
        raise ValueError("invalid provenance value in FVEC file")
    return SampleSet(features.copy(), labels.copy(), prov.copy(), n_classes)


def manifest_path(fvec_path: str | Path) -> Path:
    return Path(fvec_path).with_suffix(".manifest.json")


def write_manifest(path: str | Path, cfg: "SynthConfig") -> None:
    doc = {
        "format_version": FVEC_VERSION,
        "n_classes": cfg.n_classes,
        "dim": cfg.dim,
        "class_names": list(cfg.class_names()),
        "seed": cfg.seed,
        "config": dataclasses.asdict(cfg),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_manifest(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def stratified_split(
    samples: SampleSet,
    val_ratio: float = 0.10,
    test_ratio: float = 0.10,
    seed: int = 0,
) -> tuple[SampleSet, SampleSet, SampleSet]:
    """Split samples per class into train/validation/test sets.

    Each stratum (every class index present, with category-1 objects as a
    stratum of their own) contributes floor(ratio * count) samples, at least
    one, to the validation and test sets; the remainder trains. The three
    parts are disjoint and exhaust the input, and the split is deterministic
    given the seed.
    """
    if not (0.0 < val_ratio < 1.0 and 0.0 < test_ratio < 1.0):
        raise ValueError("ratios must lie in (0, 1)")
    if val_ratio + test_ratio >= 1.0:
        raise ValueError("ratios must sum to less than 1")
    if len(samples) == 0:
        raise ValueError("cannot split an empty sample set")
    rng = np.random.default_rng(seed)
    train_idx: list[np.ndarray] = []
    val_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    for label in sorted(samples.class_counts()):
        stratum = np.flatnonzero(samples.labels == label)
        count = stratum.size
        if count < 3:
            raise ValueError(
                f"stratum {label} has only {count} samples, need at least 3"
            )
        n_val = max(1, int(val_ratio * count))
        n_test = max(1, int(test_ratio * count))
        perm = rng.permutation(stratum)
        val_idx.append(perm[:n_val])
        test_idx.append(perm[n_val : n_val + n_test])
        train_idx.append(perm[n_val + n_test :])
    pick = lambda parts: samples.subset(np.sort(np.concatenate(parts)))
    return pick(train_idx), pick(val_idx), pick(test_idx)


@dataclass(frozen=True)
class SynthConfig:
    """Configuration of the synthetic embedding-space dataset generator.

    Class clusters are isotropic unit-variance Gaussians whose means sit on
    seeded orthonormal directions scaled by ``separation``. A configurable
    fraction of each class is drawn as degraded notes: the class mean is
    shrunk by ``legacy_shrink`` and the standard deviation multiplied by
    ``legacy_widen``, which lowers the head's confidence on those samples
    the way folded or worn notes do. Category-1 objects come from a broad
    zero-mean background with standard deviation ``cat1_dispersion``.
    """

    n_classes: int = 40
    dim: int = 64
    per_class_counts: tuple[int, ...] | int = 300
    separation: float = 6.0
    legacy_reject_fraction: float = 0.0
    legacy_widen: float = 3.0
    legacy_shrink: float = 1.0
    cat1_count: int = 0
    cat1_dispersion: float = 2.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_classes < 2:
            raise ValueError("n_classes must be >= 2")
        if self.dim < self.n_classes:
            raise ValueError(
                "dim too small to place distinct class means "
                f"(orthogonal placement needs dim >= n_classes, got {self.dim} < {self.n_classes})"
            )
        counts = self.per_class_counts
        if isinstance(counts, int):
            counts = (counts,) * self.n_classes
        counts = tuple(int(c) for c in counts)
        if len(counts) != self.n_classes:
            raise ValueError("per_class_counts length must equal n_classes")
        if any(c < 1 for c in counts):
            raise ValueError("per-class counts must be >= 1")
        if self.separation < 0:
            raise ValueError("separation must be >= 0")
        if not 0.0 <= self.legacy_reject_fraction <= 1.0:
            raise ValueError("legacy_reject_fraction must lie in [0, 1]")
        if self.legacy_widen <= 0 or self.legacy_shrink <= 0:
            raise ValueError("legacy_widen and legacy_shrink must be > 0")
        if self.cat1_count < 0:
            raise ValueError("cat1_count must be >= 0")
        if self.cat1_dispersion <= 0:
            raise ValueError("cat1_dispersion must be > 0")
        object.__setattr__(self, "per_class_counts", counts)

    def class_names(self) -> tuple[str, ...]:
        if self.n_classes == len(CANONICAL_LABELS):
            return CANONICAL_LABELS
        return tuple(f"class_{i:03d}" for i in range(1, self.n_classes + 1))


def _place_class_means(n: int, dim: int, separation: float, rng) -> np.ndarray:
    # Orthonormal directions give identical pairwise mean distances; resample
    # on the (practically impossible) degenerate draw.
    for _ in range(100):
        q, r = np.linalg.qr(rng.standard_normal((dim, n)))
        diag = np.diag(r)
        if np.any(diag == 0):
            continue
        means = (q * np.sign(diag)).T * separation
        return means
    raise RuntimeError("failed to place distinct class means")


def gen_synthetic(cfg: SynthConfig) -> SampleSet:
    """Generate a labeled synthetic dataset, deterministic given the config."""
    rng = np.random.default_rng(cfg.seed)
    means = _place_class_means(cfg.n_classes, cfg.dim, cfg.separation, rng)
    blocks = []
    labels = []
    provenance = []
    for c in range(cfg.n_classes):
        count = cfg.per_class_counts[c]
        n_legacy = min(count, int(round(cfg.legacy_reject_fraction * count)))
        n_accepted = count - n_legacy
        noise = rng.standard_normal((count, cfg.dim))
        block = np.empty((count, cfg.dim))
        block[:n_accepted] = means[c] + noise[:n_accepted]
        block[n_accepted:] = cfg.legacy_shrink * means[c] + cfg.legacy_widen * noise[n_accepted:]
        blocks.append(block)
        labels.append(np.full(count, c + 1, dtype=np.int32))
        prov = np.full(count, Provenance.ACCEPTED_GENUINE, dtype=np.uint8)
        prov[n_accepted:] = Provenance.LEGACY_REJECTED_GENUINE
        provenance.append(prov)
    if cfg.cat1_count > 0:
        blocks.append(cfg.cat1_dispersion * rng.standard_normal((cfg.cat1_count, cfg.dim)))
        labels.append(np.zeros(cfg.cat1_count, dtype=np.int32))
        provenance.append(
            np.full(cfg.cat1_count, Provenance.NON_EURO_CAT1, dtype=np.uint8)
        )
    return SampleSet(
        np.concatenate(blocks).astype(np.float32),
        np.concatenate(labels),
        np.concatenate(provenance),
        cfg.n_classes,
    )
