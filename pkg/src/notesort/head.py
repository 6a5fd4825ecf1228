"""Trainable classification head: fully connected layer plus softmax.

The head maps an l-dimensional feature vector to a probability vector over
the n banknote classes. Only the head is trainable; features come from a
frozen embedding source. Training minimizes cross-entropy with Adam on
uniformly drawn batches. All optimizer math runs at 64-bit precision and is
deterministic given the data order and the seeded configuration.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import SampleSet

__all__ = [
    "AdamState",
    "HeadParams",
    "TrainConfig",
    "adam_step",
    "adam_update",
    "forward",
    "gradient",
    "load_head",
    "loss",
    "save_head",
    "softmax",
    "train",
]

# Predicted probabilities are clamped here before the log in the loss, so a
# fully saturated wrong prediction yields a large finite value instead of inf.
LOG_CLAMP = 1e-300

_HEAD_MAGIC = b"HEAD"
_HEAD_VERSION = 1


@dataclass(frozen=True)
class HeadParams:
    """Weights (n, l) and bias (n,) of the fully connected layer."""

    W: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        W = np.asarray(self.W, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        if W.ndim != 2 or b.ndim != 1 or W.shape[0] != b.shape[0]:
            raise ValueError("W must be (n, l) and b (n,)")
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
            raise ValueError("non-finite head parameters")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)

    @classmethod
    def zeros(cls, n_classes: int, dim: int) -> "HeadParams":
        if n_classes < 2 or dim < 1:
            raise ValueError("need n_classes >= 2 and dim >= 1")
        return cls(np.zeros((n_classes, dim)), np.zeros(n_classes))

    @property
    def n_classes(self) -> int:
        return self.W.shape[0]

    @property
    def dim(self) -> int:
        return self.W.shape[1]


@dataclass(frozen=True)
class AdamState:
    """First/second moment estimates for W and b, and the step counter."""

    m_w: np.ndarray
    v_w: np.ndarray
    m_b: np.ndarray
    v_b: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, params: HeadParams) -> "AdamState":
        return cls(
            np.zeros_like(params.W),
            np.zeros_like(params.W),
            np.zeros_like(params.b),
            np.zeros_like(params.b),
            0,
        )


@dataclass(frozen=True)
class TrainConfig:
    """Training episodes and Adam hyperparameters.

    One episode draws one batch uniformly with replacement and applies one
    optimizer update. Defaults follow the standard Adam recommendation:
    learning rate 0.001, decay rates 0.9 and 0.999, stabilizer 1e-8.
    """

    episodes: int = 1000
    batch_size: int = 300
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.episodes < 0:
            raise ValueError("episodes must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if not 0 <= self.beta1 < 1 or not 0 <= self.beta2 < 1:
            raise ValueError("beta1/beta2 must lie in [0, 1)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-logit subtraction.

    Accepts a single logit vector or a (N, n) batch. Safe for logits of any
    finite magnitude; outputs are valid probability vectors.
    """
    z = np.asarray(logits, dtype=np.float64)
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def forward(x: np.ndarray, params: HeadParams) -> np.ndarray:
    """softmax(W x + b) for a single feature vector or a (N, l) batch."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.dim:
        raise ValueError(
            f"feature dimension {x.shape[-1]} does not match head dimension {params.dim}"
        )
    return softmax(x @ params.W.T + params.b)


def _check_batch(X: np.ndarray, labels: np.ndarray, params: HeadParams):
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("batch must be a nonempty (N, l) array")
    if labels.shape != (X.shape[0],):
        raise ValueError("labels must be (N,)")
    if np.any(labels < 1) or np.any(labels > params.n_classes):
        raise ValueError("labels must be class indices in 1..n")
    if X.shape[1] != params.dim:
        raise ValueError("batch dimension does not match head dimension")
    return X, labels


def loss(X: np.ndarray, labels: np.ndarray, params: HeadParams) -> float:
    """Mean cross-entropy of a batch, labels 1-based."""
    X, labels = _check_batch(X, labels, params)
    probs = forward(X, params)
    true = probs[np.arange(X.shape[0]), labels - 1]
    return float(-np.mean(np.log(np.maximum(true, LOG_CLAMP))))


def gradient(
    X: np.ndarray, labels: np.ndarray, params: HeadParams
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of the batch loss with respect to (W, b)."""
    X, labels = _check_batch(X, labels, params)
    n = X.shape[0]
    delta = forward(X, params)
    delta[np.arange(n), labels - 1] -= 1.0
    delta /= n
    return delta.T @ X, delta.sum(axis=0)


def _loss_and_gradient(X, labels, params):
    # One softmax evaluation shared by the recorded loss and the update.
    n = X.shape[0]
    probs = forward(X, params)
    true = probs[np.arange(n), labels - 1]
    value = float(-np.mean(np.log(np.maximum(true, LOG_CLAMP))))
    probs[np.arange(n), labels - 1] -= 1.0
    probs /= n
    return value, probs.T @ X, probs.sum(axis=0)


def adam_update(
    theta: np.ndarray,
    grad: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    t: int,
    cfg: TrainConfig,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One bias-corrected Adam update on an array of parameters.

    ``t`` is the step counter before this update. Returns the new parameter,
    first-moment and second-moment arrays.
    """
    grad = np.asarray(grad, dtype=np.float64)
    if not np.all(np.isfinite(grad)):
        raise ValueError("non-finite gradient entries")
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad
    t = t + 1
    m_hat = m / (1.0 - cfg.beta1**t)
    v_hat = v / (1.0 - cfg.beta2**t)
    theta = theta - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
    return theta, m, v


def adam_step(
    params: HeadParams,
    grad: tuple[np.ndarray, np.ndarray],
    state: AdamState,
    cfg: TrainConfig,
) -> tuple[HeadParams, AdamState]:
    """Apply one Adam update to the head parameters."""
    g_w, g_b = grad
    g_w = np.asarray(g_w, dtype=np.float64)
    g_b = np.asarray(g_b, dtype=np.float64)
    if g_w.shape != params.W.shape or g_b.shape != params.b.shape:
        raise ValueError("gradient shapes do not match parameter shapes")
    if state.t < 0:
        raise ValueError("step counter must be >= 0")
    t = state.t
    W, m_w, v_w = adam_update(params.W, g_w, state.m_w, state.v_w, t, cfg)
    b, m_b, v_b = adam_update(params.b, g_b, state.m_b, state.v_b, t, cfg)
    return HeadParams(W, b), AdamState(m_w, v_w, m_b, v_b, t + 1)


def train(data: SampleSet, cfg: TrainConfig) -> tuple[HeadParams, np.ndarray]:
    """Train a zero-initialized head on labeled samples.

    Each episode draws ``cfg.batch_size`` samples uniformly with replacement
    from ``data`` using a generator seeded with ``cfg.seed``, records the
    batch loss and applies one Adam step. Returns the trained parameters and
    the per-episode loss history.
    """
    if len(data) == 0:
        raise ValueError("training data is empty")
    if np.any(data.labels == 0):
        raise ValueError("training data must carry class indices (no category-1 samples)")
    params = HeadParams.zeros(data.n_classes, data.dim)
    state = AdamState.zeros(params)
    rng = np.random.default_rng(cfg.seed)
    history = np.empty(cfg.episodes, dtype=np.float64)
    features = data.features
    labels = data.labels
    n = len(data)
    for episode in range(cfg.episodes):
        idx = rng.integers(0, n, size=cfg.batch_size)
        X = features[idx].astype(np.float64)
        y = labels[idx]
        value, g_w, g_b = _loss_and_gradient(X, y, params)
        if not np.isfinite(value):
            raise ArithmeticError(f"non-finite loss at episode {episode}")
        history[episode] = value
        params, state = adam_step(params, (g_w, g_b), state, cfg)
    return params, history


def save_head(path: str | Path, params: HeadParams) -> None:
    """Write head parameters to a model file.

    Layout: magic ``HEAD``, a format version byte, n and l as 32-bit
    little-endian unsigned integers, then W row-major and b as 64-bit
    little-endian reals.
    """
    blob = struct.pack("<4sBII", _HEAD_MAGIC, _HEAD_VERSION, params.n_classes, params.dim)
    blob += params.W.astype("<f8").tobytes()
    blob += params.b.astype("<f8").tobytes()
    Path(path).write_bytes(blob)


def load_head(path: str | Path) -> HeadParams:
    """Read and validate a model file written by :func:`save_head`."""
    blob = Path(path).read_bytes()
    header = struct.calcsize("<4sBII")
    if len(blob) < header:
        raise ValueError("truncated model file")
    magic, version, n, l = struct.unpack_from("<4sBII", blob)
    if magic != _HEAD_MAGIC:
        raise ValueError(f"bad magic in model file: {magic!r}")
    if version != _HEAD_VERSION:
        raise ValueError(f"unsupported model format version: {version}")
    expected = header + 8 * (n * l + n)
    if len(blob) < expected:
        raise ValueError("truncated model file")
    if len(blob) > expected:
        raise ValueError("trailing data in model file")
    W = np.frombuffer(blob, dtype="<f8", count=n * l, offset=header).reshape(n, l)
    b = np.frombuffer(blob, dtype="<f8", count=n, offset=header + 8 * n * l)
    return HeadParams(W.copy(), b.copy())
