"""Linear pixel baseline: checks that rendered images carry label signal."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EvalError, TrainError
from .render import INK, ImageBuffer


def downsample(image, factor):
    """Ink fraction of each factor x factor block, flattened row-major."""
    px = image.pixels if isinstance(image, ImageBuffer) else np.asarray(image)
    h, w = px.shape
    if factor < 1 or h % factor or w % factor:
        raise ConfigError(f"factor {factor} does not divide a {h}x{w} image")
    ink = (px == INK).astype(np.float64)
    return ink.reshape(h // factor, factor, w // factor, factor).mean(axis=(1, 3)).ravel()


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _augment(X):
    X = np.asarray(X, dtype=np.float64)
    return np.hstack([X, np.ones((X.shape[0], 1))])


def logistic_loss(w, X, y, l2=0.0):
    """Mean binary cross-entropy plus (l2/2)*||w||^2; the bias (last weight) is not penalised."""
    Xa = _augment(X)
    z = Xa @ w
    # log(1 + e^z) - y*z, computed without overflow
    nll = np.logaddexp(0.0, z) - np.asarray(y, dtype=np.float64) * z
    return float(nll.mean() + 0.5 * l2 * np.dot(w[:-1], w[:-1]))


def logistic_gradient(w, X, y, l2=0.0):
    Xa = _augment(X)
    residual = sigmoid(Xa @ w) - np.asarray(y, dtype=np.float64)
    grad = Xa.T @ residual / Xa.shape[0]
    grad[:-1] += l2 * w[:-1]
    return grad


@dataclass
class LinearModel:
    weights: np.ndarray  # feature weights followed by the bias
    factor: int | None = None  # None when features did not come from downsample()
    image_px: int | None = None

    def __post_init__(self):
        if self.factor is None or self.image_px is None:
            return
        if self.factor < 1 or self.image_px % self.factor:
            raise ConfigError(f"factor {self.factor} does not divide image_px {self.image_px}")
        expected = (self.image_px // self.factor) ** 2 + 1
        if len(self.weights) != expected:
            raise ConfigError(f"expected {expected} weights, got {len(self.weights)}")

    def predict_proba(self, X):
        return sigmoid(_augment(X) @ self.weights)

    def predict(self, X):
        return (self.predict_proba(X) >= 0.5).astype(int)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(f"# factor={self.factor} image_px={self.image_px} n={len(self.weights)}\n")
            for v in self.weights:
                fh.write(f"{float(v)!r}\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            header = fh.readline()
            meta = dict(part.split("=") for part in header.lstrip("# ").split())
            weights = np.array([float(line) for line in fh if line.strip()])
        spec = [None if meta.get(k, "None") == "None" else int(meta[k]) for k in ("factor", "image_px")]
        return cls(weights, *spec)


def train_linear(X, y, *, epochs=500, learning_rate=0.5, l2=0.0, seed=0, standardize=True, factor=None,
                 image_px=None, history=None):
    """Full-batch gradient descent on the logistic loss, starting from zero weights.

    With ``standardize`` the descent runs on z-scored features (constant
    columns are left unscaled) and the result is mapped back, so the
    returned model always takes raw features. The l2 penalty then applies
    to the standardized weights. ``seed`` is accepted for interface
    stability: zero initialisation and full-batch updates leave nothing
    random. Pass a list as ``history`` to collect the loss before every
    epoch.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) != len(y) or len(y) == 0:
        raise TrainError("features must be a non-empty 2-D array matching the labels")
    if not set(np.unique(y)) <= {0, 1}:
        raise TrainError("labels must be 0/1")
    if len(np.unique(y)) < 2:
        raise TrainError("training data contains a single class")
    if standardize:
        mu = X.mean(axis=0)
        sigma = X.std(axis=0)
        sigma[sigma < 1e-12] = 1.0
        Z = (X - mu) / sigma
    else:
        Z = X
    w = np.zeros(X.shape[1] + 1)
    for _ in range(epochs):
        if history is not None:
            history.append(logistic_loss(w, Z, y, l2))
        w = w - learning_rate * logistic_gradient(w, Z, y, l2)
    if standardize:
        coef = w[:-1] / sigma
        w = np.append(coef, w[-1] - np.dot(coef, mu))
    return LinearModel(w, factor, image_px)


@dataclass(frozen=True)
class EvalResult:
    accuracy: float
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


def evaluate(model, X, y):
    y = np.asarray(y).astype(int)
    if len(y) == 0:
        raise EvalError("cannot evaluate on an empty set")
    pred = model.predict(X)
    tp = int(np.sum((pred == 1) & (y == 1)))
    tn = int(np.sum((pred == 0) & (y == 0)))
    fp = int(np.sum((pred == 1) & (y == 0)))
    fn = int(np.sum((pred == 0) & (y == 1)))
    return EvalResult((tp + tn) / len(y), tp, fp, tn, fn)


FILLER_WORDS = (
    "today", "my", "friend", "went", "to", "the", "park", "with", "family", "and", "we", "ate",
    "lunch", "at", "home", "after", "work", "because", "weather", "was", "nice", "our", "dog",
    "played", "in", "garden", "then", "watched", "a", "movie", "together", "evening", "morning",
)


def synthetic_signal_corpus(n, seed=0, *, keyword_index=2, min_words=6, max_words=16):
    """Balanced toy corpus: label 1 sentences contain "happy", label 0 contain "sad".

    The keyword always sits at ``keyword_index``; every other word is random
    filler, so the keyword is the only label signal.
    """
    from .corpus import CorpusSample

    rng = np.random.default_rng(seed)
    samples = []
    for i in range(n):
        label = i % 2
        length = int(rng.integers(max(min_words, keyword_index + 1), max_words + 1))
        words = [FILLER_WORDS[j] for j in rng.integers(0, len(FILLER_WORDS), size=length)]
        words[keyword_index] = "happy" if label else "sad"
        samples.append(CorpusSample(f"s{i:04d}", " ".join(words), {"happy": label}))
    return samples
