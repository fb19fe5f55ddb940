"""Feedforward credibility classifier: one sigmoid hidden layer, one output.

Training is plain stochastic gradient descent on squared error, one uniformly
drawn example per iteration, fully determined by the seed.  Internally label
1 means credible, so the "score above 0.6 is credible" rule reads naturally;
datasets annotated with the opposite polarity (0 = credible) must be inverted
at ingest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .model import TweetFeatures, Verdict

#: Decision threshold: strictly above means credible.
DEFAULT_THRESHOLD = 0.6

ALPHA_MIN, ALPHA_MAX = 2.0, 10.0

_MODEL_MAGIC = "credistream-model"
_MODEL_VERSION = 1


class ConfigId(Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    C5 = "C5"
    C6 = "C6"


_BASE = ("retweets_score", "favorites_score", "relevant_words_ratio")

#: Feature lists per configuration.  C2 uses the base features but drops
#: retweet posts from the training set; C6 combines the hashtag features
#: without sentiment, per its name.
CONFIG_FEATURES: dict[ConfigId, tuple[str, ...]] = {
    ConfigId.C1: _BASE,
    ConfigId.C2: _BASE,
    ConfigId.C3: _BASE + ("sentiment_score",),
    ConfigId.C4: _BASE + ("sentiment_score", "hashtag_chars"),
    ConfigId.C5: _BASE + ("sentiment_score", "hashtag_count"),
    ConfigId.C6: _BASE + ("hashtag_count", "hashtag_chars"),
}

_SCALED_FEATURES = ("hashtag_count", "hashtag_chars")


@dataclass(frozen=True)
class FeatureConfig:
    id: ConfigId
    features: tuple[str, ...]
    exclude_retweets_from_training: bool

    @classmethod
    def for_id(cls, config_id: ConfigId) -> "FeatureConfig":
        return cls(
            id=config_id,
            features=CONFIG_FEATURES[config_id],
            exclude_retweets_from_training=config_id is ConfigId.C2,
        )


@dataclass(frozen=True)
class FeatureScaling:
    """Dataset-level maxima used to squash the unbounded hashtag counters."""

    max_hashtag_count: float = 0.0
    max_hashtag_chars: float = 0.0

    def scale(self, name: str, value: float) -> float:
        maximum = (
            self.max_hashtag_count if name == "hashtag_count" else self.max_hashtag_chars
        )
        if maximum <= 0.0:
            return 0.0
        return min(1.0, value / maximum)


def hidden_upper_bound(n_samples: int, n_inputs: int, n_outputs: int, alpha: float) -> int:
    """Largest hidden-layer width that avoids overfitting for a dataset size.

    floor(n_samples / (alpha * (n_inputs + n_outputs))), never below 1.
    """
    if not ALPHA_MIN <= alpha <= ALPHA_MAX:
        raise ValueError(f"alpha must be in [{ALPHA_MIN:g}, {ALPHA_MAX:g}]")
    if n_samples <= 0 or n_inputs <= 0 or n_outputs <= 0:
        raise ValueError("counts must be positive")
    return max(1, int(n_samples / (alpha * (n_inputs + n_outputs))))


@dataclass(frozen=True)
class NnTopology:
    n_inputs: int
    n_hidden: int
    n_outputs: int = 1
    n_samples_hint: int | None = None
    alpha: float = 2.0

    def __post_init__(self) -> None:
        if self.n_outputs != 1:
            raise ValueError("the classifier has exactly one output neuron")
        if self.n_inputs <= 0 or self.n_hidden <= 0:
            raise ValueError("layer sizes must be positive")
        if not ALPHA_MIN <= self.alpha <= ALPHA_MAX:
            raise ValueError(f"alpha must be in [{ALPHA_MIN:g}, {ALPHA_MAX:g}]")
        if self.n_samples_hint is not None:
            bound = hidden_upper_bound(
                self.n_samples_hint, self.n_inputs, self.n_outputs, self.alpha
            )
            if self.n_hidden > bound:
                raise ValueError(
                    f"n_hidden={self.n_hidden} exceeds the overfitting bound {bound} "
                    f"for {self.n_samples_hint} samples"
                )


@dataclass(frozen=True)
class LabeledExample:
    features: tuple[float, ...]
    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError("label must be 0 (not credible) or 1 (credible)")
        object.__setattr__(self, "features", tuple(float(v) for v in self.features))


@dataclass
class NnModel:
    w1: np.ndarray  # (n_hidden, n_inputs)
    b1: np.ndarray  # (n_hidden,)
    w2: np.ndarray  # (n_hidden,)
    b2: float
    rng_seed: int
    config: ConfigId | None = None
    scaling: FeatureScaling = field(default_factory=FeatureScaling)

    @property
    def n_inputs(self) -> int:
        return self.w1.shape[1]

    @property
    def n_hidden(self) -> int:
        return self.w1.shape[0]

    def __post_init__(self) -> None:
        nh, ni = self.w1.shape
        if self.b1.shape != (nh,) or self.w2.shape != (nh,):
            raise ValueError("parameter shapes are inconsistent")
        for arr in (self.w1, self.b1, self.w2):
            if not np.all(np.isfinite(arr)):
                raise ValueError("parameters must be finite")
        if not math.isfinite(self.b2):
            raise ValueError("parameters must be finite")


def select_features(
    config: FeatureConfig,
    features: TweetFeatures,
    scaling: FeatureScaling | None = None,
) -> np.ndarray:
    """Project a TweetFeatures record onto the configuration's input vector.

    Hashtag counters are min-max scaled with the training-set maxima when a
    scaling record is given (zero when the training maximum was zero).
    """
    out = np.empty(len(config.features), dtype=np.float64)
    for pos, name in enumerate(config.features):
        value = float(getattr(features, name))
        if name in _SCALED_FEATURES and scaling is not None:
            value = scaling.scale(name, value)
        out[pos] = value
    return out


def prepare_training_data(
    config: FeatureConfig,
    rows: Sequence[tuple[TweetFeatures, bool, int]],
) -> tuple[list[LabeledExample], FeatureScaling]:
    """Build labeled examples from (features, is_retweet, label) rows.

    Applies the configuration's retweet exclusion, computes the dataset-level
    hashtag maxima over the surviving rows, and scales with them.
    """
    kept = [
        (tf, label)
        for tf, is_retweet, label in rows
        if not (config.exclude_retweets_from_training and is_retweet)
    ]
    if not kept:
        raise ValueError("no training rows left after retweet exclusion")
    scaling = FeatureScaling(
        max_hashtag_count=max((tf.hashtag_count for tf, _ in kept), default=0.0),
        max_hashtag_chars=max((tf.hashtag_chars for tf, _ in kept), default=0.0),
    )
    examples = [
        LabeledExample(tuple(select_features(config, tf, scaling)), label)
        for tf, label in kept
    ]
    return examples, scaling


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def init_model(
    topology: NnTopology,
    seed: int,
    config: ConfigId | None = None,
    scaling: FeatureScaling | None = None,
) -> NnModel:
    """Seeded uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer."""
    rng = np.random.default_rng(seed)
    ni, nh = topology.n_inputs, topology.n_hidden
    s1 = 1.0 / math.sqrt(ni)
    s2 = 1.0 / math.sqrt(nh)
    return NnModel(
        w1=rng.uniform(-s1, s1, size=(nh, ni)),
        b1=rng.uniform(-s1, s1, size=nh),
        w2=rng.uniform(-s2, s2, size=nh),
        b2=float(rng.uniform(-s2, s2)),
        rng_seed=seed,
        config=config,
        scaling=scaling if scaling is not None else FeatureScaling(),
    )


def _forward(model: NnModel, x: np.ndarray) -> tuple[np.ndarray, float]:
    a1 = _sigmoid(model.w1 @ x + model.b1)
    y = float(_sigmoid(model.w2 @ a1 + model.b2))
    return a1, y


def _gradients(model: NnModel, x: np.ndarray, target: float):
    """Backprop gradients of L = 0.5 * (y - target)^2."""
    a1, y = _forward(model, x)
    dz2 = (y - target) * y * (1.0 - y)
    gw2 = dz2 * a1
    gb2 = dz2
    dz1 = dz2 * model.w2 * a1 * (1.0 - a1)
    gw1 = np.outer(dz1, x)
    gb1 = dz1
    return gw1, gb1, gw2, gb2


def train(
    data: Sequence[LabeledExample],
    topology: NnTopology,
    iterations: int,
    learning_rate: float = 0.1,
    seed: int = 0,
    config: ConfigId | None = None,
    scaling: FeatureScaling | None = None,
) -> NnModel:
    """Seeded init followed by ``iterations`` single-sample SGD steps."""
    if not data:
        raise ValueError("training data must not be empty")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if learning_rate <= 0:
        raise ValueError("learning_rate must be > 0")
    for example in data:
        if len(example.features) != topology.n_inputs:
            raise ValueError(
                f"feature dimension {len(example.features)} does not match "
                f"n_inputs={topology.n_inputs}"
            )

    model = init_model(topology, seed, config=config, scaling=scaling)
    xs = np.array([e.features for e in data], dtype=np.float64)
    ts = np.array([e.label for e in data], dtype=np.float64)

    rng = np.random.default_rng(seed)
    draws = rng.integers(0, len(data), size=iterations)
    for idx in draws:
        x, target = xs[idx], ts[idx]
        gw1, gb1, gw2, gb2 = _gradients(model, x, target)
        model.w1 -= learning_rate * gw1
        model.b1 -= learning_rate * gb1
        model.w2 -= learning_rate * gw2
        model.b2 -= learning_rate * gb2
    return model


def predict(model: NnModel, features: Sequence[float]) -> float:
    """Network output in (0, 1) for one input vector."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape != (model.n_inputs,):
        raise ValueError(f"expected {model.n_inputs} features, got shape {x.shape}")
    return _forward(model, x)[1]


def verdict_from_score(score: float, threshold: float = DEFAULT_THRESHOLD) -> Verdict:
    """Strictly above the threshold is credible; the threshold itself is not."""
    return Verdict.CREDIBLE if score > threshold else Verdict.NOT_CREDIBLE


def classify(
    model: NnModel,
    features: Sequence[float],
    threshold: float = DEFAULT_THRESHOLD,
) -> Verdict:
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be in (0, 1)")
    return verdict_from_score(predict(model, features), threshold)


@dataclass(frozen=True)
class EvalMetrics:
    accuracy: float
    precision: float
    recall: float
    true_positives: int
    false_positives: int
    true_negatives: int
    false_negatives: int


def evaluate(
    model: NnModel,
    data: Sequence[LabeledExample],
    threshold: float = DEFAULT_THRESHOLD,
) -> EvalMetrics:
    """Accuracy/precision/recall of classify() with credible as positive."""
    if not data:
        raise ValueError("evaluation data must not be empty")
    tp = fp = tn = fn = 0
    for example in data:
        predicted = classify(model, example.features, threshold) is Verdict.CREDIBLE
        actual = example.label == 1
        if predicted and actual:
            tp += 1
        elif predicted and not actual:
            fp += 1
        elif not predicted and not actual:
            tn += 1
        else:
            fn += 1
    total = len(data)
    return EvalMetrics(
        accuracy=(tp + tn) / total,
        precision=tp / (tp + fp) if tp + fp else 0.0,
        recall=tp / (tp + fn) if tp + fn else 0.0,
        true_positives=tp,
        false_positives=fp,
        true_negatives=tn,
        false_negatives=fn,
    )


def split_train_holdout(
    data: Sequence[LabeledExample],
    seed: int = 0,
    train_fraction: float = 2 / 3,
) -> tuple[list[LabeledExample], list[LabeledExample]]:
    """Shuffled train/holdout split (defaults to the 2:1 evaluation protocol)."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(data))
    cut = int(len(data) * train_fraction)
    return [data[i] for i in order[:cut]], [data[i] for i in order[cut:]]


def _loss(model: NnModel, x: np.ndarray, target: float) -> float:
    _, y = _forward(model, x)
    return 0.5 * (y - target) ** 2


def gradient_check(model: NnModel, example: LabeledExample, epsilon: float = 1e-5) -> float:
    """Max relative error between backprop and central-difference gradients."""
    if not 0.0 < epsilon <= 1e-2:
        raise ValueError("epsilon must be in (0, 1e-2]")
    x = np.asarray(example.features, dtype=np.float64)
    target = float(example.label)
    gw1, gb1, gw2, gb2 = _gradients(model, x, target)

    worst = 0.0

    def check(array: np.ndarray, analytic: np.ndarray) -> None:
        nonlocal worst
        flat = array.reshape(-1)
        grad = np.asarray(analytic, dtype=np.float64).reshape(-1)
        for pos in range(flat.size):
            original = flat[pos]
            flat[pos] = original + epsilon
            plus = _loss(model, x, target)
            flat[pos] = original - epsilon
            minus = _loss(model, x, target)
            flat[pos] = original
            numeric = (plus - minus) / (2.0 * epsilon)
            scale = max(1e-8, abs(grad[pos]) + abs(numeric))
            worst = max(worst, abs(grad[pos] - numeric) / scale)

    check(model.w1, gw1)
    check(model.b1, gb1)
    check(model.w2, gw2)

    original_b2 = model.b2
    model.b2 = original_b2 + epsilon
    plus = _loss(model, x, target)
    model.b2 = original_b2 - epsilon
    minus = _loss(model, x, target)
    model.b2 = original_b2
    numeric = (plus - minus) / (2.0 * epsilon)
    scale = max(1e-8, abs(gb2) + abs(numeric))
    worst = max(worst, abs(gb2 - numeric) / scale)
    return worst


def training_loss(model: NnModel, data: Sequence[LabeledExample]) -> float:
    """Mean squared error of the network over a dataset."""
    xs = np.array([e.features for e in data], dtype=np.float64)
    ts = np.array([e.label for e in data], dtype=np.float64)
    a1 = _sigmoid(xs @ model.w1.T + model.b1)
    ys = _sigmoid(a1 @ model.w2 + model.b2)
    return float(np.mean((ys - ts) ** 2))


# ---------------------------------------------------------------------------
# Serialization: versioned text format, bit-exact round trip via float hex.
# ---------------------------------------------------------------------------


def save_model(model: NnModel, path: str | Path) -> None:
    lines = [
        f"{_MODEL_MAGIC} v{_MODEL_VERSION}",
        f"config {model.config.value if model.config else '-'}",
        f"n_inputs {model.n_inputs}",
        f"n_hidden {model.n_hidden}",
        "n_outputs 1",
        f"seed {model.rng_seed}",
        f"max_hashtag_count {float(model.scaling.max_hashtag_count).hex()}",
        f"max_hashtag_chars {float(model.scaling.max_hashtag_chars).hex()}",
        "w1 " + " ".join(v.hex() for v in model.w1.reshape(-1).tolist()),
        "b1 " + " ".join(v.hex() for v in model.b1.tolist()),
        "w2 " + " ".join(v.hex() for v in model.w2.tolist()),
        "b2 " + float(model.b2).hex(),
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_model(path: str | Path) -> NnModel:
    text = Path(path).read_text(encoding="ascii").splitlines()
    fields: dict[str, str] = {}
    header = text[0].split()
    if len(header) != 2 or header[0] != _MODEL_MAGIC:
        raise ValueError(f"{path}: not a model file")
    if header[1] != f"v{_MODEL_VERSION}":
        raise ValueError(f"{path}: unsupported version {header[1]}")
    for line in text[1:]:
        if not line.strip():
            continue
        key, _, value = line.partition(" ")
        fields[key] = value
    ni = int(fields["n_inputs"])
    nh = int(fields["n_hidden"])

    def floats(key: str) -> np.ndarray:
        return np.array([float.fromhex(tok) for tok in fields[key].split()], dtype=np.float64)

    config = None if fields["config"] == "-" else ConfigId(fields["config"])
    return NnModel(
        w1=floats("w1").reshape(nh, ni),
        b1=floats("b1"),
        w2=floats("w2"),
        b2=float.fromhex(fields["b2"]),
        rng_seed=int(fields["seed"]),
        config=config,
        scaling=FeatureScaling(
            max_hashtag_count=float.fromhex(fields["max_hashtag_count"]),
            max_hashtag_chars=float.fromhex(fields["max_hashtag_chars"]),
        ),
    )
