"""Closed-form credibility formulas for posts and accounts.

Both scores are convex combinations: per-component weights are nonnegative
and must sum to one, so inputs in [0, 1] always yield a score in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .model import SentimentLabel, TweetFeatures, UserFeatures

#: Per-token weights of the sentiment term.  Note the published table maps
#: NEGATIVE and VERY_POSITIVE to the same weight; implemented verbatim.
TOKEN_SENTIMENT_WEIGHTS: Mapping[SentimentLabel, float] = {
    SentimentLabel.VERY_NEGATIVE: 0.75,
    SentimentLabel.NEGATIVE: 0.50,
    SentimentLabel.NEUTRAL: 0.00,
    SentimentLabel.POSITIVE: 0.25,
    SentimentLabel.VERY_POSITIVE: 0.50,
}

_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FormulaWeights:
    """Weight vectors for the tweet and user formulas (defaults as published)."""

    w_r: float = 0.1
    w_f: float = 0.3
    w_w: float = 0.5
    w_s: float = 0.1
    w_l: float = 0.01
    w_u: float = 0.01
    w_d: float = 0.03
    w_v: float = 0.1
    w_g: float = 0.08
    w_c: float = 0.07
    w_a20: float = 0.7
    check_sums: bool = True  # disable for weight-tuning experiments

    def __post_init__(self) -> None:
        for name in ("w_r", "w_f", "w_w", "w_s", "w_l", "w_u", "w_d", "w_v", "w_g", "w_c", "w_a20"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.check_sums:
            tweet_sum = self.w_r + self.w_f + self.w_w + self.w_s
            user_sum = self.w_l + self.w_u + self.w_d + self.w_v + self.w_g + self.w_c + self.w_a20
            if abs(tweet_sum - 1.0) > _SUM_TOLERANCE:
                raise ValueError(f"tweet weights must sum to 1, got {tweet_sum!r}")
            if abs(user_sum - 1.0) > _SUM_TOLERANCE:
                raise ValueError(f"user weights must sum to 1, got {user_sum!r}")


DEFAULT_WEIGHTS = FormulaWeights()


def sentiment_term(token_labels: Iterable[SentimentLabel]) -> float:
    """Mean per-token sentiment weight; 0.0 for an empty token list.

    The raw cumulative sum is unbounded, so the term is defined as the mean to
    keep the formula's [0, 1] contract.
    """
    weights = [TOKEN_SENTIMENT_WEIGHTS[label] for label in token_labels]
    if not weights:
        return 0.0
    return sum(weights) / len(weights)


def tweet_credibility(features: TweetFeatures, weights: FormulaWeights = DEFAULT_WEIGHTS) -> float:
    return (
        weights.w_r * features.retweets_score
        + weights.w_f * features.favorites_score
        + weights.w_w * features.relevant_words_ratio
        + weights.w_s * features.sentiment_score
    )


def user_credibility(features: UserFeatures, weights: FormulaWeights = DEFAULT_WEIGHTS) -> float:
    return (
        weights.w_l * features.u_location
        + weights.w_u * features.u_url
        + weights.w_d * features.u_description
        + weights.w_v * features.u_verified
        + weights.w_g * features.u_geo
        + weights.w_c * features.u_age_ratio
        + weights.w_a20 * features.u_avg_last20
    )


def load_weights(path: str | Path, check_sums: bool = True) -> FormulaWeights:
    """Read weights from a flat key=value file; missing keys keep defaults."""
    values: dict[str, float] = {}
    known = {f for f in FormulaWeights.__dataclass_fields__ if f != "check_sums"}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"{path}:{line_no}: unknown weight {key!r}")
        values[key] = float(value.strip())
    return FormulaWeights(check_sums=check_sums, **values)
