import random

from credistream.model import TweetFeatures


def retweet_mixed_rows(n: int, seed: int) -> list[tuple[TweetFeatures, bool, int]]:
    """Training rows whose labels mix the retweet score at weight 0.4.

    Retweet posts carry the full retweet-score range; non-retweet posts pin
    it at a constant, so a model trained without retweets (C2) cannot learn
    that term and trails on a mixed holdout.
    """
    rng = random.Random(seed)
    rows = []
    for _ in range(n):
        is_retweet = rng.random() < 0.5
        r = rng.uniform(0.0, 1.0) if is_retweet else 0.25
        f = rng.uniform(0.0, 1.0)
        w = rng.uniform(0.0, 1.0)
        label = int(0.4 * r + 0.6 * w > 0.5)
        rows.append(
            (
                TweetFeatures(
                    retweets_score=r,
                    favorites_score=f,
                    relevant_words_ratio=w,
                    sentiment_score=0.0,
                ),
                is_retweet,
                label,
            )
        )
    return rows
