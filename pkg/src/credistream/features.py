"""Feature extraction: raw post/account snapshots to formula inputs."""

from __future__ import annotations

from datetime import datetime
from pathlib import Path
from typing import Callable, Collection, Sequence

from .model import (
    REACHABLE_FOLLOWERS_FRACTION,
    TWITTER_EPOCH,
    SentimentLabel,
    Tweet,
    TweetFeatures,
    UserFeatures,
    UserProfile,
    months_between,
    tokenize,
)
from .scoring import sentiment_term

SentimentFn = Callable[[str], SentimentLabel]


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One token per line, UTF-8; '#' comments and blank lines ignored."""
    words = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            words.add(line.lower())
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    """The English stopword list shipped with the package."""
    return load_stopwords(Path(__file__).parent / "data" / "stopwords_en.txt")


def _reach_score(count: int, followers_no: int) -> float:
    # Zero-reach accounts contribute no amplification evidence.
    if followers_no == 0:
        return 0.0
    return min(1.0, count / (REACHABLE_FOLLOWERS_FRACTION * followers_no))


def extract_tweet_features(
    tweet: Tweet,
    author: UserProfile,
    stopwords: Collection[str] = frozenset(),
    sentiment_fn: SentimentFn | None = None,
) -> TweetFeatures:
    """Compute the four score components plus counters for one post.

    The retweet and favorite scores are each count over reachable followers
    (3% of the follower base), clamped to [0, 1] and defined as 0 for authors
    without followers.  ``sentiment_fn`` maps a token to its five-grade label;
    None treats every token as neutral.
    """
    tokens = tokenize(tweet.text)
    words = [tok for tok in tokens if tok]
    relevant = [tok for tok in words if tok.lower() not in stopwords]
    ratio = len(relevant) / len(tokens) if tokens else 0.0

    if sentiment_fn is None:
        sentiment = 0.0
    else:
        sentiment = sentiment_term(sentiment_fn(tok) for tok in words)

    return TweetFeatures(
        retweets_score=_reach_score(tweet.retweets_no, author.followers_no),
        favorites_score=_reach_score(tweet.favorites_no, author.followers_no),
        relevant_words_ratio=ratio,
        sentiment_score=sentiment,
        hashtag_count=len(tweet.hashtags),
        hashtag_chars=sum(len(tag) - 1 for tag in tweet.hashtags),
        words_no=len(relevant),
        characters_no=len(tweet.text),
    )


def extract_user_features(
    user: UserProfile,
    now: datetime,
    last20_scores: Sequence[float] = (),
) -> UserFeatures:
    """Compute the account-feature vector as of ``now``.

    The age ratio divides the account's age in months by the platform's age in
    months, both ending at ``now``; an account created on the platform launch
    day scores 1.0.  ``last20_scores`` are the credibility scores of the
    account's newest posts (at most 20); the average defaults to 0 when empty.
    """
    if now < user.creation_date:
        raise ValueError("now precedes the account creation date")
    if len(last20_scores) > 20:
        raise ValueError("last20_scores holds at most 20 values")
    for score in last20_scores:
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"score out of [0, 1]: {score!r}")

    platform_months = months_between(TWITTER_EPOCH, now)
    if platform_months == 0.0:
        age_ratio = 1.0  # now == creation == launch day
    else:
        age_ratio = months_between(user.creation_date, now) / platform_months

    avg = sum(last20_scores) / len(last20_scores) if last20_scores else 0.0
    return UserFeatures(
        u_location=int(user.has_location),
        u_url=int(user.has_url),
        u_description=int(user.has_description),
        u_verified=int(user.is_verified),
        u_geo=int(user.has_geo),
        u_age_ratio=age_ratio,
        u_avg_last20=avg,
    )
