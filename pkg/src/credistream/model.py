"""Domain records shared by every scoring path.

Holds the immutable post/account snapshots, the feature vectors consumed by
the credibility formulas and the classifier, plus the tokenizer and the
calendar-month arithmetic both feature extractors rely on.
"""

from __future__ import annotations

import calendar
import unicodedata
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum

#: Day the platform went public; lower bound for account creation dates and
#: the denominator anchor of the account-age ratio.
TWITTER_EPOCH = datetime(2006, 7, 15, tzinfo=timezone.utc)

#: Fraction of an author's followers assumed to see a post organically.
REACHABLE_FOLLOWERS_FRACTION = 0.03

#: Capacity of the per-user recent-post buffer.
RECENT_TWEETS_CAPACITY = 40


class Verdict(Enum):
    CREDIBLE = "credible"
    NOT_CREDIBLE = "not_credible"


class SentimentLabel(Enum):
    VERY_NEGATIVE = "vneg"
    NEGATIVE = "neg"
    NEUTRAL = "neu"
    POSITIVE = "pos"
    VERY_POSITIVE = "vpos"


def _require_aware(name: str, dt: datetime) -> None:
    if dt.tzinfo is None:
        raise ValueError(f"{name} must be timezone-aware (UTC)")


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat!r}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon!r}")


@dataclass(frozen=True)
class Tweet:
    id: str
    text: str
    author_id: str
    retweets_no: int
    favorites_no: int
    creation_date: datetime
    geo: GeoPoint | None = None
    language: str = "en"
    is_retweet: bool = False
    hashtags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.text is None:
            raise ValueError("text must not be None (empty string is fine)")
        if self.retweets_no < 0:
            raise ValueError(f"retweets_no must be >= 0, got {self.retweets_no}")
        if self.favorites_no < 0:
            raise ValueError(f"favorites_no must be >= 0, got {self.favorites_no}")
        _require_aware("creation_date", self.creation_date)
        object.__setattr__(self, "hashtags", tuple(self.hashtags))
        for tag in self.hashtags:
            if not tag.startswith("#"):
                raise ValueError(f"hashtag must start with '#': {tag!r}")


@dataclass(frozen=True)
class UserProfile:
    id: str
    has_location: bool
    has_description: bool
    has_url: bool
    has_geo: bool
    is_verified: bool
    creation_date: datetime
    followers_no: int
    recent_tweets: tuple[str, ...] = ()  # tweet ids, most recent first

    def __post_init__(self) -> None:
        if self.followers_no < 0:
            raise ValueError(f"followers_no must be >= 0, got {self.followers_no}")
        _require_aware("creation_date", self.creation_date)
        if self.creation_date < TWITTER_EPOCH:
            raise ValueError(
                f"creation_date {self.creation_date.isoformat()} predates the platform"
            )
        object.__setattr__(self, "recent_tweets", tuple(self.recent_tweets))
        if len(self.recent_tweets) > RECENT_TWEETS_CAPACITY:
            raise ValueError(
                f"recent_tweets holds at most {RECENT_TWEETS_CAPACITY} ids"
            )


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value!r}")


@dataclass(frozen=True)
class TweetFeatures:
    """Formula inputs for one post: the four score components plus counters."""

    retweets_score: float
    favorites_score: float
    relevant_words_ratio: float
    sentiment_score: float
    hashtag_count: int = 0
    hashtag_chars: int = 0
    words_no: int = 0
    characters_no: int = 0

    def __post_init__(self) -> None:
        _check_unit("retweets_score", self.retweets_score)
        _check_unit("favorites_score", self.favorites_score)
        _check_unit("relevant_words_ratio", self.relevant_words_ratio)
        _check_unit("sentiment_score", self.sentiment_score)
        for name in ("hashtag_count", "hashtag_chars", "words_no", "characters_no"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class UserFeatures:
    """Formula inputs for one account: five binary flags plus two ratios."""

    u_location: int
    u_url: int
    u_description: int
    u_verified: int
    u_geo: int
    u_age_ratio: float
    u_avg_last20: float

    def __post_init__(self) -> None:
        for name in ("u_location", "u_url", "u_description", "u_verified", "u_geo"):
            if getattr(self, name) not in (0, 1):
                raise ValueError(f"{name} must be 0 or 1")
        _check_unit("u_age_ratio", self.u_age_ratio)
        _check_unit("u_avg_last20", self.u_avg_last20)


# ---------------------------------------------------------------------------
# Tokenization
# ---------------------------------------------------------------------------


def _strip_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[str]:
    """Split on Unicode whitespace and strip leading/trailing punctuation.

    Returns one entry per raw token; a token reduced to the empty string is a
    pure-punctuation token and stays in the list so that ratio denominators
    count it.
    """
    return [_strip_punctuation(raw) for raw in text.split()]


def word_tokens(text: str) -> list[str]:
    """Non-punctuation tokens of ``text`` (tokenize minus empties)."""
    return [tok for tok in tokenize(text) if tok]


def looks_like_retweet(text: str) -> bool:
    return text.startswith("RT @")


# ---------------------------------------------------------------------------
# Calendar-month arithmetic
# ---------------------------------------------------------------------------


def _add_months(dt: datetime, months: int) -> datetime:
    month_index = dt.year * 12 + (dt.month - 1) + months
    year, month = divmod(month_index, 12)
    month += 1
    day = min(dt.day, calendar.monthrange(year, month)[1])
    return dt.replace(year=year, month=month, day=day)


def months_between(start: datetime, end: datetime) -> float:
    """Real-valued month count from ``start`` to ``end``.

    Rule: the number of complete calendar months, plus the elapsed fraction of
    the current partial month (elapsed time over that month's actual span).
    Exact zero for equal instants; whole numbers on month anniversaries.
    """
    if end < start:
        raise ValueError("end must not precede start")
    whole = (end.year - start.year) * 12 + (end.month - start.month)
    if _add_months(start, whole) > end:
        whole -= 1
    anchor = _add_months(start, whole)
    nxt = _add_months(start, whole + 1)
    frac = (end - anchor) / (nxt - anchor)
    return whole + frac


# ---------------------------------------------------------------------------
# JSON mapping (the ingest wire schema uses these exact field names)
# ---------------------------------------------------------------------------


def tweet_to_dict(tweet: Tweet) -> dict:
    return {
        "id": tweet.id,
        "text": tweet.text,
        "author_id": tweet.author_id,
        "retweets_no": tweet.retweets_no,
        "favorites_no": tweet.favorites_no,
        "creation_date": tweet.creation_date.isoformat(),
        "geo": None if tweet.geo is None else {"lat": tweet.geo.lat, "lon": tweet.geo.lon},
        "language": tweet.language,
        "is_retweet": tweet.is_retweet,
        "hashtags": list(tweet.hashtags),
    }


def tweet_from_dict(obj: dict) -> Tweet:
    geo = obj.get("geo")
    return Tweet(
        id=str(obj["id"]),
        text=obj["text"],
        author_id=str(obj["author_id"]),
        retweets_no=int(obj["retweets_no"]),
        favorites_no=int(obj["favorites_no"]),
        creation_date=datetime.fromisoformat(obj["creation_date"]),
        geo=None if geo is None else GeoPoint(lat=float(geo["lat"]), lon=float(geo["lon"])),
        language=obj.get("language", "en"),
        is_retweet=bool(obj.get("is_retweet", False)),
        hashtags=tuple(obj.get("hashtags", ())),
    )


def user_to_dict(user: UserProfile) -> dict:
    return {
        "id": user.id,
        "has_location": user.has_location,
        "has_description": user.has_description,
        "has_url": user.has_url,
        "has_geo": user.has_geo,
        "is_verified": user.is_verified,
        "creation_date": user.creation_date.isoformat(),
        "followers_no": user.followers_no,
        "recent_tweets": list(user.recent_tweets),
    }


def user_from_dict(obj: dict) -> UserProfile:
    return UserProfile(
        id=str(obj["id"]),
        has_location=bool(obj["has_location"]),
        has_description=bool(obj["has_description"]),
        has_url=bool(obj["has_url"]),
        has_geo=bool(obj["has_geo"]),
        is_verified=bool(obj["is_verified"]),
        creation_date=datetime.fromisoformat(obj["creation_date"]),
        followers_no=int(obj["followers_no"]),
        recent_tweets=tuple(obj.get("recent_tweets", ())),
    )
