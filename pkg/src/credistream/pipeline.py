"""Ingestion, two-step filtering, dedup, scoring and timed monitors.

The live crawler is replaced by file replay: one JSON post per line in the
documented schema (see docs/schema.md).  Everything time-dependent takes an
injected clock so the 60-minute cadence is testable in milliseconds.
"""

from __future__ import annotations

import queue
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum
from typing import Callable, Iterable, Protocol, Sequence

import json

from . import simtext
from .classifier import DEFAULT_THRESHOLD, verdict_from_score
from .features import SentimentFn, extract_tweet_features, extract_user_features
from .model import Tweet, TweetFeatures, UserProfile, Verdict, tweet_from_dict, user_from_dict
from .scoring import DEFAULT_WEIGHTS, FormulaWeights, tweet_credibility, user_credibility
from .sentiment import TopicKeywordList, UnknownLanguageError, topic_filter
from .store import Store

#: The languages kept by the first filtering step.
DEFAULT_LANGUAGES = frozenset({"en", "de", "fr", "el", "tr", "it"})

#: Scores within this band count as flat when classifying trends.
DEFAULT_FLAT_EPSILON = 0.005

DEFAULT_MONITOR_INTERVAL = timedelta(minutes=60)


class RejectReason(Enum):
    MALFORMED = "malformed"
    LANGUAGE = "language"
    NO_GEO = "no_geo"
    TOPIC = "topic"


@dataclass(frozen=True)
class Rejection:
    line_no: int
    reason: RejectReason
    detail: str


@dataclass(frozen=True)
class AcceptedPost:
    tweet: Tweet
    author: UserProfile
    sections: frozenset[str] = frozenset()


@dataclass
class IngestResult:
    accepted: list[AcceptedPost] = field(default_factory=list)
    rejections: list[Rejection] = field(default_factory=list)
    lines_read: int = 0

    def counts_by_reason(self) -> dict[str, int]:
        counts = {reason.value: 0 for reason in RejectReason}
        for rejection in self.rejections:
            counts[rejection.reason.value] += 1
        return counts


def parse_post_line(line: str) -> tuple[Tweet, UserProfile]:
    """Parse one ingest line: tweet fields at the top level plus an embedded
    ``author`` snapshot."""
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("post line must be a JSON object")
    if "author" not in obj or not isinstance(obj["author"], dict):
        raise ValueError("post line must embed an 'author' object")
    tweet = tweet_from_dict(obj)
    author = user_from_dict(obj["author"])
    if tweet.author_id != author.id:
        raise ValueError(f"author_id {tweet.author_id!r} != author.id {author.id!r}")
    return tweet, author


def _primary_language(code: str) -> str:
    return code.split("-", 1)[0].lower()


def ingest(
    lines: Iterable[str],
    languages: frozenset[str] = DEFAULT_LANGUAGES,
    require_geo: bool = True,
    topics: TopicKeywordList | None = None,
) -> IngestResult:
    """Replay a post stream through the two-step filter.

    Step 1 keeps posts in an allowed language (primary BCP-47 subtag) that
    carry geolocation (when required); step 2, active when ``topics`` is
    given, keeps posts matching at least one keyword section.  Malformed
    lines are logged with a reason, never fatal.
    """
    result = IngestResult()
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        result.lines_read += 1
        try:
            tweet, author = parse_post_line(line)
        except (ValueError, KeyError, TypeError) as exc:
            result.rejections.append(Rejection(line_no, RejectReason.MALFORMED, str(exc)))
            continue
        language = _primary_language(tweet.language)
        if language not in languages:
            result.rejections.append(
                Rejection(line_no, RejectReason.LANGUAGE, f"language {tweet.language!r}")
            )
            continue
        if require_geo and tweet.geo is None:
            result.rejections.append(
                Rejection(line_no, RejectReason.NO_GEO, f"tweet {tweet.id} has no geolocation")
            )
            continue
        sections: frozenset[str] = frozenset()
        if topics is not None:
            try:
                sections = frozenset(topic_filter(tweet.text, topics, language))
            except UnknownLanguageError:
                result.rejections.append(
                    Rejection(
                        line_no, RejectReason.TOPIC, f"no keyword list for {language!r}"
                    )
                )
                continue
            if not sections:
                result.rejections.append(
                    Rejection(line_no, RejectReason.TOPIC, f"tweet {tweet.id} matches no section")
                )
                continue
        result.accepted.append(AcceptedPost(tweet=tweet, author=author, sections=sections))
    return result


# ---------------------------------------------------------------------------
# Near-duplicate removal
# ---------------------------------------------------------------------------


class DedupMode(Enum):
    REAL_TIME = "realtime"
    OFFLINE = "offline"


_MODE_SETTINGS = {
    DedupMode.REAL_TIME: (simtext.REALTIME_ALGORITHM, simtext.REALTIME_THRESHOLD),
    DedupMode.OFFLINE: (simtext.OFFLINE_ALGORITHM, simtext.OFFLINE_THRESHOLD),
}


@dataclass(frozen=True)
class DedupResult:
    representatives: list[Tweet]
    groups: dict[str, list[str]]  # representative id -> member ids


def dedup(
    tweets: Sequence[Tweet],
    mode: DedupMode = DedupMode.OFFLINE,
    threshold: float | None = None,
    params: simtext.AlignmentParams = simtext.DEFAULT_PARAMS,
) -> DedupResult:
    """Group near-identical posts and keep the earliest per group.

    Mode picks the algorithm/threshold pair (Jaro-Winkler for real time,
    Smith-Waterman offline); the grouping contract itself never changes.
    """
    algorithm, default_threshold = _MODE_SETTINGS[mode]
    limit = default_threshold if threshold is None else threshold
    groups = simtext.group_similar([t.text for t in tweets], algorithm, limit, params)
    representatives = []
    membership: dict[str, list[str]] = {}
    for group in groups:
        members = [tweets[idx] for idx in group]
        representative = min(members, key=lambda t: (t.creation_date, t.id))
        representatives.append(representative)
        membership[representative.id] = [t.id for t in members]
    return DedupResult(representatives=representatives, groups=membership)


# ---------------------------------------------------------------------------
# Clocks and monitors
# ---------------------------------------------------------------------------


class Clock(Protocol):
    def now(self) -> datetime: ...

    def wait(self, delta: timedelta) -> None: ...


class SystemClock:
    def now(self) -> datetime:
        return datetime.now(timezone.utc)

    def wait(self, delta: timedelta) -> None:
        time.sleep(delta.total_seconds())


class FakeClock:
    """Deterministic clock: wait() advances instantly."""

    def __init__(self, start: datetime):
        if start.tzinfo is None:
            raise ValueError("start must be timezone-aware")
        self._now = start

    def now(self) -> datetime:
        return self._now

    def wait(self, delta: timedelta) -> None:
        self._now += delta

    def advance(self, delta: timedelta) -> None:
        self._now += delta


@dataclass
class MonitorJob:
    target: str
    interval: timedelta
    samples: list[tuple[datetime, float]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.interval <= timedelta(0):
            raise ValueError("interval must be positive")

    def append(self, at: datetime, score: float) -> None:
        if self.samples and at <= self.samples[-1][0]:
            raise ValueError("sample timestamps must be strictly increasing")
        self.samples.append((at, score))

    def scores(self) -> list[float]:
        return [score for _, score in self.samples]


def monitor_tweet(
    store: Store,
    tweet_id: str,
    ticks: int,
    clock: Clock,
    interval: timedelta = DEFAULT_MONITOR_INTERVAL,
    weights: FormulaWeights = DEFAULT_WEIGHTS,
    stopwords: frozenset[str] = frozenset(),
    sentiment_fn: SentimentFn | None = None,
) -> MonitorJob:
    """Sample the tweet-formula score every interval, ``ticks`` times.

    Each tick recomputes features from the latest stored snapshots of the
    tweet and its author, so stores updated between ticks show up in the
    series.
    """
    store.get_tweet(tweet_id)  # raise early for unknown ids
    job = MonitorJob(target=tweet_id, interval=interval)
    for tick in range(ticks):
        tweet = store.get_tweet(tweet_id)
        author = store.get_user(tweet.author_id)
        features = extract_tweet_features(tweet, author, stopwords, sentiment_fn)
        job.append(clock.now(), tweet_credibility(features, weights))
        if tick + 1 < ticks:
            clock.wait(interval)
    return job


def monitor_user(
    store: Store,
    user_id: str,
    ticks: int,
    clock: Clock,
    interval: timedelta = DEFAULT_MONITOR_INTERVAL,
    weights: FormulaWeights = DEFAULT_WEIGHTS,
) -> MonitorJob:
    """Sample the user-formula score every interval, ``ticks`` times.

    Each tick re-averages the stored scores of the user's 20 newest posts.
    """
    store.get_user(user_id)
    job = MonitorJob(target=user_id, interval=interval)
    for tick in range(ticks):
        user = store.get_user(user_id)
        scores = store.recent_scores(user_id, 20)
        features = extract_user_features(user, now=clock.now(), last20_scores=scores)
        job.append(clock.now(), user_credibility(features, weights))
        if tick + 1 < ticks:
            clock.wait(interval)
    return job


class Trend(Enum):
    CONSTANT = "constant"
    GROWING = "growing"
    DECREASING = "decreasing"
    MIXED = "mixed"


def trend(
    series: Sequence[tuple[datetime, float]],
    flat_epsilon: float = DEFAULT_FLAT_EPSILON,
) -> Trend:
    """Classify a credibility time series.

    Constant when the whole range fits in the epsilon band; growing or
    decreasing when every step stays within epsilon of monotone and the net
    change exceeds epsilon; anything else is mixed.
    """
    if len(series) < 2:
        raise ValueError("series must have at least 2 samples")
    values = [score for _, score in series]
    if max(values) - min(values) <= flat_epsilon:
        return Trend.CONSTANT
    deltas = [b - a for a, b in zip(values, values[1:])]
    net = values[-1] - values[0]
    if all(d >= -flat_epsilon for d in deltas) and net > flat_epsilon:
        return Trend.GROWING
    if all(d <= flat_epsilon for d in deltas) and net < -flat_epsilon:
        return Trend.DECREASING
    return Trend.MIXED


# ---------------------------------------------------------------------------
# Scoring stage with optional worker threads
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScoredPost:
    tweet: Tweet
    author: UserProfile
    features: TweetFeatures
    score: float
    verdict: Verdict


def parallel_map_ordered(fn: Callable, items: Sequence, workers: int = 1, queue_size: int = 64) -> list:
    """Apply ``fn`` over ``items`` with worker threads behind a bounded queue.

    The feeder blocks when the queue is full (backpressure) and results come
    back in input order regardless of worker count.
    """
    if workers <= 1:
        return [fn(item) for item in items]
    tasks: queue.Queue = queue.Queue(maxsize=queue_size)
    results: dict[int, object] = {}
    errors: list[BaseException] = []
    lock = threading.Lock()

    def work() -> None:
        while True:
            entry = tasks.get()
            if entry is None:
                tasks.task_done()
                return
            index, item = entry
            try:
                value = fn(item)
                with lock:
                    results[index] = value
            except BaseException as exc:  # re-raised in the caller
                with lock:
                    errors.append(exc)
            finally:
                tasks.task_done()

    threads = [threading.Thread(target=work, daemon=True) for _ in range(workers)]
    for thread in threads:
        thread.start()
    for index, item in enumerate(items):
        tasks.put((index, item))
    for _ in threads:
        tasks.put(None)
    for thread in threads:
        thread.join()
    if errors:
        raise errors[0]
    return [results[index] for index in range(len(items))]


def score_posts(
    posts: Sequence[AcceptedPost],
    weights: FormulaWeights = DEFAULT_WEIGHTS,
    stopwords: frozenset[str] = frozenset(),
    sentiment_fn: SentimentFn | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    workers: int = 1,
) -> list[ScoredPost]:
    """Formula-score accepted posts; the strict above-threshold rule assigns
    the verdict.  Output order follows input order for any worker count."""

    def score_one(post: AcceptedPost) -> ScoredPost:
        features = extract_tweet_features(post.tweet, post.author, stopwords, sentiment_fn)
        score = tweet_credibility(features, weights)
        return ScoredPost(
            tweet=post.tweet,
            author=post.author,
            features=features,
            score=score,
            verdict=verdict_from_score(score, threshold),
        )

    return parallel_map_ordered(score_one, posts, workers=workers)


def store_posts(store: Store, posts: Sequence[AcceptedPost], snapshot_time: datetime) -> None:
    """Write tweet and author snapshots for a batch of accepted posts.

    Authors repeated within the batch are stored once; the store's write-once
    rule applies per (id, snapshot_time), so batches need distinct times.
    """
    seen_users = set()
    for post in posts:
        store.put_tweet(post.tweet, snapshot_time)
        if post.author.id not in seen_users:
            store.put_user(post.author, snapshot_time)
            seen_users.add(post.author.id)


def store_scores(store: Store, scored: Sequence[ScoredPost], at: datetime) -> None:
    for post in scored:
        store.append_score(post.tweet.id, post.score, at)
