"""Durable snapshot store: append-only JSON-lines segments plus an in-memory
id index rebuilt on open.

Three segments live under the store directory: tweets.jsonl and users.jsonl
hold timestamped snapshots (write-once per id + snapshot time), scores.jsonl
is an append-only credibility log.  One writer, many readers.
"""

from __future__ import annotations

import json
import threading
from datetime import datetime
from pathlib import Path

from .model import Tweet, UserProfile, tweet_from_dict, tweet_to_dict, user_from_dict, user_to_dict


class StoreError(RuntimeError):
    pass


class Store:
    def __init__(self, root: str | Path):
        self._root = Path(root)
        self._root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

        self._tweets: dict[str, tuple[datetime, Tweet]] = {}
        self._users: dict[str, tuple[datetime, UserProfile]] = {}
        self._scores: dict[str, tuple[datetime, float]] = {}
        self._by_author: dict[str, dict[str, Tweet]] = {}
        self._seen_tweet_keys: set[tuple[str, str]] = set()
        self._seen_user_keys: set[tuple[str, str]] = set()

        self._replay()
        self._tweet_log = open(self._root / "tweets.jsonl", "a", encoding="utf-8")
        self._user_log = open(self._root / "users.jsonl", "a", encoding="utf-8")
        self._score_log = open(self._root / "scores.jsonl", "a", encoding="utf-8")

    def _replay(self) -> None:
        for name, apply in (
            ("tweets.jsonl", self._index_tweet),
            ("users.jsonl", self._index_user),
            ("scores.jsonl", self._index_score),
        ):
            path = self._root / name
            if not path.exists():
                continue
            with open(path, encoding="utf-8") as handle:
                for line_no, line in enumerate(handle, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        apply(json.loads(line))
                    except (ValueError, KeyError) as exc:
                        raise StoreError(f"{path}:{line_no}: corrupt record: {exc}") from exc

    def _index_tweet(self, obj: dict) -> None:
        at = datetime.fromisoformat(obj["snapshot_time"])
        tweet = tweet_from_dict(obj["record"])
        self._seen_tweet_keys.add((tweet.id, obj["snapshot_time"]))
        current = self._tweets.get(tweet.id)
        if current is None or at >= current[0]:
            self._tweets[tweet.id] = (at, tweet)
        self._by_author.setdefault(tweet.author_id, {})[tweet.id] = tweet

    def _index_user(self, obj: dict) -> None:
        at = datetime.fromisoformat(obj["snapshot_time"])
        user = user_from_dict(obj["record"])
        self._seen_user_keys.add((user.id, obj["snapshot_time"]))
        current = self._users.get(user.id)
        if current is None or at >= current[0]:
            self._users[user.id] = (at, user)

    def _index_score(self, obj: dict) -> None:
        at = datetime.fromisoformat(obj["at"])
        self._scores[obj["tweet_id"]] = (at, float(obj["score"]))

    @staticmethod
    def _append(handle, obj: dict) -> None:
        handle.write(json.dumps(obj, sort_keys=True) + "\n")
        handle.flush()

    # -- writes ------------------------------------------------------------

    def put_tweet(self, tweet: Tweet, snapshot_time: datetime) -> None:
        key = (tweet.id, snapshot_time.isoformat())
        with self._lock:
            if key in self._seen_tweet_keys:
                raise StoreError(f"duplicate tweet snapshot {key}")
            obj = {"snapshot_time": key[1], "record": tweet_to_dict(tweet)}
            self._append(self._tweet_log, obj)
            self._index_tweet(obj)

    def put_user(self, user: UserProfile, snapshot_time: datetime) -> None:
        key = (user.id, snapshot_time.isoformat())
        with self._lock:
            if key in self._seen_user_keys:
                raise StoreError(f"duplicate user snapshot {key}")
            obj = {"snapshot_time": key[1], "record": user_to_dict(user)}
            self._append(self._user_log, obj)
            self._index_user(obj)

    def append_score(self, tweet_id: str, score: float, at: datetime) -> None:
        with self._lock:
            obj = {"tweet_id": tweet_id, "score": score, "at": at.isoformat()}
            self._append(self._score_log, obj)
            self._index_score(obj)

    # -- reads ---------------------------------------------------------------

    def get_tweet(self, tweet_id: str) -> Tweet:
        try:
            return self._tweets[tweet_id][1]
        except KeyError:
            raise KeyError(f"unknown tweet id {tweet_id!r}") from None

    def get_user(self, user_id: str) -> UserProfile:
        try:
            return self._users[user_id][1]
        except KeyError:
            raise KeyError(f"unknown user id {user_id!r}") from None

    def has_tweet(self, tweet_id: str) -> bool:
        return tweet_id in self._tweets

    def has_user(self, user_id: str) -> bool:
        return user_id in self._users

    def tweet_ids(self) -> list[str]:
        return sorted(self._tweets)

    def user_ids(self) -> list[str]:
        return sorted(self._users)

    def latest_score(self, tweet_id: str) -> float | None:
        entry = self._scores.get(tweet_id)
        return entry[1] if entry else None

    def list_recent(self, user_id: str, n: int) -> list[Tweet]:
        """The user's ``n`` newest tweets (latest snapshots), newest first."""
        tweets = self._by_author.get(user_id, {})
        ordered = sorted(
            (self._tweets[tid][1] for tid in tweets),
            key=lambda t: (t.creation_date, t.id),
            reverse=True,
        )
        return ordered[:n]

    def recent_scores(self, user_id: str, n: int = 20) -> list[float]:
        """Latest scores of the user's ``n`` newest scored tweets, newest first."""
        scored = []
        for tweet in self.list_recent(user_id, len(self._by_author.get(user_id, {}))):
            entry = self._scores.get(tweet.id)
            if entry is not None:
                scored.append(entry[1])
                if len(scored) == n:
                    break
        return scored

    def close(self) -> None:
        for handle in (self._tweet_log, self._user_log, self._score_log):
            handle.close()

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
