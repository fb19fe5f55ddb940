"""Deterministic synthetic corpora for benchmarks, fixtures and demos.

Everything here is seeded: the same arguments always produce the same texts
and records, which keeps replay-determinism checks meaningful.
"""

from __future__ import annotations

import json
import random
from datetime import datetime, timedelta, timezone

_VOCAB = (
    "breaking news report update police city government minister election vote "
    "people crowd street protest march rally attack fight war peace talks border "
    "refugee crisis migrant asylum aid camp food water power outage storm flood "
    "fire rescue team plan deal agreement summit leader president party council "
    "market economy price growth jobs strike union train station airport flight "
    "school hospital doctor health virus case test result study science space "
    "launch rocket satellite data network internet phone video photo live stream "
    "match game goal score team player coach final cup league win lose draw "
    "music album song artist tour show film movie star award festival book "
    "morning evening night week month year today tomorrow soon later still again"
).split()

_HASHTAGS = (
    "#breaking #news #update #live #now #today #world #politics #sports "
    "#music #tech #science #health #weather #traffic #community"
).split()

_USERS = [f"user{i:03d}" for i in range(40)]

_GEO_BOXES = {
    # country id -> (min_lat, max_lat, min_lon, max_lon), interior of the
    # shipped coarse boundaries
    "US": (30, 48, -120, -70),
    "CA": (50, 65, -130, -60),
    "MX": (16, 28, -110, -90),
    "BR": (-30, 2, -70, -40),
    "GB": (51.5, 58, -6, 1),
    "FR": (43, 50, -4, 5),
    "DE": (47.5, 54, 7, 14),
    "IT": (38, 46, 8, 18),
    "TR": (37, 41, 27, 44),
    "GR": (36, 41, 21, 25),
}

_EPOCH = datetime(2019, 3, 1, tzinfo=timezone.utc)


def make_tweet_text(rng: random.Random, min_words: int = 6, max_words: int = 13) -> str:
    words = rng.choices(_VOCAB, k=rng.randint(min_words, max_words))
    if rng.random() < 0.4:
        words.append(rng.choice(_HASHTAGS))
    return " ".join(words)


def make_tweet_texts(
    count: int,
    seed: int = 0,
    retweet_fraction: float = 0.2,
) -> list[str]:
    """A corpus of synthetic posts; a fraction are retweets of earlier ones."""
    rng = random.Random(seed)
    texts: list[str] = []
    for _ in range(count):
        if texts and rng.random() < retweet_fraction:
            source = rng.choice(texts)
            base = source.split(": ", 1)[1] if source.startswith("RT @") else source
            texts.append(f"RT @{rng.choice(_USERS)}: {base}")
        else:
            texts.append(make_tweet_text(rng))
    return texts


def make_post_records(count: int, seed: int = 0) -> list[dict]:
    """Ingest-ready post dicts with realistic filter mix.

    Roughly 1 in 10 posts is in an unsupported language and 1 in 10 lacks
    geolocation; authors come from a fixed pool with stable profiles.
    """
    rng = random.Random(seed)
    authors = {}
    for user_id in _USERS:
        created = datetime(2007 + rng.randrange(10), 1 + rng.randrange(12), 15, tzinfo=timezone.utc)
        authors[user_id] = {
            "id": user_id,
            "has_location": rng.random() < 0.7,
            "has_description": rng.random() < 0.8,
            "has_url": rng.random() < 0.4,
            "has_geo": rng.random() < 0.6,
            "is_verified": rng.random() < 0.2,
            "creation_date": created.isoformat(),
            "followers_no": rng.randrange(100, 2_000_000),
            "recent_tweets": [],
        }
    records = []
    for index in range(count):
        author_id = rng.choice(_USERS)
        language = rng.choice(["en"] * 8 + ["ru", "ja"])
        country = rng.choice(sorted(_GEO_BOXES))
        lat_lo, lat_hi, lon_lo, lon_hi = _GEO_BOXES[country]
        geo = None
        if rng.random() < 0.9:
            geo = {
                "lat": round(rng.uniform(lat_lo, lat_hi), 5),
                "lon": round(rng.uniform(lon_lo, lon_hi), 5),
            }
        text = make_tweet_text(rng)
        is_retweet = rng.random() < 0.15
        if is_retweet:
            text = f"RT @{rng.choice(_USERS)}: {text}"
        tags = sorted({tag for tag in text.split() if tag.startswith("#")})
        records.append(
            {
                "id": f"t{index:06d}",
                "text": text,
                "author_id": author_id,
                "retweets_no": rng.randrange(0, 5000),
                "favorites_no": rng.randrange(0, 20000),
                "creation_date": (_EPOCH + timedelta(minutes=3 * index)).isoformat(),
                "geo": geo,
                "language": language,
                "is_retweet": is_retweet,
                "hashtags": tags,
                "author": authors[author_id],
            }
        )
    return records


def write_post_file(path, count: int, seed: int = 0) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in make_post_records(count, seed):
            handle.write(json.dumps(record, sort_keys=True) + "\n")
