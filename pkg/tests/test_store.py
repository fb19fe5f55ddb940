from datetime import datetime, timedelta, timezone

import pytest

from credistream.model import Tweet, UserProfile
from credistream.store import Store, StoreError

UTC = timezone.utc
T0 = datetime(2019, 5, 1, tzinfo=UTC)


def tweet(tweet_id="t1", author="u1", created=T0, retweets=0):
    return Tweet(
        id=tweet_id,
        text=f"text of {tweet_id}",
        author_id=author,
        retweets_no=retweets,
        favorites_no=0,
        creation_date=created,
    )


def user(user_id="u1"):
    return UserProfile(
        id=user_id,
        has_location=True,
        has_description=True,
        has_url=False,
        has_geo=True,
        is_verified=False,
        creation_date=datetime(2012, 1, 1, tzinfo=UTC),
        followers_no=500,
    )


def test_put_get_round_trip(tmp_path):
    with Store(tmp_path) as store:
        store.put_tweet(tweet(), T0)
        store.put_user(user(), T0)
        assert store.get_tweet("t1") == tweet()
        assert store.get_user("u1") == user()


def test_unknown_ids_raise_key_error(tmp_path):
    with Store(tmp_path) as store:
        with pytest.raises(KeyError):
            store.get_tweet("missing")
        with pytest.raises(KeyError):
            store.get_user("missing")


def test_write_once_per_snapshot_time(tmp_path):
    with Store(tmp_path) as store:
        store.put_tweet(tweet(), T0)
        with pytest.raises(StoreError):
            store.put_tweet(tweet(), T0)
        store.put_tweet(tweet(retweets=5), T0 + timedelta(hours=1))  # new snapshot ok


def test_latest_snapshot_wins(tmp_path):
    with Store(tmp_path) as store:
        store.put_tweet(tweet(retweets=1), T0)
        store.put_tweet(tweet(retweets=9), T0 + timedelta(hours=2))
        store.put_tweet(tweet(retweets=5), T0 + timedelta(hours=1))
        assert store.get_tweet("t1").retweets_no == 9


def test_list_recent_newest_first(tmp_path):
    with Store(tmp_path) as store:
        for i in range(25):
            store.put_tweet(tweet(f"t{i:02d}", created=T0 + timedelta(minutes=i)), T0)
        recent = store.list_recent("u1", 20)
        assert len(recent) == 20
        assert recent[0].id == "t24"
        assert recent[-1].id == "t05"


def test_scores_log_and_recent_scores(tmp_path):
    with Store(tmp_path) as store:
        for i in range(5):
            store.put_tweet(tweet(f"t{i}", created=T0 + timedelta(minutes=i)), T0)
            store.append_score(f"t{i}", 0.1 * i, T0)
        assert store.latest_score("t3") == pytest.approx(0.3)
        assert store.latest_score("nope") is None
        assert store.recent_scores("u1", 3) == pytest.approx([0.4, 0.3, 0.2])


def test_recent_scores_skip_unscored_tweets(tmp_path):
    with Store(tmp_path) as store:
        for i in range(4):
            store.put_tweet(tweet(f"t{i}", created=T0 + timedelta(minutes=i)), T0)
        store.append_score("t0", 0.9, T0)
        store.append_score("t2", 0.5, T0)
        assert store.recent_scores("u1", 20) == pytest.approx([0.5, 0.9])


def test_score_updates_keep_latest(tmp_path):
    with Store(tmp_path) as store:
        store.put_tweet(tweet(), T0)
        store.append_score("t1", 0.2, T0)
        store.append_score("t1", 0.8, T0 + timedelta(hours=1))
        assert store.latest_score("t1") == 0.8


def test_durability_across_reopen(tmp_path):
    with Store(tmp_path) as store:
        store.put_tweet(tweet(), T0)
        store.put_user(user(), T0)
        store.append_score("t1", 0.42, T0)
    with Store(tmp_path) as reopened:
        assert reopened.get_tweet("t1") == tweet()
        assert reopened.get_user("u1") == user()
        assert reopened.latest_score("t1") == 0.42
        # write-once survives restart too
        with pytest.raises(StoreError):
            reopened.put_tweet(tweet(), T0)


def test_corrupt_line_surfaces_as_store_error(tmp_path):
    with Store(tmp_path) as store:
        store.put_tweet(tweet(), T0)
    (tmp_path / "tweets.jsonl").open("a", encoding="utf-8").write("{broken\n")
    with pytest.raises(StoreError):
        Store(tmp_path)


def test_id_listings(tmp_path):
    with Store(tmp_path) as store:
        store.put_tweet(tweet("b"), T0)
        store.put_tweet(tweet("a"), T0)
        store.put_user(user("z"), T0)
        assert store.tweet_ids() == ["a", "b"]
        assert store.user_ids() == ["z"]
        assert store.has_tweet("a") and not store.has_tweet("c")
