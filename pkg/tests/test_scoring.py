import random

import pytest

from credistream.model import SentimentLabel, TweetFeatures, UserFeatures
from credistream.scoring import (
    DEFAULT_WEIGHTS,
    FormulaWeights,
    load_weights,
    sentiment_term,
    tweet_credibility,
    user_credibility,
)

L = SentimentLabel


def tweet_features(r=0.0, f=0.0, w=0.0, s=0.0):
    return TweetFeatures(retweets_score=r, favorites_score=f, relevant_words_ratio=w, sentiment_score=s)


def user_features(loc=0, url=0, desc=0, ver=0, geo=0, age=0.0, a20=0.0):
    return UserFeatures(loc, url, desc, ver, geo, age, a20)


class TestWeights:
    def test_published_defaults(self):
        w = DEFAULT_WEIGHTS
        assert (w.w_r, w.w_f, w.w_w, w.w_s) == (0.1, 0.3, 0.5, 0.1)
        assert (w.w_l, w.w_u, w.w_d, w.w_v, w.w_g, w.w_c, w.w_a20) == (
            0.01,
            0.01,
            0.03,
            0.1,
            0.08,
            0.07,
            0.7,
        )

    def test_sums_validated(self):
        with pytest.raises(ValueError):
            FormulaWeights(w_r=0.5)
        with pytest.raises(ValueError):
            FormulaWeights(w_a20=0.5)

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            FormulaWeights(w_r=-0.1, w_f=0.5, w_w=0.5, w_s=0.1)

    def test_check_can_be_disabled(self):
        w = FormulaWeights(w_r=0.5, check_sums=False)
        assert w.w_r == 0.5

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "weights.conf"
        path.write_text("# tuned\nw_r = 0.2\nw_f=0.2\nw_w=0.5\nw_s=0.1\n", encoding="utf-8")
        w = load_weights(path)
        assert w.w_r == 0.2 and w.w_f == 0.2
        assert w.w_a20 == 0.7  # untouched defaults

    def test_load_rejects_unknown_key(self, tmp_path):
        path = tmp_path / "weights.conf"
        path.write_text("w_zz=1\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_weights(path)


class TestSentimentTerm:
    @pytest.mark.parametrize(
        "label,weight",
        [
            (L.VERY_NEGATIVE, 0.75),
            (L.NEGATIVE, 0.50),
            (L.POSITIVE, 0.25),
            (L.NEUTRAL, 0.00),
            (L.VERY_POSITIVE, 0.50),
        ],
    )
    def test_single_grade_weights(self, label, weight):
        assert sentiment_term([label]) == weight
        assert sentiment_term([label, label, label]) == weight

    def test_all_neutral_is_zero(self):
        assert sentiment_term([L.NEUTRAL] * 5) == 0.0

    def test_mixed_mean(self):
        assert sentiment_term([L.VERY_NEGATIVE, L.NEUTRAL]) == pytest.approx(0.375)
        assert sentiment_term([L.POSITIVE, L.NEGATIVE]) == pytest.approx(0.375)

    def test_empty_is_zero(self):
        assert sentiment_term([]) == 0.0


class TestTweetCredibility:
    def test_zero_vector(self):
        assert tweet_credibility(tweet_features()) == 0.0

    def test_words_ratio_term_alone(self):
        assert tweet_credibility(tweet_features(w=1.0)) == pytest.approx(0.5)

    def test_all_ones_sum_to_one(self):
        assert tweet_credibility(tweet_features(1, 1, 1, 1)) == pytest.approx(1.0)

    def test_matches_straight_line_formula(self):
        rng = random.Random(5)
        for _ in range(500):
            r, f, w, s = (rng.random() for _ in range(4))
            expected = 0.1 * r + 0.3 * f + 0.5 * w + 0.1 * s
            assert tweet_credibility(tweet_features(r, f, w, s)) == pytest.approx(
                expected, abs=1e-15
            )

    def test_monotone_in_each_component(self):
        rng = random.Random(6)
        for _ in range(200):
            base = [rng.random() * 0.5 for _ in range(4)]
            score = tweet_credibility(tweet_features(*base))
            bump = rng.randrange(4)
            raised = list(base)
            raised[bump] += 0.3
            assert tweet_credibility(tweet_features(*raised)) >= score

    def test_bounded_for_unit_inputs(self):
        rng = random.Random(7)
        for _ in range(300):
            score = tweet_credibility(tweet_features(*(rng.random() for _ in range(4))))
            assert 0.0 <= score <= 1.0


class TestUserCredibility:
    def test_zero_vector(self):
        assert user_credibility(user_features()) == 0.0

    def test_all_ones(self):
        assert user_credibility(user_features(1, 1, 1, 1, 1, 1.0, 1.0)) == pytest.approx(1.0)

    def test_last20_term_alone(self):
        assert user_credibility(user_features(a20=1.0)) == pytest.approx(0.7)

    def test_last20_dominates_with_exact_delta(self):
        rng = random.Random(8)
        for _ in range(100):
            flags = [rng.randrange(2) for _ in range(5)]
            age = rng.random()
            low, high = sorted((rng.random(), rng.random()))
            before = user_credibility(user_features(*flags, age, low))
            after = user_credibility(user_features(*flags, age, high))
            assert after - before == pytest.approx(0.7 * (high - low), abs=1e-12)

    def test_monotone_in_each_component(self):
        base = user_features(0, 0, 0, 0, 0, 0.2, 0.2)
        score = user_credibility(base)
        assert user_credibility(user_features(1, 0, 0, 0, 0, 0.2, 0.2)) >= score
        assert user_credibility(user_features(0, 0, 0, 0, 0, 0.9, 0.2)) >= score
        assert user_credibility(user_features(0, 0, 0, 0, 0, 0.2, 0.9)) >= score
