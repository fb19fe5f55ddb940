import json
from datetime import datetime, timedelta, timezone

import pytest

from credistream.cli import EXIT_DATA, EXIT_IO, EXIT_OK, EXIT_USAGE, build_parser, main
from credistream.model import GeoPoint, Tweet, UserProfile, tweet_to_dict, user_to_dict

UTC = timezone.utc
T0 = datetime(2019, 5, 1, tzinfo=UTC)

ZERO_FEATURES = '{"retweets_score":0,"favorites_score":0,"relevant_words_ratio":0,"sentiment_score":0}'


def post_line(tweet_id="t1", text="hello world news", geo=GeoPoint(40, -100), language="en", created=T0):
    tweet = Tweet(
        id=tweet_id,
        text=text,
        author_id="u1",
        retweets_no=30,
        favorites_no=60,
        creation_date=created,
        geo=geo,
        language=language,
    )
    author = UserProfile(
        id="u1",
        has_location=True,
        has_description=True,
        has_url=True,
        has_geo=True,
        is_verified=True,
        creation_date=datetime(2012, 6, 1, tzinfo=UTC),
        followers_no=10_000,
    )
    obj = tweet_to_dict(tweet)
    obj["author"] = user_to_dict(author)
    return json.dumps(obj)


def write_training_csv(path, rows=200):
    import random

    rng = random.Random(1)
    lines = ["retweets_score,favorites_score,relevant_words_ratio,sentiment_score,hashtag_count,hashtag_chars,is_retweet,label"]
    for _ in range(rows):
        r, f, w = rng.random(), rng.random(), rng.random()
        label = int(0.4 * r + 0.6 * w > 0.5)
        lines.append(f"{r},{f},{w},0.0,0,0,0,{label}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self):
        assert main(["definitely-not-a-command"]) == EXIT_USAGE

    def test_unknown_flag_is_usage_error(self):
        assert main(["score-tweet", "--bogus-flag", "1"]) == EXIT_USAGE

    def test_bad_data_is_data_error(self, capsys):
        assert main(["score-tweet", "--features", '{"retweets_score":"x"}']) == EXIT_DATA
        assert "credistream" in capsys.readouterr().err

    def test_missing_file_is_io_error(self):
        assert main(["dedup", "--input", "/nonexistent/path.jsonl"]) == EXIT_IO

    def test_help_exits_zero(self):
        assert main(["--help"]) == EXIT_OK

    def test_every_subcommand_has_help(self):
        parser = build_parser()
        for name in (
            "ingest",
            "dedup",
            "score-tweet",
            "score-user",
            "train",
            "eval",
            "predict",
            "bench-sim",
            "stats",
            "clusters",
            "heatmap",
            "monitor",
            "trend",
        ):
            assert main([name, "--help"]) == EXIT_OK, name


class TestScoreCommands:
    def test_zero_features_print_zero(self, capsys):
        assert main(["score-tweet", "--features", ZERO_FEATURES]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "0.0"

    def test_all_ones_user(self, capsys):
        features = '{"u_location":1,"u_url":1,"u_description":1,"u_verified":1,"u_geo":1,"u_age_ratio":1,"u_avg_last20":1}'
        assert main(["score-user", "--features", features]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "1.0"

    def test_custom_weights_file(self, tmp_path, capsys):
        weights = tmp_path / "weights.conf"
        weights.write_text("w_r=0.25\nw_f=0.25\nw_w=0.25\nw_s=0.25\n", encoding="utf-8")
        features = '{"retweets_score":1,"favorites_score":0,"relevant_words_ratio":0,"sentiment_score":0}'
        assert main(["score-tweet", "--features", features, "--weights", str(weights)]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "0.25"

    def test_score_tweets_from_file(self, tmp_path, capsys):
        posts = tmp_path / "posts.jsonl"
        posts.write_text(post_line("a") + "\n" + post_line("b") + "\n", encoding="utf-8")
        assert main(["score-tweet", "--input", str(posts)]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        first = json.loads(lines[0])
        assert first["id"] == "a" and 0.0 <= first["score"] <= 1.0


class TestIngestDedup:
    def test_ingest_summary_and_rejects(self, tmp_path, capsys):
        posts = tmp_path / "posts.jsonl"
        posts.write_text(
            "\n".join([post_line("a"), post_line("b", language="xx"), "broken"]) + "\n",
            encoding="utf-8",
        )
        rejects = tmp_path / "rejects.csv"
        accepted = tmp_path / "accepted.jsonl"
        code = main(
            [
                "ingest",
                "--input",
                str(posts),
                "--rejects",
                str(rejects),
                "--accepted",
                str(accepted),
            ]
        )
        assert code == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["accepted"] == 1 and summary["rejected"] == 2
        assert summary["by_reason"]["language"] == 1
        assert rejects.read_text().startswith("line,reason,detail")
        assert json.loads(accepted.read_text().splitlines()[0])["id"] == "a"

    def test_ingest_into_store(self, tmp_path, capsys):
        posts = tmp_path / "posts.jsonl"
        posts.write_text(post_line("a") + "\n", encoding="utf-8")
        store_dir = tmp_path / "store"
        code = main(
            ["ingest", "--input", str(posts), "--store", str(store_dir), "--snapshot-time", T0.isoformat()]
        )
        assert code == EXIT_OK
        from credistream.store import Store

        with Store(store_dir) as store:
            assert store.has_tweet("a")
            assert store.has_user("u1")

    def test_dedup_outputs(self, tmp_path, capsys):
        base = "breaking news about the summit tonight"
        posts = tmp_path / "tweets.jsonl"
        lines = [
            json.dumps(tweet_to_dict(Tweet(id="t0", text=base, author_id="u", retweets_no=0, favorites_no=0, creation_date=T0))),
            json.dumps(tweet_to_dict(Tweet(id="t1", text=f"RT @u: {base}", author_id="u", retweets_no=0, favorites_no=0, creation_date=T0 + timedelta(minutes=1)))),
            json.dumps(tweet_to_dict(Tweet(id="t2", text="unrelated words entirely", author_id="u", retweets_no=0, favorites_no=0, creation_date=T0 + timedelta(minutes=2)))),
        ]
        posts.write_text("\n".join(lines) + "\n", encoding="utf-8")
        reps = tmp_path / "reps.jsonl"
        groups = tmp_path / "groups.json"
        code = main(
            ["dedup", "--input", str(posts), "--mode", "offline", "--output", str(reps), "--groups", str(groups)]
        )
        assert code == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary == {"groups": 2, "input": 3}
        assert len(reps.read_text().splitlines()) == 2
        assert json.loads(groups.read_text())["t0"] == ["t0", "t1"]


class TestTrainEvalPredict:
    def test_train_is_deterministic(self, tmp_path, capsys):
        data = tmp_path / "train.csv"
        write_training_csv(data)
        model_a = tmp_path / "a.model"
        model_b = tmp_path / "b.model"
        args = ["train", "--data", str(data), "--config", "C1", "--iterations", "2000", "--seed", "7"]
        assert main(args + ["--output", str(model_a)]) == EXIT_OK
        assert main(args + ["--output", str(model_b)]) == EXIT_OK
        assert model_a.read_bytes() == model_b.read_bytes()

    def test_train_eval_predict_round_trip(self, tmp_path, capsys):
        data = tmp_path / "train.csv"
        write_training_csv(data, rows=300)
        model = tmp_path / "model.txt"
        code = main(
            ["train", "--data", str(data), "--config", "C1", "--iterations", "30000", "--lr", "0.5", "--seed", "3", "--output", str(model)]
        )
        assert code == EXIT_OK
        capsys.readouterr()

        assert main(["eval", "--model", str(model), "--data", str(data), "--threshold", "0.5"]) == EXIT_OK
        metrics = json.loads(capsys.readouterr().out)
        assert metrics["accuracy"] >= 0.9
        assert metrics["tp"] + metrics["fp"] + metrics["tn"] + metrics["fn"] == 300

        assert main(["predict", "--model", str(model), "--features", "[0.9, 0.9, 0.9]"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["verdict"] == "credible"

    def test_invert_labels_flag(self, tmp_path, capsys):
        data = tmp_path / "train.csv"
        data.write_text(
            "retweets_score,favorites_score,relevant_words_ratio,sentiment_score,hashtag_count,hashtag_chars,is_retweet,label\n"
            "0.9,0.9,0.9,0,0,0,0,0\n0.1,0.1,0.1,0,0,0,0,1\n",
            encoding="utf-8",
        )
        model = tmp_path / "model.txt"
        code = main(
            ["train", "--data", str(data), "--config", "C1", "--iterations", "500", "--invert-labels", "--output", str(model)]
        )
        assert code == EXIT_OK


class TestBenchSim:
    def test_csv_to_stdout(self, capsys):
        assert main(["bench-sim", "--generate", "30", "--seed", "5"]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "algorithm,pairs,wall_ms,groups"
        assert len(lines) == 5
        assert all(line.split(",")[1] == "435" for line in lines[1:])

    def test_backend_flag(self, capsys):
        assert main(["bench-sim", "--generate", "10", "--backend", "py"]) == EXIT_OK

    def test_needs_input_or_generate(self):
        assert main(["bench-sim"]) == EXIT_DATA


class TestGeoCommands:
    def write_points(self, path, rows):
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")

    def test_stats_exclusion_rule(self, tmp_path, capsys):
        records = [{"country": "AA", "verdict": "credible"}] * 24
        records += [{"country": "BB", "verdict": "not_credible"}] * 30
        points = tmp_path / "records.jsonl"
        self.write_points(points, records)
        assert main(["stats", "--input", str(points), "--level", "country"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "BB" in out and "AA" not in out

    def test_stats_with_geo_lookup(self, tmp_path, capsys):
        records = [{"lat": 40, "lon": -100, "verdict": "credible"}] * 30
        points = tmp_path / "records.jsonl"
        self.write_points(points, records)
        assert main(["stats", "--input", str(points), "--min-count", "10"]) == EXIT_OK
        assert "US,30,0" in capsys.readouterr().out

    def test_stats_continent_level(self, tmp_path, capsys):
        records = [{"country": "US", "verdict": "credible"}] * 30
        points = tmp_path / "records.jsonl"
        self.write_points(points, records)
        assert main(["stats", "--input", str(points), "--level", "continent", "--min-count", "1"]) == EXIT_OK
        assert "North America" in capsys.readouterr().out

    def test_clusters_and_html(self, tmp_path, capsys):
        records = [
            {"lat": 10.1, "lon": 10.1, "sentiment": "pos"},
            {"lat": 10.2, "lon": 10.3, "sentiment": "pos"},
            {"lat": 50.0, "lon": 50.0, "sentiment": "neg"},
        ]
        points = tmp_path / "points.jsonl"
        self.write_points(points, records)
        out = tmp_path / "clusters.geojson"
        page = tmp_path / "map.html"
        code = main(["clusters", "--input", str(points), "--cell-size", "5", "--output", str(out), "--html", str(page)])
        assert code == EXIT_OK
        geojson = json.loads(out.read_text())
        assert len(geojson["features"]) == 2
        colors = {f["properties"]["color"] for f in geojson["features"]}
        assert colors == {"#00ff00", "#ff0000"}
        assert page.read_text().startswith("<!DOCTYPE html>")

    def test_heatmap_totals(self, tmp_path, capsys):
        records = [{"lat": 1, "lon": 1, "verdict": "not_credible"}] * 4
        records += [{"lat": 1, "lon": 1, "verdict": "credible"}] * 3
        points = tmp_path / "points.jsonl"
        self.write_points(points, records)
        out = tmp_path / "heat.geojson"
        assert main(["heatmap", "--input", str(points), "--output", str(out)]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["total"] == 4  # not_credible only by default
        feature = json.loads(out.read_text())["features"][0]
        assert feature["properties"]["not_credible"] == 4


class TestMonitorTrend:
    def seeded_store(self, tmp_path):
        from credistream.store import Store

        posts = [post_line("t1")]
        store_dir = tmp_path / "store"
        inp = tmp_path / "posts.jsonl"
        inp.write_text("\n".join(posts) + "\n", encoding="utf-8")
        assert main(["ingest", "--input", str(inp), "--store", str(store_dir), "--snapshot-time", T0.isoformat()]) == EXIT_OK
        return store_dir

    def test_monitor_tweet_fake_clock(self, tmp_path, capsys):
        store_dir = self.seeded_store(tmp_path)
        capsys.readouterr()
        series = tmp_path / "series.csv"
        code = main(
            [
                "monitor",
                "--store",
                str(store_dir),
                "--tweet",
                "t1",
                "--ticks",
                "4",
                "--interval-mins",
                "60",
                "--fake-clock",
                "--start",
                "2020-01-01T00:00:00+00:00",
                "--output",
                str(series),
            ]
        )
        assert code == EXIT_OK
        lines = series.read_text().splitlines()
        assert lines[0] == "timestamp,score"
        assert len(lines) == 5
        assert lines[1].startswith("2020-01-01T00:00:00")
        assert lines[4].startswith("2020-01-01T03:00:00")

        capsys.readouterr()
        assert main(["trend", "--input", str(series)]) == EXIT_OK
        assert json.loads(capsys.readouterr().out) == "constant"

    def test_monitor_requires_exactly_one_target(self, tmp_path):
        store_dir = self.seeded_store(tmp_path)
        assert main(["monitor", "--store", str(store_dir), "--ticks", "1", "--fake-clock"]) == EXIT_DATA

    def test_monitor_unknown_id_is_data_error(self, tmp_path):
        store_dir = self.seeded_store(tmp_path)
        code = main(["monitor", "--store", str(store_dir), "--tweet", "zzz", "--ticks", "1", "--fake-clock"])
        assert code == EXIT_DATA

    def test_trend_decreasing(self, tmp_path, capsys):
        series = tmp_path / "series.csv"
        series.write_text(
            "timestamp,score\n2020-01-01T00:00:00+00:00,0.965\n2020-01-01T01:00:00+00:00,0.95\n2020-01-01T02:00:00+00:00,0.935\n",
            encoding="utf-8",
        )
        assert main(["trend", "--input", str(series)]) == EXIT_OK
        assert json.loads(capsys.readouterr().out) == "decreasing"
