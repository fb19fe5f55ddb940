"""Command-line entry point.

Every capability is a subcommand delegating 1:1 to a module operation.
Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

from . import classifier, geostats, pipeline, scoring, sentiment, simtext, synth
from .features import default_stopwords, extract_user_features, load_stopwords
from .model import GeoPoint, SentimentLabel, TweetFeatures, UserFeatures, Verdict
from .sentiment import default_word_lexicon, load_word_lexicon
from .store import Store, StoreError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3

_FEATURE_COLUMNS = (
    "retweets_score",
    "favorites_score",
    "relevant_words_ratio",
    "sentiment_score",
    "hashtag_count",
    "hashtag_chars",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage errors exit 1, not 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _print_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _write_json_file(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        json.dump(obj, handle, sort_keys=True, indent=1)
        handle.write("\n")


def _read_lines(path: str):
    if path == "-":
        return sys.stdin.read().splitlines()
    return Path(path).read_text(encoding="utf-8").splitlines()


def _load_weights(args) -> scoring.FormulaWeights:
    if getattr(args, "weights", None):
        return scoring.load_weights(args.weights, check_sums=not args.no_weight_check)
    if getattr(args, "no_weight_check", False):
        return scoring.FormulaWeights(check_sums=False)
    return scoring.DEFAULT_WEIGHTS


def _sentiment_fn(args):
    lexicon = load_word_lexicon(args.lexicon) if getattr(args, "lexicon", None) else default_word_lexicon()
    return lambda token: sentiment.word_sentiment(token, lexicon)


def _stopwords(args) -> frozenset[str]:
    if getattr(args, "stopwords", None):
        return load_stopwords(args.stopwords)
    return default_stopwords()


def _parse_point(obj: dict) -> GeoPoint:
    return GeoPoint(lat=float(obj["lat"]), lon=float(obj["lon"]))


def _jsonl_objects(path: str):
    for line_no, line in enumerate(_read_lines(path), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{line_no}: invalid JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_ingest(args) -> int:
    topics = sentiment.load_topics(args.topics) if args.topics else None
    languages = (
        frozenset(code.strip().lower() for code in args.languages.split(","))
        if args.languages
        else pipeline.DEFAULT_LANGUAGES
    )
    result = pipeline.ingest(
        _read_lines(args.input),
        languages=languages,
        require_geo=not args.no_require_geo,
        topics=topics,
    )
    if args.store:
        snapshot = datetime.fromisoformat(args.snapshot_time) if args.snapshot_time else datetime.now(timezone.utc)
        with Store(args.store) as store:
            pipeline.store_posts(store, result.accepted, snapshot)
    if args.accepted:
        lines = []
        for post in result.accepted:
            obj = dict_from_post(post)
            lines.append(json.dumps(obj, sort_keys=True))
        _write_text(args.accepted, "\n".join(lines) + ("\n" if lines else ""))
    if args.rejects:
        buf = ["line,reason,detail"]
        for rejection in result.rejections:
            detail = rejection.detail.replace('"', "'")
            buf.append(f'{rejection.line_no},{rejection.reason.value},"{detail}"')
        _write_text(args.rejects, "\n".join(buf) + "\n")
    _print_json(
        {
            "lines_read": result.lines_read,
            "accepted": len(result.accepted),
            "rejected": len(result.rejections),
            "by_reason": result.counts_by_reason(),
        }
    )
    return EXIT_OK


def dict_from_post(post: pipeline.AcceptedPost) -> dict:
    from .model import tweet_to_dict, user_to_dict

    obj = tweet_to_dict(post.tweet)
    obj["author"] = user_to_dict(post.author)
    if post.sections:
        obj["sections"] = sorted(post.sections)
    return obj


def _cmd_dedup(args) -> int:
    mode = pipeline.DedupMode(args.mode)
    tweets = []
    for obj in _jsonl_objects(args.input):
        from .model import tweet_from_dict

        tweets.append(tweet_from_dict(obj))
    result = pipeline.dedup(tweets, mode=mode, threshold=args.threshold)
    if args.output:
        from .model import tweet_to_dict

        lines = [json.dumps(tweet_to_dict(t), sort_keys=True) for t in result.representatives]
        _write_text(args.output, "\n".join(lines) + ("\n" if lines else ""))
    if args.groups:
        _write_json_file(args.groups, result.groups)
    _print_json({"input": len(tweets), "groups": len(result.groups)})
    return EXIT_OK


def _tweet_features_from_json(payload: str) -> TweetFeatures:
    obj = json.loads(payload)
    return TweetFeatures(**obj)


def _cmd_score_tweet(args) -> int:
    weights = _load_weights(args)
    if args.features:
        features = _tweet_features_from_json(args.features)
        _print_json(scoring.tweet_credibility(features, weights))
        return EXIT_OK
    stopwords = _stopwords(args)
    sentiment_fn = _sentiment_fn(args)
    rows = []
    for obj in _jsonl_objects(args.input):
        tweet, author = pipeline.parse_post_line(json.dumps(obj))
        post = pipeline.AcceptedPost(tweet=tweet, author=author)
        scored = pipeline.score_posts(
            [post], weights=weights, stopwords=stopwords, sentiment_fn=sentiment_fn
        )[0]
        rows.append({"id": tweet.id, "score": scored.score, "verdict": scored.verdict.value})
    for row in rows:
        _print_json(row)
    return EXIT_OK


def _cmd_score_user(args) -> int:
    weights = _load_weights(args)
    if args.features:
        features = UserFeatures(**json.loads(args.features))
        _print_json(scoring.user_credibility(features, weights))
        return EXIT_OK
    from .model import user_from_dict

    now = datetime.fromisoformat(args.now) if args.now else datetime.now(timezone.utc)
    scores = [float(v) for v in args.last20.split(",")] if args.last20 else []
    for obj in _jsonl_objects(args.input):
        user = user_from_dict(obj)
        features = extract_user_features(user, now=now, last20_scores=scores)
        _print_json({"id": user.id, "score": scoring.user_credibility(features, weights)})
    return EXIT_OK


def _read_training_csv(path: str) -> list[tuple[TweetFeatures, bool, int]]:
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        for record in reader:
            features = TweetFeatures(
                retweets_score=float(record["retweets_score"]),
                favorites_score=float(record["favorites_score"]),
                relevant_words_ratio=float(record["relevant_words_ratio"]),
                sentiment_score=float(record.get("sentiment_score", 0) or 0),
                hashtag_count=int(record.get("hashtag_count", 0) or 0),
                hashtag_chars=int(record.get("hashtag_chars", 0) or 0),
            )
            is_retweet = (record.get("is_retweet", "0") or "0").strip().lower() in ("1", "true")
            rows.append((features, is_retweet, int(record["label"])))
    if not rows:
        raise ValueError(f"{path}: no training rows")
    return rows


def _cmd_train(args) -> int:
    config = classifier.FeatureConfig.for_id(classifier.ConfigId(args.config))
    rows = _read_training_csv(args.data)
    if args.invert_labels:
        rows = [(f, r, 1 - label) for f, r, label in rows]
    examples, scaling = classifier.prepare_training_data(config, rows)
    n_inputs = len(config.features)
    if args.hidden:
        topology = classifier.NnTopology(
            n_inputs=n_inputs,
            n_hidden=args.hidden,
            n_samples_hint=len(examples),
            alpha=args.alpha,
        )
    else:
        bound = classifier.hidden_upper_bound(len(examples), n_inputs, 1, args.alpha)
        topology = classifier.NnTopology(n_inputs=n_inputs, n_hidden=min(13, bound))
    model = classifier.train(
        examples,
        topology,
        iterations=args.iterations,
        learning_rate=args.lr,
        seed=args.seed,
        config=config.id,
        scaling=scaling,
    )
    classifier.save_model(model, args.output)
    _print_json(
        {
            "config": config.id.value,
            "examples": len(examples),
            "n_hidden": topology.n_hidden,
            "iterations": args.iterations,
            "model": args.output,
        }
    )
    return EXIT_OK


def _examples_for_model(model: classifier.NnModel, path: str) -> list[classifier.LabeledExample]:
    if model.config is None:
        raise ValueError("model carries no configuration id")
    config = classifier.FeatureConfig.for_id(model.config)
    rows = _read_training_csv(path)
    return [
        classifier.LabeledExample(
            tuple(classifier.select_features(config, features, model.scaling)), label
        )
        for features, _, label in rows
    ]


def _cmd_eval(args) -> int:
    model = classifier.load_model(args.model)
    data = _examples_for_model(model, args.data)
    metrics = classifier.evaluate(model, data, threshold=args.threshold)
    _print_json(
        {
            "accuracy": metrics.accuracy,
            "precision": metrics.precision,
            "recall": metrics.recall,
            "tp": metrics.true_positives,
            "fp": metrics.false_positives,
            "tn": metrics.true_negatives,
            "fn": metrics.false_negatives,
        }
    )
    return EXIT_OK


def _cmd_predict(args) -> int:
    model = classifier.load_model(args.model)
    if args.features:
        values = json.loads(args.features)
        if isinstance(values, dict):
            if model.config is None:
                raise ValueError("model carries no configuration id; pass a feature array")
            config = classifier.FeatureConfig.for_id(model.config)
            features = classifier.select_features(
                config, TweetFeatures(**values), model.scaling
            )
        else:
            features = [float(v) for v in values]
        score = classifier.predict(model, features)
        _print_json(
            {"score": score, "verdict": classifier.verdict_from_score(score, args.threshold).value}
        )
        return EXIT_OK
    for example in _examples_for_model(model, args.data):
        score = classifier.predict(model, example.features)
        _print_json(
            {"score": score, "verdict": classifier.verdict_from_score(score, args.threshold).value}
        )
    return EXIT_OK


def _cmd_bench_sim(args) -> int:
    if args.generate:
        texts = synth.make_tweet_texts(args.generate, seed=args.seed)
    elif args.input:
        texts = [line for line in _read_lines(args.input) if line.strip()]
    else:
        raise ValueError("bench-sim needs --input or --generate")
    params = simtext.AlignmentParams(
        match_score=args.match, mismatch_penalty=args.mismatch, gap_penalty=args.gap
    )
    reports = simtext.bench(
        texts,
        params=params,
        threshold=args.threshold,
        seed=args.seed,
        max_pairs=args.max_pairs,
        backend=args.backend,
    )
    _write_text(args.output, simtext.reports_to_csv(reports))
    return EXIT_OK


def _verdict_records(path: str, boundaries, recent_key: str | None = None):
    for obj in _jsonl_objects(path):
        verdict = Verdict(obj["verdict"])
        if "country" in obj:
            yield obj["country"], verdict
        else:
            point = _parse_point(obj)
            recent = obj.get(recent_key, []) if recent_key else []
            yield geostats.assign_country(point, boundaries, recent), verdict


def _cmd_stats(args) -> int:
    boundaries = (
        geostats.CountryBoundaries.load(args.boundaries)
        if args.boundaries
        else geostats.default_boundaries()
    )
    continents = (
        geostats.load_continents(args.continents)
        if args.continents
        else geostats.default_continents()
    )
    level = geostats.AggregationLevel(args.level)
    records = list(_verdict_records(args.input, boundaries, recent_key="recent_countries"))
    stats = geostats.aggregate(records, level=level, min_count=args.min_count, continents=continents)
    _write_text(args.output, geostats.region_stats_to_csv(stats))
    return EXIT_OK


def _cmd_clusters(args) -> int:
    records = []
    for obj in _jsonl_objects(args.input):
        records.append((_parse_point(obj), SentimentLabel(obj["sentiment"])))
    clusters = geostats.cluster_points(records, cell_size_deg=args.cell_size)
    geojson = geostats.clusters_to_geojson(clusters)
    _write_json_file(args.output, geojson)
    if args.html:
        _write_text(args.html, geostats.render_map_html(geojson, title="Sentiment clusters"))
    _print_json({"records": len(records), "clusters": len(clusters)})
    return EXIT_OK


def _cmd_heatmap(args) -> int:
    records = []
    for obj in _jsonl_objects(args.input):
        records.append((_parse_point(obj), Verdict(obj["verdict"])))
    grid = geostats.heatmap(
        records, cell_size_deg=args.cell_size, which=geostats.HeatmapClass(args.which)
    )
    geojson = geostats.heatmap_to_geojson(grid)
    _write_json_file(args.output, geojson)
    if args.html:
        _write_text(args.html, geostats.render_map_html(geojson, title="Credibility heatmap"))
    _print_json({"records": len(records), "cells": len(grid.cells), "total": grid.total()})
    return EXIT_OK


def _cmd_monitor(args) -> int:
    if bool(args.tweet) == bool(args.user):
        raise ValueError("monitor needs exactly one of --tweet or --user")
    interval = timedelta(minutes=args.interval_mins)
    if args.fake_clock:
        start = (
            datetime.fromisoformat(args.start)
            if args.start
            else datetime(2020, 1, 1, tzinfo=timezone.utc)
        )
        clock: pipeline.Clock = pipeline.FakeClock(start)
    else:
        clock = pipeline.SystemClock()
    with Store(args.store) as store:
        if args.tweet:
            job = pipeline.monitor_tweet(
                store,
                args.tweet,
                ticks=args.ticks,
                clock=clock,
                interval=interval,
                weights=_load_weights(args),
                stopwords=_stopwords(args),
                sentiment_fn=_sentiment_fn(args),
            )
        else:
            job = pipeline.monitor_user(
                store,
                args.user,
                ticks=args.ticks,
                clock=clock,
                interval=interval,
                weights=_load_weights(args),
            )
    lines = ["timestamp,score"]
    for at, score in job.samples:
        lines.append(f"{at.isoformat()},{score!r}")
    _write_text(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_trend(args) -> int:
    series = []
    for line in _read_lines(args.input):
        line = line.strip()
        if not line or line.startswith("timestamp"):
            continue
        timestamp, _, score = line.partition(",")
        series.append((datetime.fromisoformat(timestamp), float(score)))
    _print_json(pipeline.trend(series, flat_epsilon=args.flat_epsilon).value)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_weight_flags(parser) -> None:
    parser.add_argument("--weights", help="key=value weights file (defaults as published)")
    parser.add_argument(
        "--no-weight-check",
        action="store_true",
        help="skip the sum-to-one validation (weight experiments)",
    )


def _add_lexicon_flags(parser) -> None:
    parser.add_argument("--stopwords", help="stopword file (one token per line)")
    parser.add_argument("--lexicon", help="word<TAB>grade sentiment lexicon file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="credistream", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="filter a post stream (language, geo, topics)")
    p.add_argument("--input", required=True, help="posts JSONL file, '-' for stdin")
    p.add_argument("--languages", help="comma-separated allowed language codes")
    p.add_argument("--no-require-geo", action="store_true")
    p.add_argument("--topics", help="section<TAB>language<TAB>word keyword file")
    p.add_argument("--store", help="store directory to write snapshots into")
    p.add_argument("--snapshot-time", help="ISO timestamp for stored snapshots")
    p.add_argument("--accepted", help="write accepted posts JSONL here")
    p.add_argument("--rejects", help="write the rejection log CSV here")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("dedup", help="group near-duplicate posts")
    p.add_argument("--input", required=True, help="tweets JSONL file")
    p.add_argument("--mode", choices=[m.value for m in pipeline.DedupMode], default="offline")
    p.add_argument("--threshold", type=float, help="override the mode's threshold")
    p.add_argument("--output", help="write representative tweets JSONL here")
    p.add_argument("--groups", help="write the group map JSON here")
    p.set_defaults(func=_cmd_dedup)

    p = sub.add_parser("score-tweet", help="tweet-formula credibility score")
    p.add_argument("--features", help="TweetFeatures JSON object")
    p.add_argument("--input", help="posts JSONL file (tweet + author per line)")
    _add_weight_flags(p)
    _add_lexicon_flags(p)
    p.set_defaults(func=_cmd_score_tweet)

    p = sub.add_parser("score-user", help="user-formula credibility score")
    p.add_argument("--features", help="UserFeatures JSON object")
    p.add_argument("--input", help="user profiles JSONL file")
    p.add_argument("--now", help="ISO timestamp for the age ratio")
    p.add_argument("--last20", help="comma-separated recent scores")
    _add_weight_flags(p)
    p.set_defaults(func=_cmd_score_user)

    p = sub.add_parser("train", help="train the credibility classifier")
    p.add_argument("--data", required=True, help="training CSV")
    p.add_argument("--config", choices=[c.value for c in classifier.ConfigId], default="C5")
    p.add_argument("--iterations", type=int, default=100_000)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hidden", type=int, default=0, help="hidden neurons (0 = auto, max 13)")
    p.add_argument("--alpha", type=float, default=2.0, help="overfitting-bound scale in [2,10]")
    p.add_argument("--invert-labels", action="store_true", help="dataset uses 0 = credible")
    p.add_argument("--output", required=True, help="model file to write")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on labeled data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="labeled CSV (same schema as train)")
    p.add_argument("--threshold", type=float, default=classifier.DEFAULT_THRESHOLD)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("predict", help="score feature vectors with a model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", help="feature array or TweetFeatures JSON")
    p.add_argument("--data", help="CSV of rows to score")
    p.add_argument("--threshold", type=float, default=classifier.DEFAULT_THRESHOLD)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("bench-sim", help="time the four similarity algorithms")
    p.add_argument("--input", help="text file, one post per line")
    p.add_argument("--generate", type=int, help="generate a synthetic corpus of this size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=simtext.OFFLINE_THRESHOLD)
    p.add_argument("--max-pairs", type=int, help="sample this many pairs instead of all")
    p.add_argument("--backend", choices=["auto", "c", "py"], default="auto")
    p.add_argument("--match", type=float, default=1.0)
    p.add_argument("--mismatch", type=float, default=-1.0)
    p.add_argument("--gap", type=float, default=-1.0)
    p.add_argument("--output", help="CSV path (default stdout)")
    p.set_defaults(func=_cmd_bench_sim)

    p = sub.add_parser("stats", help="credible/not-credible statistics per region")
    p.add_argument("--input", required=True, help="JSONL of {lat,lon|country, verdict}")
    p.add_argument("--level", choices=[l.value for l in geostats.AggregationLevel], default="country")
    p.add_argument("--min-count", type=int, default=geostats.MIN_REGION_COUNT)
    p.add_argument("--boundaries", help="GeoJSON boundary file (default: shipped demo)")
    p.add_argument("--continents", help="country,continent CSV (default: shipped demo)")
    p.add_argument("--output", help="CSV path (default stdout)")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("clusters", help="sentiment grid clusters as GeoJSON")
    p.add_argument("--input", required=True, help="JSONL of {lat, lon, sentiment}")
    p.add_argument("--cell-size", type=float, default=5.0)
    p.add_argument("--output", required=True, help="GeoJSON path")
    p.add_argument("--html", help="also render a standalone HTML page")
    p.set_defaults(func=_cmd_clusters)

    p = sub.add_parser("heatmap", help="per-cell verdict counts as GeoJSON")
    p.add_argument("--input", required=True, help="JSONL of {lat, lon, verdict}")
    p.add_argument("--cell-size", type=float, default=5.0)
    p.add_argument("--which", choices=[w.value for w in geostats.HeatmapClass], default="not_credible")
    p.add_argument("--output", required=True, help="GeoJSON path")
    p.add_argument("--html", help="also render a standalone HTML page")
    p.set_defaults(func=_cmd_heatmap)

    p = sub.add_parser("monitor", help="sample a credibility score over time")
    p.add_argument("--store", required=True, help="store directory")
    p.add_argument("--tweet", help="tweet id to monitor")
    p.add_argument("--user", help="user id to monitor")
    p.add_argument("--ticks", type=int, required=True)
    p.add_argument("--interval-mins", type=float, default=60.0)
    p.add_argument("--fake-clock", action="store_true", help="deterministic clock, no sleeping")
    p.add_argument("--start", help="ISO start time for the fake clock")
    p.add_argument("--output", help="CSV path (default stdout)")
    _add_weight_flags(p)
    _add_lexicon_flags(p)
    p.set_defaults(func=_cmd_monitor)

    p = sub.add_parser("trend", help="classify a score series")
    p.add_argument("--input", required=True, help="timestamp,score CSV")
    p.add_argument("--flat-epsilon", type=float, default=pipeline.DEFAULT_FLAT_EPSILON)
    p.set_defaults(func=_cmd_trend)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except OSError as exc:
        print(f"credistream: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError, KeyError, StoreError, geostats.BoundaryError) as exc:
        print(f"credistream: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
