"""String-similarity distances, near-duplicate grouping and a timing harness.

Four character-level measures: Levenshtein edit distance, Needleman-Wunsch
global alignment, Jaro-Winkler, and Smith-Waterman local alignment.  The
kernels live in a compiled extension when available (``_ckernels``) with a
pure-Python fallback (``_pykernels``); selection happens at import time and
``BACKEND`` records the choice.
"""

from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import dataclass
from datetime import timedelta
from enum import Enum
from types import ModuleType
from typing import Sequence

from . import _pykernels

try:
    from . import _ckernels

    _active: ModuleType = _ckernels
    BACKEND = "c"
except ImportError:  # pragma: no cover - depends on the build environment
    _ckernels = None
    _active = _pykernels
    BACKEND = "py"


class Algorithm(Enum):
    LEVENSHTEIN = "levenshtein"
    NEEDLEMAN_WUNSCH = "needleman-wunsch"
    JARO_WINKLER = "jaro-winkler"
    SMITH_WATERMAN = "smith-waterman"


#: Mode defaults: local alignment for offline quality, Jaro-Winkler when
#: results must come back in real time.  Thresholds calibrated on the
#: retweet fixture corpus.
OFFLINE_ALGORITHM = Algorithm.SMITH_WATERMAN
OFFLINE_THRESHOLD = 0.90
REALTIME_ALGORITHM = Algorithm.JARO_WINKLER
REALTIME_THRESHOLD = 0.92

#: bench() runs all pairs up to this corpus size, then samples.
ALL_PAIRS_LIMIT = 2500
SAMPLED_PAIRS = 1_000_000


@dataclass(frozen=True)
class AlignmentParams:
    match_score: float = 1.0
    mismatch_penalty: float = -1.0
    gap_penalty: float = -1.0

    def __post_init__(self) -> None:
        if self.match_score <= 0:
            raise ValueError("match_score must be > 0")
        if self.mismatch_penalty > 0:
            raise ValueError("mismatch_penalty must be <= 0")
        if self.gap_penalty > 0:
            raise ValueError("gap_penalty must be <= 0")


DEFAULT_PARAMS = AlignmentParams()


@dataclass(frozen=True)
class SimilarityReport:
    algorithm: Algorithm
    pairs_evaluated: int
    wall_time: timedelta
    groups_found: int

    def __post_init__(self) -> None:
        if self.pairs_evaluated < 0:
            raise ValueError("pairs_evaluated must be >= 0")
        if self.wall_time < timedelta(0):
            raise ValueError("wall_time must be >= 0")


def available_backends() -> list[str]:
    return ["c", "py"] if _ckernels is not None else ["py"]


def backend_module(name: str = "auto") -> ModuleType:
    """Resolve a backend by name: 'auto' (the import-time pick), 'c' or 'py'."""
    if name == "auto":
        return _active
    if name == "py":
        return _pykernels
    if name == "c":
        if _ckernels is None:
            raise ValueError("compiled kernels are not available in this install")
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def levenshtein(a: str, b: str) -> int:
    return _active.levenshtein(a, b)


def needleman_wunsch(a: str, b: str, params: AlignmentParams = DEFAULT_PARAMS) -> float:
    return _active.needleman_wunsch(
        a, b, params.match_score, params.mismatch_penalty, params.gap_penalty
    )


def jaro_winkler(a: str, b: str) -> float:
    return _active.jaro_winkler(a, b)


def smith_waterman(a: str, b: str, params: AlignmentParams = DEFAULT_PARAMS) -> float:
    return _active.smith_waterman(
        a, b, params.match_score, params.mismatch_penalty, params.gap_penalty
    )


def normalized_similarity(
    algorithm: Algorithm,
    a: str,
    b: str,
    params: AlignmentParams = DEFAULT_PARAMS,
    kernels: ModuleType | None = None,
) -> float:
    """Map any of the four measures onto a common [0, 1] similarity scale.

    Levenshtein: 1 - distance/max(|a|, |b|).  Alignment scores: score over
    the best achievable local score (match_score times the shorter length),
    clamped to [0, 1].  Jaro-Winkler passes through.  Two empty strings are
    identical (1.0) by convention under every algorithm.
    """
    k = kernels if kernels is not None else _active
    if a == b:
        return 1.0
    if algorithm is Algorithm.LEVENSHTEIN:
        longest = max(len(a), len(b))
        return 1.0 - k.levenshtein(a, b) / longest
    if algorithm is Algorithm.JARO_WINKLER:
        return k.jaro_winkler(a, b)
    shortest = min(len(a), len(b))
    if shortest == 0:
        return 0.0
    if algorithm is Algorithm.NEEDLEMAN_WUNSCH:
        score = k.needleman_wunsch(
            a, b, params.match_score, params.mismatch_penalty, params.gap_penalty
        )
    elif algorithm is Algorithm.SMITH_WATERMAN:
        score = k.smith_waterman(
            a, b, params.match_score, params.mismatch_penalty, params.gap_penalty
        )
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return min(1.0, max(0.0, score / (params.match_score * shortest)))


def group_similar(
    texts: Sequence[str],
    algorithm: Algorithm,
    threshold: float,
    params: AlignmentParams = DEFAULT_PARAMS,
) -> list[list[int]]:
    """Greedy single-pass grouping into lists of input indices.

    Each text joins the first existing group whose representative (the
    group's first member) reaches the threshold, else starts a new group.
    The result is a partition of range(len(texts)), deterministic in input
    order.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    groups: list[list[int]] = []
    for idx, text in enumerate(texts):
        for group in groups:
            rep = texts[group[0]]
            if normalized_similarity(algorithm, text, rep, params) >= threshold:
                group.append(idx)
                break
        else:
            groups.append([idx])
    return groups


def _sample_pairs(n: int, count: int, seed: int) -> list[tuple[int, int]]:
    # Uniform with replacement; cheap and unbiased for timing purposes.
    rng = random.Random(seed)
    pairs = []
    for _ in range(count):
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        pairs.append((i, j) if i < j else (j, i))
    return pairs


def _pair_fn(algorithm: Algorithm, kernels: ModuleType, params: AlignmentParams):
    match, mismatch, gap = params.match_score, params.mismatch_penalty, params.gap_penalty
    if algorithm is Algorithm.LEVENSHTEIN:
        lev = kernels.levenshtein

        def norm(a: str, b: str) -> float:
            if a == b:
                return 1.0
            return 1.0 - lev(a, b) / max(len(a), len(b))

        return norm
    if algorithm is Algorithm.JARO_WINKLER:
        jw = kernels.jaro_winkler

        def norm(a: str, b: str) -> float:
            if a == b:
                return 1.0
            return jw(a, b)

        return norm
    aligner = (
        kernels.needleman_wunsch
        if algorithm is Algorithm.NEEDLEMAN_WUNSCH
        else kernels.smith_waterman
    )

    def norm(a: str, b: str) -> float:
        if a == b:
            return 1.0
        shortest = min(len(a), len(b))
        if shortest == 0:
            return 0.0
        score = aligner(a, b, match, mismatch, gap)
        return min(1.0, max(0.0, score / (match * shortest)))

    return norm


def _group_count_from_matrix(matrix: list[list[float]], threshold: float) -> int:
    reps: list[int] = []
    for idx in range(len(matrix)):
        for rep in reps:
            row, col = (rep, idx) if rep < idx else (idx, rep)
            if matrix[row][col] >= threshold:
                break
        else:
            reps.append(idx)
    return len(reps)


def bench(
    texts: Sequence[str],
    params: AlignmentParams = DEFAULT_PARAMS,
    threshold: float = OFFLINE_THRESHOLD,
    seed: int = 0,
    max_pairs: int | None = None,
    backend: str = "auto",
) -> list[SimilarityReport]:
    """Time all four algorithms over the same pair set and count groups.

    All pairs are evaluated for corpora up to ALL_PAIRS_LIMIT texts, else a
    uniform sample (SAMPLED_PAIRS, or ``max_pairs`` when given).  The timed
    section covers normalized pair similarity only; grouping reuses the
    computed values in the all-pairs case and is never timed.
    """
    n = len(texts)
    if n < 2:
        raise ValueError("bench needs at least 2 texts")
    kernels = backend_module(backend)

    all_pairs = n * (n - 1) // 2
    if max_pairs is not None:
        sampled = all_pairs > max_pairs
        limit = max_pairs
    else:
        sampled = n > ALL_PAIRS_LIMIT
        limit = SAMPLED_PAIRS
    if sampled:
        pairs = _sample_pairs(n, limit, seed)
    else:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    reports = []
    for algorithm in Algorithm:
        pair_sim = _pair_fn(algorithm, kernels, params)
        matrix: list[list[float]] | None = None
        if not sampled:
            matrix = [[0.0] * n for _ in range(n)]
            start = time.perf_counter()
            for i, j in pairs:
                matrix[i][j] = pair_sim(texts[i], texts[j])
            elapsed = time.perf_counter() - start
            groups = _group_count_from_matrix(matrix, threshold)
        else:
            start = time.perf_counter()
            for i, j in pairs:
                pair_sim(texts[i], texts[j])
            elapsed = time.perf_counter() - start
            groups = len(group_similar(texts, algorithm, threshold, params))
        reports.append(
            SimilarityReport(
                algorithm=algorithm,
                pairs_evaluated=len(pairs),
                wall_time=timedelta(seconds=elapsed),
                groups_found=groups,
            )
        )
    return reports


def reports_to_csv(reports: Sequence[SimilarityReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["algorithm", "pairs", "wall_ms", "groups"])
    for report in reports:
        writer.writerow(
            [
                report.algorithm.value,
                report.pairs_evaluated,
                f"{report.wall_time.total_seconds() * 1000.0:.3f}",
                report.groups_found,
            ]
        )
    return buf.getvalue()
