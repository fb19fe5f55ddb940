import random
from datetime import timedelta
from functools import lru_cache

import pytest

from credistream import simtext
from credistream.simtext import (
    Algorithm,
    AlignmentParams,
    available_backends,
    backend_module,
    bench,
    group_similar,
    jaro_winkler,
    levenshtein,
    needleman_wunsch,
    normalized_similarity,
    reports_to_csv,
    smith_waterman,
)

P = AlignmentParams()


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def levenshtein_oracle(a: str, b: str) -> int:
    """The textbook recursive definition, memoized for tractability."""

    @lru_cache(maxsize=None)
    def dist(i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        cost = 0 if a[i - 1] == b[j - 1] else 1
        return min(dist(i - 1, j - 1) + cost, dist(i - 1, j) + 1, dist(i, j - 1) + 1)

    return dist(len(a), len(b))


def nw_oracle(a: str, b: str, p: AlignmentParams) -> float:
    """Full-matrix global alignment, written independently of the kernels."""
    rows, cols = len(a) + 1, len(b) + 1
    table = [[0.0] * cols for _ in range(rows)]
    for i in range(rows):
        table[i][0] = i * p.gap_penalty
    for j in range(cols):
        table[0][j] = j * p.gap_penalty
    for i in range(1, rows):
        for j in range(1, cols):
            s = p.match_score if a[i - 1] == b[j - 1] else p.mismatch_penalty
            table[i][j] = max(
                table[i - 1][j - 1] + s,
                table[i - 1][j] + p.gap_penalty,
                table[i][j - 1] + p.gap_penalty,
            )
    return table[-1][-1]


def sw_oracle(a: str, b: str, p: AlignmentParams) -> float:
    rows, cols = len(a) + 1, len(b) + 1
    table = [[0.0] * cols for _ in range(rows)]
    best = 0.0
    for i in range(1, rows):
        for j in range(1, cols):
            s = p.match_score if a[i - 1] == b[j - 1] else p.mismatch_penalty
            table[i][j] = max(
                0.0,
                table[i - 1][j - 1] + s,
                table[i - 1][j] + p.gap_penalty,
                table[i][j - 1] + p.gap_penalty,
            )
            best = max(best, table[i][j])
    return best


def random_string(rng, max_len, alphabet="abcαβ #!"):
    return "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, max_len + 1)))


ALL_KERNELS = [backend_module(name) for name in available_backends()]


class TestLevenshtein:
    def test_empty_cases(self):
        assert levenshtein("", "abc") == 3
        assert levenshtein("abc", "") == 3
        assert levenshtein("", "") == 0

    def test_known_value(self):
        assert levenshtein("kitten", "sitting") == 3

    def test_identity(self):
        assert levenshtein("same", "same") == 0

    @pytest.mark.parametrize("kernels", ALL_KERNELS, ids=available_backends())
    def test_matches_recursive_definition(self, kernels):
        rng = random.Random(100)
        for _ in range(1500):
            a, b = random_string(rng, 7), random_string(rng, 7)
            assert kernels.levenshtein(a, b) == levenshtein_oracle(a, b)

    def test_symmetry_and_triangle_inequality(self):
        rng = random.Random(101)
        for _ in range(400):
            a, b, c = (random_string(rng, 8, "abcd") for _ in range(3))
            assert levenshtein(a, b) == levenshtein(b, a)
            assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)

    def test_zero_iff_equal(self):
        rng = random.Random(102)
        for _ in range(200):
            a, b = random_string(rng, 6, "ab"), random_string(rng, 6, "ab")
            assert (levenshtein(a, b) == 0) == (a == b)


class TestNeedlemanWunsch:
    def test_all_gap_alignment(self):
        assert needleman_wunsch("", "abcd", P) == -4.0
        assert needleman_wunsch("ab", "", P) == -2.0

    def test_identity_alignment(self):
        assert needleman_wunsch("match", "match", P) == 5.0

    def test_published_didactic_pair(self):
        assert needleman_wunsch("GATTACA", "GCATGCU", P) == 0.0

    @pytest.mark.parametrize("kernels", ALL_KERNELS, ids=available_backends())
    def test_matches_full_matrix_oracle(self, kernels):
        rng = random.Random(103)
        for _ in range(600):
            a, b = random_string(rng, 12), random_string(rng, 12)
            p = AlignmentParams(
                match_score=rng.choice([1.0, 2.0]),
                mismatch_penalty=rng.choice([0.0, -1.0, -2.5]),
                gap_penalty=rng.choice([0.0, -1.0, -0.5]),
            )
            got = kernels.needleman_wunsch(a, b, p.match_score, p.mismatch_penalty, p.gap_penalty)
            assert got == pytest.approx(nw_oracle(a, b, p), abs=1e-9)


class TestSmithWaterman:
    def test_empty_local_alignment(self):
        assert smith_waterman("", "anything", P) == 0.0
        assert smith_waterman("anything", "", P) == 0.0

    def test_substring_aligns_fully(self):
        assert smith_waterman("hello", "say hello there", P) == 5.0

    def test_retweet_fixture(self):
        assert smith_waterman("RT @u: hello world", "hello world", P) == 11.0

    def test_never_negative(self):
        assert smith_waterman("abc", "xyz", P) == 0.0

    @pytest.mark.parametrize("kernels", ALL_KERNELS, ids=available_backends())
    def test_matches_full_matrix_oracle(self, kernels):
        rng = random.Random(104)
        for _ in range(600):
            a, b = random_string(rng, 12), random_string(rng, 12)
            p = AlignmentParams(
                match_score=rng.choice([1.0, 3.0]),
                mismatch_penalty=rng.choice([0.0, -1.0, -2.0]),
                gap_penalty=rng.choice([0.0, -1.0, -1.5]),
            )
            got = kernels.smith_waterman(a, b, p.match_score, p.mismatch_penalty, p.gap_penalty)
            assert got == pytest.approx(sw_oracle(a, b, p), abs=1e-9)

    def test_dominates_positive_global_score(self):
        rng = random.Random(105)
        for _ in range(300):
            a, b = random_string(rng, 10, "abc"), random_string(rng, 10, "abc")
            global_score = needleman_wunsch(a, b, P)
            local_score = smith_waterman(a, b, P)
            assert local_score >= 0.0
            if global_score > 0:
                assert local_score >= global_score


class TestJaroWinkler:
    def test_identity(self):
        assert jaro_winkler("abc", "abc") == 1.0

    def test_no_common_characters(self):
        assert jaro_winkler("abc", "xyz") == 0.0

    def test_published_value(self):
        assert jaro_winkler("MARTHA", "MARHTA") == pytest.approx(0.9611, abs=1e-4)

    def test_more_published_values(self):
        assert jaro_winkler("DIXON", "DICKSONX") == pytest.approx(0.8133, abs=1e-3)
        assert jaro_winkler("DWAYNE", "DUANE") == pytest.approx(0.84, abs=1e-2)

    def test_symmetry(self):
        rng = random.Random(106)
        for _ in range(400):
            a, b = random_string(rng, 10), random_string(rng, 10)
            assert jaro_winkler(a, b) == pytest.approx(jaro_winkler(b, a), abs=1e-12)

    def test_one_iff_equal_nonempty(self):
        rng = random.Random(107)
        for _ in range(300):
            a, b = random_string(rng, 8, "abc"), random_string(rng, 8, "abc")
            if not a or not b:
                continue
            if a == b:
                assert jaro_winkler(a, b) == 1.0
            else:
                assert jaro_winkler(a, b) < 1.0

    def test_range(self):
        rng = random.Random(108)
        for _ in range(400):
            value = jaro_winkler(random_string(rng, 12), random_string(rng, 12))
            assert 0.0 <= value <= 1.0

    @pytest.mark.skipif(len(ALL_KERNELS) < 2, reason="compiled backend not built")
    def test_backend_parity(self):
        c, py = backend_module("c"), backend_module("py")
        rng = random.Random(109)
        for _ in range(2000):
            a, b = random_string(rng, 14), random_string(rng, 14)
            assert c.jaro_winkler(a, b) == pytest.approx(py.jaro_winkler(a, b), abs=1e-12)


class TestAlignmentParams:
    def test_defaults(self):
        assert (P.match_score, P.mismatch_penalty, P.gap_penalty) == (1.0, -1.0, -1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            AlignmentParams(match_score=0.0)
        with pytest.raises(ValueError):
            AlignmentParams(mismatch_penalty=0.5)
        with pytest.raises(ValueError):
            AlignmentParams(gap_penalty=0.1)


class TestNormalizedSimilarity:
    @pytest.mark.parametrize("algorithm", list(Algorithm))
    def test_identity_is_one(self, algorithm):
        assert normalized_similarity(algorithm, "same text", "same text") == 1.0

    @pytest.mark.parametrize("algorithm", list(Algorithm))
    def test_both_empty_is_one_by_convention(self, algorithm):
        assert normalized_similarity(algorithm, "", "") == 1.0

    def test_levenshtein_normalization(self):
        # distance 3 over max length 7
        assert normalized_similarity(Algorithm.LEVENSHTEIN, "kitten", "sitting") == pytest.approx(
            1 - 3 / 7
        )

    def test_one_empty_string(self):
        assert normalized_similarity(Algorithm.LEVENSHTEIN, "", "abc") == 0.0
        assert normalized_similarity(Algorithm.SMITH_WATERMAN, "", "abc") == 0.0

    def test_smith_waterman_retweet_is_one(self):
        value = normalized_similarity(Algorithm.SMITH_WATERMAN, "RT @u: hello world", "hello world")
        assert value == 1.0

    def test_values_clamped_to_unit_interval(self):
        rng = random.Random(110)
        for _ in range(300):
            a, b = random_string(rng, 10), random_string(rng, 10)
            for algorithm in Algorithm:
                assert 0.0 <= normalized_similarity(algorithm, a, b) <= 1.0


class TestGroupSimilar:
    def test_identical_texts_form_one_group(self):
        groups = group_similar(["same"] * 5, Algorithm.JARO_WINKLER, 0.9)
        assert groups == [[0, 1, 2, 3, 4]]

    def test_unrelated_texts_stay_singletons(self):
        texts = ["aaaaaaaa", "bbbbbbbb", "cccccccc", "dddddddd", "eeeeeeee"]
        groups = group_similar(texts, Algorithm.LEVENSHTEIN, 0.99)
        assert groups == [[0], [1], [2], [3], [4]]

    def test_retweet_groups_with_original(self):
        texts = ["breaking news about the summit", "RT @u: breaking news about the summit", "zzz qqq"]
        groups = group_similar(texts, Algorithm.SMITH_WATERMAN, 0.9)
        assert groups == [[0, 1], [2]]

    def test_partition_property(self):
        rng = random.Random(111)
        texts = [random_string(rng, 12, "abcd ") for _ in range(40)]
        for algorithm in Algorithm:
            groups = group_similar(texts, algorithm, 0.8)
            flat = sorted(i for g in groups for i in g)
            assert flat == list(range(len(texts)))
            assert all(g for g in groups)

    def test_threshold_validated(self):
        with pytest.raises(ValueError):
            group_similar(["a"], Algorithm.JARO_WINKLER, 1.5)


class TestBench:
    def test_two_texts_is_one_pair(self):
        reports = bench(["abcdef", "abcxyz"], threshold=0.5)
        assert len(reports) == 4
        assert all(r.pairs_evaluated == 1 for r in reports)

    def test_rejects_tiny_corpus(self):
        with pytest.raises(ValueError):
            bench(["only one"])

    def test_deterministic_report_structure(self):
        texts = ["aaa", "aab", "zzz", "zzy", "mno"]
        first = bench(texts, threshold=0.6, seed=3)
        second = bench(texts, threshold=0.6, seed=3)
        assert [r.algorithm for r in first] == list(Algorithm)
        assert [(r.pairs_evaluated, r.groups_found) for r in first] == [
            (r.pairs_evaluated, r.groups_found) for r in second
        ]

    def test_sampled_mode_via_max_pairs(self):
        texts = ["abcd", "bcde", "cdef", "defg", "efgh"]
        reports = bench(texts, max_pairs=4, seed=1)
        assert all(r.pairs_evaluated == 4 for r in reports)

    def test_group_counts_match_group_similar(self):
        texts = ["same text here"] * 3 + ["totally different words", "another unrelated thing"]
        reports = bench(texts, threshold=0.9)
        for report in reports:
            expected = len(group_similar(texts, report.algorithm, 0.9))
            assert report.groups_found == expected

    def test_csv_format(self):
        reports = [
            simtext.SimilarityReport(Algorithm.LEVENSHTEIN, 10, timedelta(seconds=0.5), 3)
        ]
        text = reports_to_csv(reports)
        assert text.splitlines()[0] == "algorithm,pairs,wall_ms,groups"
        assert text.splitlines()[1] == "levenshtein,10,500.000,3"

    def test_report_validation(self):
        with pytest.raises(ValueError):
            simtext.SimilarityReport(Algorithm.LEVENSHTEIN, -1, timedelta(0), 0)
        with pytest.raises(ValueError):
            simtext.SimilarityReport(Algorithm.LEVENSHTEIN, 0, timedelta(seconds=-1), 0)


class TestBackends:
    def test_backend_module_names(self):
        assert backend_module("py").__name__.endswith("_pykernels")
        assert backend_module("auto") is not None
        with pytest.raises(ValueError):
            backend_module("rust")

    def test_active_backend_recorded(self):
        assert simtext.BACKEND in ("c", "py")
