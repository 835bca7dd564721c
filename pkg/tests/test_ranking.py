"""Ranking, footrule distance, rank correlation, and score loading."""

from __future__ import annotations

import random

import numpy as np
import pytest
import scipy.stats

from motcom.errors import ParseError, ValidationError
from motcom.ranking import (
    ASCENDING_IS_SIMPLE,
    DESCENDING_IS_SIMPLE,
    ScoredSequences,
    compare_rankings,
    footrule_distance,
    footrule_max,
    load_tracker_scores,
    normalized_fd,
    rank,
    spearman_rho,
)

from oracles import brute_force_footrule_max, rank_then_pearson_spearman


def scored(values, direction=ASCENDING_IS_SIMPLE, names=None):
    names = names or [f"seq-{i}" for i in range(len(values))]
    return ScoredSequences(tuple(zip(names, map(float, values))), direction)


class TestRank:
    def test_ascending_metric(self):
        ranks = rank(scored([0.1, 0.5, 0.3], names=["a", "b", "c"]))
        assert ranks == {"a": 1, "b": 3, "c": 2}

    def test_descending_performance(self):
        ranks = rank(scored([70, 50, 60], DESCENDING_IS_SIMPLE, names=["a", "b", "c"]))
        assert ranks == {"a": 1, "b": 3, "c": 2}

    def test_tie_break_is_lexicographic(self):
        ranks = rank(scored([0.4, 0.4], names=["B", "A"]))
        assert ranks == {"A": 1, "B": 2}

    def test_monotone_transform_invariance(self):
        rng = random.Random(2)
        values = [rng.uniform(0, 10) for _ in range(8)]
        base = rank(scored(values))
        cubed = rank(scored([v**3 for v in values]))
        shifted = rank(scored([5 * v + 2 for v in values]))
        assert base == cubed == shifted

    def test_too_few_entries(self):
        with pytest.raises(ValidationError, match="at least 2"):
            rank(scored([1.0]))

    def test_duplicate_names_rejected(self):
        with pytest.raises(ValidationError, match="duplicate"):
            ScoredSequences((("a", 1.0), ("a", 2.0)))


class TestFootrule:
    def test_identical_rankings(self):
        ranks = {"a": 1, "b": 2, "c": 3}
        assert footrule_distance(ranks, dict(ranks)) == 0

    def test_simple_swap(self):
        assert footrule_distance({"a": 1, "b": 2, "c": 3}, {"a": 2, "b": 1, "c": 3}) == 2

    def test_full_reversal_n7_hits_maximum(self):
        names = [f"s{i}" for i in range(7)]
        forward = {n: i + 1 for i, n in enumerate(names)}
        backward = {n: 7 - i for i, n in enumerate(names)}
        assert footrule_distance(forward, backward) == 24
        assert footrule_max(7) == 24 == brute_force_footrule_max(7)

    def test_mismatched_names(self):
        with pytest.raises(ValidationError, match="different"):
            footrule_distance({"a": 1, "b": 2}, {"a": 1, "c": 2})

    def test_max_formula_branches(self):
        assert footrule_max(4) == 8
        assert footrule_max(7) == 24

    def test_max_matches_brute_force(self):
        for n in range(2, 7):
            assert footrule_max(n) == brute_force_footrule_max(n)

    def test_max_requires_two(self):
        with pytest.raises(ValidationError):
            footrule_max(1)

    def test_distance_never_exceeds_max(self):
        rng = random.Random(5)
        names = [f"s{i}" for i in range(8)]
        for _ in range(50):
            a = rng.sample(range(1, 9), 8)
            b = rng.sample(range(1, 9), 8)
            fd = footrule_distance(dict(zip(names, a)), dict(zip(names, b)))
            assert 0 <= fd <= footrule_max(8)

    def test_metric_axioms_on_random_triples(self):
        rng = random.Random(6)
        names = [f"s{i}" for i in range(6)]
        for _ in range(100):
            a = dict(zip(names, rng.sample(range(1, 7), 6)))
            b = dict(zip(names, rng.sample(range(1, 7), 6)))
            c = dict(zip(names, rng.sample(range(1, 7), 6)))
            assert footrule_distance(a, b) == footrule_distance(b, a)
            assert (footrule_distance(a, b) == 0) == (a == b)
            assert footrule_distance(a, c) <= footrule_distance(a, b) + footrule_distance(b, c)


class TestNormalizedFd:
    def test_bounds(self):
        assert normalized_fd(0, 24) == 0.0
        assert normalized_fd(24, 24) == 1.0

    def test_seven_sequence_consistency(self):
        # with 7 sequences, a total distance of 6 is a mean of ~0.86 and a
        # normalized distance of 6/24 = 0.25
        assert 6 / 7 == pytest.approx(0.857, abs=1e-3)
        assert normalized_fd(6, footrule_max(7)) == 0.25

    def test_zero_max_rejected(self):
        with pytest.raises(ValidationError):
            normalized_fd(0, 0)


class TestCompareRankings:
    def test_perfectly_aligned(self):
        metric = scored([0.1, 0.2, 0.3, 0.4], names=list("abcd"))
        reference = scored([90, 80, 70, 60], DESCENDING_IS_SIMPLE, names=list("abcd"))
        comparison = compare_rankings(metric, reference)
        assert comparison.fd == 0
        assert comparison.nfd == 0.0
        assert comparison.n == 4

    def test_restricts_to_shared_names(self):
        metric = scored([0.1, 0.2, 0.3], names=["a", "b", "zzz"])
        reference = scored([90, 80, 70], DESCENDING_IS_SIMPLE, names=["a", "b", "yyy"])
        comparison = compare_rankings(metric, reference)
        assert comparison.n == 2


class TestSpearman:
    def test_perfect_correlation(self):
        xs = [1.0, 2.0, 5.0, 9.0]
        assert spearman_rho(xs, [x**2 for x in xs]) == pytest.approx(1.0, abs=1e-12)

    def test_perfect_anticorrelation(self):
        xs = [1.0, 2.0, 5.0, 9.0]
        assert spearman_rho(xs, [-x for x in xs]) == pytest.approx(-1.0, abs=1e-12)

    def test_fixture_matches_independent_oracles(self):
        rng = np.random.RandomState(31)
        xs = rng.randn(10).tolist()
        ys = (rng.randn(10) + np.asarray(xs)).tolist()
        got = spearman_rho(xs, ys)
        assert got == pytest.approx(rank_then_pearson_spearman(xs, ys), abs=1e-12)
        assert got == pytest.approx(scipy.stats.spearmanr(xs, ys).statistic, abs=1e-12)

    def test_ties_use_average_ranks(self):
        xs = [1.0, 1.0, 2.0, 3.0]
        ys = [4.0, 5.0, 6.0, 7.0]
        assert spearman_rho(xs, ys) == pytest.approx(
            scipy.stats.spearmanr(xs, ys).statistic, abs=1e-12
        )

    def test_errors(self):
        with pytest.raises(ValidationError, match="3"):
            spearman_rho([1.0, 2.0], [1.0, 2.0])
        with pytest.raises(ValidationError, match="constant"):
            spearman_rho([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(ValidationError, match="mismatch"):
            spearman_rho([1.0, 2.0, 3.0], [1.0, 2.0])


class TestLoadTrackerScores:
    def test_wide_form(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("sequence,hota,mota\nA,60.5,55\nB,40.0,40\n")
        loaded = load_tracker_scores(path, "hota")
        assert loaded.direction == DESCENDING_IS_SIMPLE
        assert dict(loaded.entries) == {"A": 60.5, "B": 40.0}

    def test_long_form_averages_per_sequence(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text(
            "tracker,sequence,hota\nt1,A,40\nt2,A,60\nt1,B,30\nt2,B,50\n"
        )
        loaded = load_tracker_scores(path, "hota")
        assert dict(loaded.entries) == {"A": 50.0, "B": 40.0}

    def test_thirty_tracker_fixture_matches_manual_mean(self, tmp_path):
        rng = np.random.RandomState(77)
        rows = ["tracker,sequence,hota"]
        manual: dict[str, list[float]] = {}
        for t in range(30):
            for seq_name in ("A", "B", "C"):
                value = float(np.round(rng.uniform(20, 80), 3))
                rows.append(f"tr{t:02d},{seq_name},{value}")
                manual.setdefault(seq_name, []).append(value)
        path = tmp_path / "scores.csv"
        path.write_text("\n".join(rows) + "\n")
        loaded = dict(load_tracker_scores(path, "hota").entries)
        for seq_name, values in manual.items():
            assert loaded[seq_name] == pytest.approx(sum(values) / len(values), abs=1e-12)

    def test_case_insensitive_column(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("Sequence,HOTA\nA,50\nB,60\n")
        assert dict(load_tracker_scores(path, "hota").entries) == {"A": 50.0, "B": 60.0}

    def test_unknown_column(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("sequence,hota\nA,50\n")
        with pytest.raises(ValidationError, match="unknown column"):
            load_tracker_scores(path, "idf1")

    def test_duplicate_tracker_sequence_pair(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("tracker,sequence,hota\nt1,A,40\nt1,A,41\n")
        with pytest.raises(ValidationError, match="duplicate"):
            load_tracker_scores(path, "hota")

    def test_duplicate_wide_row(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("sequence,hota\nA,40\nA,41\n")
        with pytest.raises(ValidationError, match="duplicate"):
            load_tracker_scores(path, "hota")

    def test_missing_sequence_column(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("name,hota\nA,40\n")
        with pytest.raises(ParseError, match="sequence"):
            load_tracker_scores(path, "hota")
