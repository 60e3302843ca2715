"""Deterministic 0..4 scores, probabilistic scores, correlation."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rubric_bn import (
    AchievedLevel,
    LevelCoord,
    OrderRelation,
    PupilRecord,
    UndefinedCorrelationError,
    ValidationError,
    avg_cat_score,
    cat_score,
    compare,
    pearson,
    probabilistic_score,
)
from rubric_bn.inference import PosteriorReport

from conftest import make_rubric

L = LevelCoord

SCORE_TABLE = [
    [0, 1, 2],
    [1, 2, 3],
    [2, 3, 4],
]


def report_from(posteriors: dict) -> PosteriorReport:
    return PosteriorReport(posteriors=posteriors, evidence_digest="x", log_likelihood=0.0)


class TestCatScore:
    def test_matches_score_table_on_all_nine_cells(self):
        for r in range(1, 4):
            for c in range(1, 4):
                assert cat_score(L(r, c)) == SCORE_TABLE[r - 1][c - 1]
                assert cat_score(L(r, c)) == (r - 1) + (c - 1)

    def test_corner_values(self):
        assert cat_score(L(1, 1)) == 0
        assert cat_score(L(3, 3)) == 4
        assert cat_score(L(2, 2)) == 2

    def test_only_defined_on_three_by_three(self):
        with pytest.raises(ValidationError):
            cat_score(L(4, 1))
        with pytest.raises(ValidationError):
            cat_score(L(0, 2))

    def test_monotone_along_the_level_order(self):
        rubric = make_rubric(3, 3, rows_ordered=True)
        for a in rubric.coords():
            for b in rubric.coords():
                if compare(rubric, a, b) is OrderRelation.HIGHER:
                    assert cat_score(a) >= cat_score(b)


class TestAvgCatScore:
    def test_constant_maximum(self):
        record = PupilRecord(
            "p", {f"s{k:02d}": AchievedLevel(L(3, 3)) for k in range(1, 13)}
        )
        assert avg_cat_score(record) == 4.0

    def test_extremes_average_to_two(self):
        record = PupilRecord(
            "p", {"s01": AchievedLevel(L(1, 1)), "s02": AchievedLevel(L(3, 3))}
        )
        assert avg_cat_score(record) == 2.0

    def test_three_task_mean(self):
        record = PupilRecord(
            "p",
            {
                "s01": AchievedLevel(L(2, 2)),
                "s02": AchievedLevel(L(2, 3)),
                "s03": AchievedLevel(L(1, 2)),
            },
        )
        assert avg_cat_score(record) == pytest.approx(2.0)

    def test_record_without_achieved_levels_rejected(self):
        with pytest.raises(ValidationError):
            avg_cat_score(PupilRecord("p", {}))


class TestProbabilisticScore:
    def test_uniform_half(self):
        report = report_from({f"X_{i}": 0.5 for i in range(9)})
        assert probabilistic_score(report) == pytest.approx(4.5)

    def test_representative_row_sums(self):
        row = [0.54, 0.31, 0.00, 0.64, 0.00, 0.00, 0.07, 0.00, 0.00]
        report = report_from({f"X_{i}": p for i, p in enumerate(row)})
        assert probabilistic_score(report) == pytest.approx(1.56, abs=1e-12)

    def test_full_mastery(self):
        report = report_from({f"X_{i}": 1.0 for i in range(9)})
        assert probabilistic_score(report) == pytest.approx(9.0)

    def test_monotone_in_each_coordinate(self):
        base = {f"X_{i}": 0.3 for i in range(4)}
        low = probabilistic_score(report_from(base))
        for key in base:
            bumped = dict(base, **{key: 0.8})
            assert probabilistic_score(report_from(bumped)) > low


class TestPearson:
    def test_perfect_positive_affine(self):
        xs = [1.0, 2.0, 3.0, 4.0]
        assert pearson(xs, [2 * x + 1 for x in xs]) == pytest.approx(1.0)

    def test_perfect_negative(self):
        xs = [1.0, 2.0, 3.0]
        assert pearson(xs, [-x for x in xs]) == pytest.approx(-1.0)

    def test_half_correlation(self):
        assert pearson([1.0, 2.0, 3.0], [1.0, 3.0, 2.0]) == pytest.approx(0.5)

    def test_constant_vector_undefined(self):
        with pytest.raises(UndefinedCorrelationError):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(UndefinedCorrelationError):
            pearson([1.0, 2.0, 3.0], [7.0, 7.0, 7.0])

    def test_length_mismatch_and_short_input_rejected(self):
        with pytest.raises(ValidationError):
            pearson([1.0, 2.0], [1.0])
        with pytest.raises(ValidationError):
            pearson([1.0], [1.0])

    @given(
        xs=st.lists(
            st.floats(-50, 50).map(lambda v: round(v, 2)), min_size=3, max_size=12
        ),
        scale=st.floats(0.1, 10),
        shift=st.floats(-5, 5),
    )
    def test_invariant_under_positive_affine_transform(self, xs, scale, shift):
        ys = [x * x - 3 * x for x in xs]  # arbitrary non-affine companion
        if min(xs) == max(xs) or min(ys) == max(ys):
            return
        base = pearson(xs, ys)
        assert pearson([scale * x + shift for x in xs], ys) == pytest.approx(
            base, abs=1e-9
        )
