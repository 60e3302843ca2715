"""Deterministic and probabilistic competence scores, plus comparison stats.

The deterministic score applies only to 3x3 rubrics: a level at (r, c)
scores (r-1)+(c-1), giving the 0..4 grid

            col 1  col 2  col 3
    row 1     0      1      2
    row 2     1      2      3
    row 3     2      3      4

The probabilistic score is the sum of per-skill posteriors: the expected
number of competence levels mastered, in [0, R*C].
"""

from __future__ import annotations

import statistics

from .compiler import PupilRecord
from .errors import UndefinedCorrelationError, ValidationError
from .inference import PosteriorReport
from .rubric import LevelCoord


def cat_score(achieved: LevelCoord) -> int:
    """Deterministic 0..4 score of an achieved level on a 3x3 rubric."""
    if not (1 <= achieved.r <= 3 and 1 <= achieved.c <= 3):
        raise ValidationError(
            f"deterministic score is defined on 3x3 rubrics only, "
            f"got ({achieved.r},{achieved.c})"
        )
    return (achieved.r - 1) + (achieved.c - 1)


def avg_cat_score(record: PupilRecord) -> float:
    """Mean deterministic score over the record's achieved-level tasks.

    Tasks recorded only as explicit observations have no single achieved
    cell and are skipped; a record with no scorable task is an error.
    """
    coords = record.achieved_coords()
    if not coords:
        raise ValidationError(
            f"pupil {record.pupil_id!r} has no task with an achieved level"
        )
    return sum(cat_score(c) for c in coords) / len(coords)


def probabilistic_score(report: PosteriorReport) -> float:
    """Sum of skill posteriors: expected number of levels mastered."""
    return sum(report.posteriors.values())


def pearson(xs: list[float], ys: list[float]) -> float:
    """Sample Pearson correlation; undefined for constant vectors."""
    if len(xs) != len(ys):
        raise ValidationError("correlation inputs must have equal length")
    if len(xs) < 2:
        raise ValidationError("correlation needs at least two points")
    if min(xs) == max(xs) or min(ys) == max(ys):
        raise UndefinedCorrelationError(
            "correlation undefined: at least one vector is constant"
        )
    try:
        return statistics.correlation(xs, ys)
    except statistics.StatisticsError as exc:
        # numerically constant input that the exact min/max guard missed
        raise UndefinedCorrelationError(str(exc)) from exc
