"""Rubric grids, competence-level coordinates and the order between levels.

A rubric is an R x C grid: rows are components of the assessed competence,
columns are mastery levels in increasing order. Each cell describes the
behaviour expected from someone at that level; the engine treats the text
as opaque. Columns always order the levels within a row. When the rows
themselves form a hierarchy (``rows_ordered=True``) the grid is ordered by
the product order over (row, column); otherwise only cells in the same row
are comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .errors import ValidationError


class OrderRelation(Enum):
    """How one competence level relates to another."""

    LOWER = "lower"
    EQUAL = "equal"
    HIGHER = "higher"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True, order=True)
class LevelCoord:
    """1-based (row, column) position of a competence level in the grid."""

    r: int
    c: int


@dataclass(frozen=True)
class AxisEntry:
    """Identifier plus human-facing label for one rubric row or column."""

    id: str
    label: str = ""


@dataclass(frozen=True)
class Rubric:
    """Immutable rubric grid.

    ``cells[r-1][c-1]`` is the behaviour description for level ``(r, c)``.
    """

    name: str
    rows: tuple[AxisEntry, ...]
    columns: tuple[AxisEntry, ...]
    cells: tuple[tuple[str, ...], ...]
    rows_ordered: bool = False

    def __post_init__(self):
        if len(self.rows) < 1 or len(self.columns) < 1:
            raise ValidationError("rubric needs at least one row and one column")
        ids = [e.id for e in self.rows]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate row ids in rubric")
        ids = [e.id for e in self.columns]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate column ids in rubric")
        if len(self.cells) != len(self.rows) or any(
            len(row) != len(self.columns) for row in self.cells
        ):
            raise ValidationError(
                f"cells matrix must be {len(self.rows)}x{len(self.columns)}"
            )

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    def coords(self) -> Iterator[LevelCoord]:
        """All grid coordinates in row-major order."""
        for r in range(1, self.n_rows + 1):
            for c in range(1, self.n_cols + 1):
                yield LevelCoord(r, c)

    def require_coord(self, coord: LevelCoord) -> None:
        """Raise ValidationError when ``coord`` falls outside the grid."""
        if not (1 <= coord.r <= self.n_rows and 1 <= coord.c <= self.n_cols):
            raise ValidationError(
                f"coordinate ({coord.r},{coord.c}) outside "
                f"{self.n_rows}x{self.n_cols} rubric {self.name!r}"
            )

    def cell_text(self, coord: LevelCoord) -> str:
        self.require_coord(coord)
        return self.cells[coord.r - 1][coord.c - 1]


def relate(a: LevelCoord, b: LevelCoord, rows_ordered: bool) -> OrderRelation:
    """Order relation of ``a`` with respect to ``b`` on a bare grid.

    With ordered rows this is the strict product order on (row, column):
    ``a`` is higher than ``b`` iff a.r >= b.r, a.c >= b.c and a != b.
    Without ordered rows only same-row cells compare, by column.
    """
    if a == b:
        return OrderRelation.EQUAL
    if rows_ordered:
        if a.r >= b.r and a.c >= b.c:
            return OrderRelation.HIGHER
        if a.r <= b.r and a.c <= b.c:
            return OrderRelation.LOWER
    else:
        if a.r == b.r:
            return OrderRelation.HIGHER if a.c > b.c else OrderRelation.LOWER
    return OrderRelation.INCOMPARABLE


def compare(rubric: Rubric, a: LevelCoord, b: LevelCoord) -> OrderRelation:
    """Order relation of level ``a`` with respect to level ``b``."""
    rubric.require_coord(a)
    rubric.require_coord(b)
    return relate(a, b, rubric.rows_ordered)


def dominated_set(rubric: Rubric, a: LevelCoord) -> set[LevelCoord]:
    """All levels lower than or equal to ``a`` (inclusive of ``a``)."""
    rubric.require_coord(a)
    return {
        b
        for b in rubric.coords()
        if compare(rubric, b, a) in (OrderRelation.LOWER, OrderRelation.EQUAL)
    }


def dominating_set(rubric: Rubric, a: LevelCoord) -> set[LevelCoord]:
    """All levels higher than or equal to ``a`` (inclusive of ``a``)."""
    rubric.require_coord(a)
    return {
        b
        for b in rubric.coords()
        if compare(rubric, b, a) in (OrderRelation.HIGHER, OrderRelation.EQUAL)
    }
