"""Translate a rubric plus elicited parameters into a leaky noisy-OR network.

The compiled network is bipartite: one latent skill node per rubric cell,
one observable answer node per (task, cell) pair. An answer node's parents
are the skills at the same cell or at any higher competence level, each arc
carrying an inhibition probability. Skills irrelevant to an answer are
simply absent from its parent list; an inhibition of exactly 1 is the
semantically identical dense representation and can be materialised on
request for cross-checks.

The encoder turns raw per-task records into evidence on answer nodes: an
achieved level marks every level at or below it as shown and every strictly
higher level as not shown, leaving incomparable levels unobserved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Union

from .errors import EncodingError, ValidationError
from .rubric import LevelCoord, OrderRelation, Rubric, compare, dominating_set


def skill_id(coord: LevelCoord) -> str:
    """Stable identifier for the skill at ``coord``.

    Single-digit coordinates use the compact ``X_rc`` form; larger grids
    fall back to an unambiguous underscore form.
    """
    if coord.r <= 9 and coord.c <= 9:
        return f"X_{coord.r}{coord.c}"
    return f"X_{coord.r}_{coord.c}"


def answer_id(task: str, coord: LevelCoord) -> str:
    """Stable identifier for the answer node of ``task`` at ``coord``."""
    if coord.r <= 9 and coord.c <= 9:
        return f"Y_{task}_{coord.r}{coord.c}"
    return f"Y_{task}_{coord.r}_{coord.c}"


@dataclass(frozen=True)
class SkillNode:
    """Latent binary competence variable with its prior probability."""

    id: str
    coord: LevelCoord
    prior: float

    def __post_init__(self):
        if not 0.0 < self.prior < 1.0:
            raise ValidationError(f"skill {self.id}: prior must be in (0,1), got {self.prior}")


@dataclass(frozen=True)
class AnswerNode:
    """Observable binary behaviour variable for one task at one level.

    ``parent_edges`` pairs each relevant skill id with its inhibition
    probability: the chance that a mastered skill still fails to produce
    the behaviour. 1 means the arc carries no information, 0 means the
    skill guarantees the behaviour. ``leak_guess`` is the probability of
    showing the behaviour with none of the parent skills mastered.
    """

    id: str
    task: str
    coord: LevelCoord
    parent_edges: tuple[tuple[str, float], ...]
    leak_guess: float = 0.0

    def __post_init__(self):
        seen = set()
        for skill, lam in self.parent_edges:
            if skill in seen:
                raise ValidationError(f"answer {self.id}: duplicate parent {skill}")
            seen.add(skill)
            if not 0.0 <= lam <= 1.0:
                raise ValidationError(
                    f"answer {self.id}: inhibition for {skill} must be in [0,1], got {lam}"
                )
        if not 0.0 <= self.leak_guess < 1.0:
            raise ValidationError(
                f"answer {self.id}: leak guess must be in [0,1), got {self.leak_guess}"
            )


@dataclass(frozen=True)
class GridMeta:
    """Shape and ordering regime of the rubric a network was compiled from."""

    n_rows: int
    n_cols: int
    rows_ordered: bool


@dataclass(frozen=True)
class NoisyOrNetwork:
    """Bipartite noisy-OR network: parentless skills, childless answers."""

    skills: tuple[SkillNode, ...]
    answers: tuple[AnswerNode, ...]
    provenance: str = ""
    grid: GridMeta | None = None

    def __post_init__(self):
        skill_ids = [s.id for s in self.skills]
        if len(set(skill_ids)) != len(skill_ids):
            raise ValidationError("duplicate skill ids in network")
        answer_ids = [a.id for a in self.answers]
        if len(set(answer_ids)) != len(answer_ids):
            raise ValidationError("duplicate answer ids in network")
        known = set(skill_ids)
        for a in self.answers:
            for skill, _ in a.parent_edges:
                if skill not in known:
                    raise ValidationError(
                        f"answer {a.id} references unknown skill {skill}"
                    )

    @cached_property
    def skills_by_id(self) -> Mapping[str, SkillNode]:
        return {s.id: s for s in self.skills}

    @cached_property
    def answers_by_id(self) -> Mapping[str, AnswerNode]:
        return {a.id: a for a in self.answers}

    @cached_property
    def tasks(self) -> tuple[str, ...]:
        """Distinct task ids, sorted."""
        return tuple(sorted({a.task for a in self.answers}))

    def answers_for_task(self, task: str) -> tuple[AnswerNode, ...]:
        return tuple(a for a in self.answers if a.task == task)

    @property
    def arc_count(self) -> int:
        return sum(len(a.parent_edges) for a in self.answers)


@dataclass(frozen=True)
class LambdaOverride:
    """Per-arc inhibition override: (task, answer cell, parent skill cell)."""

    task: str
    answer: LevelCoord
    skill: LevelCoord
    value: float


@dataclass(frozen=True)
class ParameterSpec:
    """Elicited parameter set used to quantify a compiled network.

    ``palette`` optionally restricts override values to a declared list of
    admissible inhibition levels. ``name`` is a display label only and does
    not participate in equality.
    """

    default_prior: float
    default_lambda: float
    leak_guess: float
    palette: tuple[float, ...] | None = None
    overrides: tuple[LambdaOverride, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not 0.0 < self.default_prior < 1.0:
            raise ValidationError(f"default_prior must be in (0,1), got {self.default_prior}")
        if not 0.0 < self.default_lambda <= 1.0:
            raise ValidationError(f"default_lambda must be in (0,1], got {self.default_lambda}")
        if not 0.0 <= self.leak_guess < 1.0:
            raise ValidationError(f"leak_guess must be in [0,1), got {self.leak_guess}")
        if self.palette is not None:
            for v in self.palette:
                if not 0.0 < v <= 1.0:
                    raise ValidationError(f"palette value must be in (0,1], got {v}")
        for ov in self.overrides:
            if not 0.0 < ov.value <= 1.0:
                raise ValidationError(
                    f"override for task {ov.task!r} must be in (0,1], got {ov.value}"
                )
            if self.palette is not None and not any(
                abs(ov.value - v) < 1e-9 for v in self.palette
            ):
                raise ValidationError(
                    f"override value {ov.value} for task {ov.task!r} not in declared palette"
                )


@dataclass(frozen=True)
class AchievedLevel:
    """The single level a pupil reached on one task."""

    coord: LevelCoord


@dataclass(frozen=True)
class ExplicitObservations:
    """Directly recorded per-level outcomes (1 shown, 0 not shown)."""

    observations: tuple[tuple[LevelCoord, int], ...]

    def __post_init__(self):
        seen = set()
        for coord, value in self.observations:
            if coord in seen:
                raise ValidationError(f"duplicate observation at ({coord.r},{coord.c})")
            seen.add(coord)
            if value not in (0, 1):
                raise ValidationError(f"observation value must be 0 or 1, got {value!r}")


TaskEntry = Union[AchievedLevel, ExplicitObservations]


@dataclass(frozen=True)
class PupilRecord:
    """One pupil's outcomes across tasks; absent tasks carry no entry."""

    pupil_id: str
    tasks: Mapping[str, TaskEntry]

    def __post_init__(self):
        object.__setattr__(self, "tasks", dict(self.tasks))

    def achieved_coords(self) -> list[LevelCoord]:
        """Achieved levels in task-id order, for tasks that have one."""
        return [
            entry.coord
            for _, entry in sorted(self.tasks.items())
            if isinstance(entry, AchievedLevel)
        ]


@dataclass(frozen=True)
class EvidenceSet:
    """Partial assignment of answer-node ids to observed {0,1} values."""

    values: Mapping[str, int]

    def __post_init__(self):
        vals = dict(self.values)
        for k, v in vals.items():
            if v not in (0, 1):
                raise ValidationError(f"evidence for {k} must be 0 or 1, got {v!r}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def empty(cls) -> "EvidenceSet":
        return cls({})

    def __len__(self) -> int:
        return len(self.values)

    def merged(self, other: "EvidenceSet") -> "EvidenceSet":
        """Union of two evidence sets; contradictions raise EncodingError."""
        conflicts = tuple(
            k for k, v in other.values.items() if self.values.get(k, v) != v
        )
        if conflicts:
            raise EncodingError(
                f"contradictory evidence for {', '.join(conflicts)}", conflicts
            )
        return EvidenceSet({**self.values, **other.values})


def compile_network(
    rubric: Rubric,
    tasks: list[str] | tuple[str, ...],
    params: ParameterSpec,
    *,
    materialize_unit_arcs: bool = False,
) -> NoisyOrNetwork:
    """Build the noisy-OR network for ``rubric`` over ``tasks``.

    Every answer node's parents are the skills at dominating-or-equal
    levels, with inhibition ``params.default_lambda`` unless overridden.
    With ``materialize_unit_arcs`` every skill becomes a parent of every
    answer, non-relevant ones with inhibition 1; posteriors are unaffected.
    """
    if not tasks:
        raise ValidationError("task list must not be empty")
    if len(set(tasks)) != len(tasks):
        raise ValidationError("duplicate task ids")

    override_map: dict[tuple[str, LevelCoord, LevelCoord], float] = {}
    for ov in params.overrides:
        if ov.task not in tasks:
            raise ValidationError(f"override references unknown task {ov.task!r}")
        rubric.require_coord(ov.answer)
        rubric.require_coord(ov.skill)
        if compare(rubric, ov.skill, ov.answer) not in (
            OrderRelation.HIGHER,
            OrderRelation.EQUAL,
        ):
            raise ValidationError(
                f"override for task {ov.task!r}: skill ({ov.skill.r},{ov.skill.c}) "
                f"is not in the parent set of answer ({ov.answer.r},{ov.answer.c})"
            )
        key = (ov.task, ov.answer, ov.skill)
        if key in override_map:
            raise ValidationError(
                f"duplicate override for task {ov.task!r} at "
                f"answer ({ov.answer.r},{ov.answer.c}), skill ({ov.skill.r},{ov.skill.c})"
            )
        override_map[key] = ov.value

    skills = tuple(
        SkillNode(id=skill_id(coord), coord=coord, prior=params.default_prior)
        for coord in rubric.coords()
    )

    answers = []
    for task in sorted(tasks):
        for coord in rubric.coords():
            parents = sorted(dominating_set(rubric, coord), key=lambda p: (p.r, p.c))
            edges = [
                (skill_id(p), override_map.get((task, coord, p), params.default_lambda))
                for p in parents
            ]
            if materialize_unit_arcs:
                relevant = set(parents)
                edges += [
                    (skill_id(p), 1.0)
                    for p in sorted(set(rubric.coords()) - relevant, key=lambda p: (p.r, p.c))
                ]
            answers.append(
                AnswerNode(
                    id=answer_id(task, coord),
                    task=task,
                    coord=coord,
                    parent_edges=tuple(edges),
                    leak_guess=params.leak_guess,
                )
            )

    label = params.name or "params"
    return NoisyOrNetwork(
        skills=skills,
        answers=tuple(answers),
        provenance=f"{rubric.name}:{label}",
        grid=GridMeta(rubric.n_rows, rubric.n_cols, rubric.rows_ordered),
    )


def _encode_achieved(
    rubric: Rubric, task: str, achieved: LevelCoord
) -> dict[LevelCoord, int]:
    rubric.require_coord(achieved)
    out: dict[LevelCoord, int] = {}
    for coord in rubric.coords():
        rel = compare(rubric, coord, achieved)
        if rel in (OrderRelation.LOWER, OrderRelation.EQUAL):
            out[coord] = 1
        elif rel is OrderRelation.HIGHER:
            out[coord] = 0
    return out


def _check_explicit(
    rubric: Rubric, task: str, entry: ExplicitObservations
) -> dict[LevelCoord, int]:
    out: dict[LevelCoord, int] = {}
    for coord, value in entry.observations:
        rubric.require_coord(coord)
        out[coord] = value
    ones = [c for c, v in out.items() if v == 1]
    zeros = [c for c, v in out.items() if v == 0]
    conflicts = [
        (task, one.r, one.c)
        for one in ones
        for zero in zeros
        if compare(rubric, one, zero) is OrderRelation.HIGHER
    ]
    if conflicts:
        raise EncodingError(
            f"task {task!r}: a shown behaviour strictly dominates a failed one",
            tuple(conflicts),
        )
    return out


def encode(rubric: Rubric, network: NoisyOrNetwork, record: PupilRecord) -> EvidenceSet:
    """Translate a pupil record into evidence on the network's answer nodes.

    Achieved levels expand by dominance; explicit observations pass through
    after consistency checking; absent tasks contribute nothing.
    """
    known_tasks = set(network.tasks)
    values: dict[str, int] = {}
    for task, entry in sorted(record.tasks.items()):
        if task not in known_tasks:
            raise ValidationError(
                f"record for pupil {record.pupil_id!r} references unknown task {task!r}"
            )
        if isinstance(entry, AchievedLevel):
            cell_values = _encode_achieved(rubric, task, entry.coord)
        elif isinstance(entry, ExplicitObservations):
            cell_values = _check_explicit(rubric, task, entry)
        else:
            raise ValidationError(f"unsupported task entry {entry!r}")
        for coord, value in cell_values.items():
            values[answer_id(task, coord)] = value
    return EvidenceSet(values)
