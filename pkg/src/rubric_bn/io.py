"""File formats: rubric and parameter documents (JSON), pupil datasets (CSV).

Documents are strict: unknown fields are rejected rather than ignored so a
misspelt key cannot silently fall back to a default. Probabilities are
plain decimal literals, read at double precision (about 15 significant
digits). Dataset rows are ``pupil_id,task_id,kind,r,c,value`` with kind
``achieved`` (value blank) or ``obs`` (value 0/1), one header row required.

Loading is reentrant; writing the same path from concurrent callers is
undefined and the caller's responsibility.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .compiler import (
    AchievedLevel,
    ExplicitObservations,
    LambdaOverride,
    NoisyOrNetwork,
    ParameterSpec,
    PupilRecord,
    TaskEntry,
)
from .errors import ParseError, ValidationError
from .rubric import AxisEntry, LevelCoord, Rubric

DATASET_HEADER = ["pupil_id", "task_id", "kind", "r", "c", "value"]


@dataclass(frozen=True)
class RubricDocument:
    """A rubric together with the battery of task ids it is assessed over."""

    rubric: Rubric
    tasks: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.tasks)) != len(self.tasks):
            raise ValidationError("duplicate task ids in rubric document")
        for t in self.tasks:
            if not isinstance(t, str) or not t:
                raise ValidationError(f"task ids must be non-empty strings, got {t!r}")


def _require_keys(obj: dict, required: list[str], optional: list[str], where: str) -> None:
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise ParseError(
            f"unknown field(s) in {where}: {', '.join(sorted(unknown))}",
            field=sorted(unknown)[0],
        )
    for key in required:
        if key not in obj:
            raise ParseError(f"missing field {key!r} in {where}", field=key)


def _axis_entry(obj: Any, where: str) -> AxisEntry:
    if not isinstance(obj, dict):
        raise ParseError(f"{where} must be an object with id/label", field=where)
    _require_keys(obj, ["id"], ["label"], where)
    if not isinstance(obj["id"], str) or not obj["id"]:
        raise ParseError(f"{where}: id must be a non-empty string", field="id")
    return AxisEntry(id=obj["id"], label=str(obj.get("label", "")))


def _coord_pair(obj: Any, where: str) -> LevelCoord:
    if (
        not isinstance(obj, list)
        or len(obj) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in obj)
    ):
        raise ParseError(f"{where} must be a [r, c] pair of integers", field=where)
    return LevelCoord(obj[0], obj[1])


def _probability(obj: Any, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ParseError(f"{where} must be a number", field=where)
    return float(obj)


def rubric_from_dict(data: Any) -> RubricDocument:
    """Validate a decoded rubric document."""
    if not isinstance(data, dict):
        raise ParseError("rubric document must be a JSON object")
    _require_keys(
        data, ["name", "rows", "columns", "rows_ordered", "cells", "tasks"], [], "rubric"
    )
    if not isinstance(data["name"], str):
        raise ParseError("rubric name must be a string", field="name")
    if not isinstance(data["rows_ordered"], bool):
        raise ParseError("rows_ordered must be true or false", field="rows_ordered")
    if not isinstance(data["rows"], list) or not isinstance(data["columns"], list):
        raise ParseError("rows and columns must be lists", field="rows")
    rows = tuple(_axis_entry(e, "rows entry") for e in data["rows"])
    columns = tuple(_axis_entry(e, "columns entry") for e in data["columns"])
    cells_raw = data["cells"]
    if not isinstance(cells_raw, list) or not all(
        isinstance(row, list) and all(isinstance(c, str) for c in row)
        for row in cells_raw
    ):
        raise ParseError("cells must be a matrix of strings", field="cells")
    cells = tuple(tuple(row) for row in cells_raw)
    if not isinstance(data["tasks"], list):
        raise ParseError("tasks must be a list of ids", field="tasks")
    rubric = Rubric(
        name=data["name"],
        rows=rows,
        columns=columns,
        cells=cells,
        rows_ordered=data["rows_ordered"],
    )
    return RubricDocument(rubric=rubric, tasks=tuple(data["tasks"]))


def rubric_to_dict(doc: RubricDocument) -> dict:
    return {
        "name": doc.rubric.name,
        "rows": [{"id": e.id, "label": e.label} for e in doc.rubric.rows],
        "columns": [{"id": e.id, "label": e.label} for e in doc.rubric.columns],
        "rows_ordered": doc.rubric.rows_ordered,
        "cells": [list(row) for row in doc.rubric.cells],
        "tasks": list(doc.tasks),
    }


def params_from_dict(data: Any, *, name: str = "") -> ParameterSpec:
    """Validate a decoded parameter document."""
    if not isinstance(data, dict):
        raise ParseError("parameter document must be a JSON object")
    _require_keys(
        data,
        ["default_prior", "default_lambda", "leak_guess"],
        ["palette", "overrides"],
        "params",
    )
    palette = None
    if "palette" in data:
        if not isinstance(data["palette"], list):
            raise ParseError("palette must be a list of numbers", field="palette")
        palette = tuple(_probability(v, "palette value") for v in data["palette"])
    overrides = []
    for i, entry in enumerate(data.get("overrides", [])):
        where = f"overrides[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where} must be an object", field="overrides")
        _require_keys(entry, ["task", "answer", "skill", "lambda"], [], where)
        if not isinstance(entry["task"], str):
            raise ParseError(f"{where}: task must be a string", field="task")
        overrides.append(
            LambdaOverride(
                task=entry["task"],
                answer=_coord_pair(entry["answer"], f"{where}.answer"),
                skill=_coord_pair(entry["skill"], f"{where}.skill"),
                value=_probability(entry["lambda"], f"{where}.lambda"),
            )
        )
    return ParameterSpec(
        default_prior=_probability(data["default_prior"], "default_prior"),
        default_lambda=_probability(data["default_lambda"], "default_lambda"),
        leak_guess=_probability(data["leak_guess"], "leak_guess"),
        palette=palette,
        overrides=tuple(overrides),
        name=name,
    )


def params_to_dict(params: ParameterSpec) -> dict:
    out: dict = {
        "default_prior": params.default_prior,
        "default_lambda": params.default_lambda,
        "leak_guess": params.leak_guess,
    }
    if params.palette is not None:
        out["palette"] = list(params.palette)
    if params.overrides:
        out["overrides"] = [
            {
                "task": ov.task,
                "answer": [ov.answer.r, ov.answer.c],
                "skill": [ov.skill.r, ov.skill.c],
                "lambda": ov.value,
            }
            for ov in params.overrides
        ]
    return out


def _load_json(path: str | Path, what: str) -> Any:
    text = Path(path).read_text()
    if not text.strip():
        raise ParseError(f"empty {what} file: {path}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed {what} file {path}: {exc.msg}", line=exc.lineno) from exc


def load_rubric(path: str | Path) -> RubricDocument:
    """Load and validate a rubric document."""
    return rubric_from_dict(_load_json(path, "rubric"))


def save_rubric(doc: RubricDocument, path: str | Path) -> None:
    Path(path).write_text(json.dumps(rubric_to_dict(doc), indent=2) + "\n")


def load_params(path: str | Path) -> ParameterSpec:
    """Load and validate a parameter document; name defaults to the file stem."""
    return params_from_dict(_load_json(path, "parameter"), name=Path(path).stem)


def save_params(params: ParameterSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(params_to_dict(params), indent=2) + "\n")


def _parse_int(value: str, what: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {value!r}", line=line)


def load_dataset(path: str | Path, doc: RubricDocument) -> list[PupilRecord]:
    """Load pupil records, validating tasks and coordinates against ``doc``.

    Rows are grouped per pupil in first-appearance order; multiple ``obs``
    rows for the same (pupil, task) aggregate into one set of explicit
    observations. Errors cite the 1-based file line.
    """
    rows_max, cols_max = doc.rubric.n_rows, doc.rubric.n_cols
    known_tasks = set(doc.tasks)

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"empty dataset file: {path}")
        if [h.strip() for h in header] != DATASET_HEADER:
            raise ParseError(
                f"dataset header must be {','.join(DATASET_HEADER)}", line=1
            )

        achieved: dict[tuple[str, str], LevelCoord] = {}
        explicit: dict[tuple[str, str], list[tuple[LevelCoord, int, int]]] = {}
        pupil_order: list[str] = []
        task_order: dict[str, list[str]] = {}

        for line, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 6:
                raise ParseError(f"expected 6 columns, got {len(row)}", line=line)
            pupil, task, kind, r_raw, c_raw, value_raw = (cell.strip() for cell in row)
            if not pupil or not task:
                raise ParseError("pupil_id and task_id must be non-empty", line=line)
            if task not in known_tasks:
                raise ParseError(f"unknown task id {task!r}", line=line)
            r = _parse_int(r_raw, "r", line)
            c = _parse_int(c_raw, "c", line)
            if not (1 <= r <= rows_max and 1 <= c <= cols_max):
                raise ParseError(
                    f"coordinate ({r},{c}) outside {rows_max}x{cols_max} rubric",
                    line=line,
                )
            key = (pupil, task)
            if pupil not in task_order:
                pupil_order.append(pupil)
                task_order[pupil] = []
            if kind == "achieved":
                if value_raw:
                    raise ParseError("achieved rows must leave value blank", line=line)
                if key in achieved or key in explicit:
                    raise ParseError(
                        f"duplicate entry for pupil {pupil!r}, task {task!r}", line=line
                    )
                achieved[key] = LevelCoord(r, c)
                task_order[pupil].append(task)
            elif kind == "obs":
                if value_raw not in ("0", "1"):
                    raise ParseError("obs rows must carry value 0 or 1", line=line)
                if key in achieved:
                    raise ParseError(
                        f"duplicate entry for pupil {pupil!r}, task {task!r}", line=line
                    )
                coords_seen = explicit.setdefault(key, [])
                if any(prev == LevelCoord(r, c) for prev, _, _ in coords_seen):
                    raise ParseError(
                        f"duplicate observation at ({r},{c}) for pupil {pupil!r}, "
                        f"task {task!r}",
                        line=line,
                    )
                if not coords_seen:
                    task_order[pupil].append(task)
                coords_seen.append((LevelCoord(r, c), int(value_raw), line))
            else:
                raise ParseError(
                    f"kind must be 'achieved' or 'obs', got {kind!r}", line=line
                )

    records = []
    for pupil in pupil_order:
        tasks: dict[str, TaskEntry] = {}
        for task in task_order[pupil]:
            key = (pupil, task)
            if key in achieved:
                tasks[task] = AchievedLevel(achieved[key])
            else:
                tasks[task] = ExplicitObservations(
                    tuple((coord, value) for coord, value, _ in explicit[key])
                )
        records.append(PupilRecord(pupil_id=pupil, tasks=tasks))
    return records


def save_dataset(records: list[PupilRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DATASET_HEADER)
        for record in records:
            for task, entry in record.tasks.items():
                if isinstance(entry, AchievedLevel):
                    writer.writerow(
                        [record.pupil_id, task, "achieved", entry.coord.r, entry.coord.c, ""]
                    )
                else:
                    for coord, value in entry.observations:
                        writer.writerow(
                            [record.pupil_id, task, "obs", coord.r, coord.c, value]
                        )


def network_to_dict(network: NoisyOrNetwork) -> dict:
    """Serialize a compiled network (export only; networks are recompiled
    from their rubric and parameter documents rather than loaded back)."""
    out: dict = {
        "provenance": network.provenance,
        "skills": [
            {"id": s.id, "r": s.coord.r, "c": s.coord.c, "prior": s.prior}
            for s in network.skills
        ],
        "answers": [
            {
                "id": a.id,
                "task": a.task,
                "r": a.coord.r,
                "c": a.coord.c,
                "leak_guess": a.leak_guess,
                "parents": [
                    {"skill": skill, "lambda": lam} for skill, lam in a.parent_edges
                ],
            }
            for a in network.answers
        ],
    }
    if network.grid is not None:
        out["grid"] = {
            "rows": network.grid.n_rows,
            "columns": network.grid.n_cols,
            "rows_ordered": network.grid.rows_ordered,
        }
    return out


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture: cat_rubric, model1, model2_template, demo_dataset."""
    suffix = ".csv" if name == "demo_dataset" else ".json"
    path = Path(str(resources.files("rubric_bn.fixtures") / f"{name}{suffix}"))
    if not path.exists():
        raise ValidationError(f"no bundled fixture named {name!r}")
    return path
