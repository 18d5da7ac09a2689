"""Reads a project dataset directory into the metric input types.

Expected layout (CSV, UTF-8, header row required; see
docs/dataset-format.md):

    hierarchy.csv        id,level,parent          (parent empty for objectives)
    ratings.csv          stakeholder,requirement,rating
    recommendations.csv  from,to,salience
    activity.csv         requirement,event,stakeholder,timestamp   (optional)
    template_fill.csv    requirement,ratio                         (optional)

Malformed rows (wrong header, wrong field count, non-numeric numbers)
raise DatasetParseError; well-formed rows with illegal content (orphan
nodes, out-of-scale values, self-recommendations) raise
DatasetSemanticError.  Both carry the offending file and line number.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from .metrics import (
    ActivityEvent,
    ActivityLog,
    EVENT_KINDS,
    MetricsError,
    RatingMatrix,
    RequirementHierarchy,
    RequirementNode,
    SalienceRecommendation,
)

HIERARCHY_FILE = "hierarchy.csv"
RATINGS_FILE = "ratings.csv"
RECOMMENDATIONS_FILE = "recommendations.csv"
ACTIVITY_FILE = "activity.csv"
TEMPLATE_FILL_FILE = "template_fill.csv"

_HEADERS = {
    HIERARCHY_FILE: ["id", "level", "parent"],
    RATINGS_FILE: ["stakeholder", "requirement", "rating"],
    RECOMMENDATIONS_FILE: ["from", "to", "salience"],
    ACTIVITY_FILE: ["requirement", "event", "stakeholder", "timestamp"],
    TEMPLATE_FILL_FILE: ["requirement", "ratio"],
}


class DatasetError(Exception):
    """Problem in a dataset file, located by file name and line number."""

    def __init__(self, message: str, filename: str, line: int | None = None):
        self.filename = filename
        self.line = line
        where = filename if line is None else f"{filename}:{line}"
        super().__init__(f"{where}: {message}")


class DatasetParseError(DatasetError):
    """The file shape is wrong: header, field count, or number syntax."""


class DatasetSemanticError(DatasetError):
    """The file parses but the content violates the data model."""


@dataclass(frozen=True)
class ProjectDataset:
    """Everything extract_evidence needs, as parsed from one directory."""

    hierarchy: RequirementHierarchy
    ratings: RatingMatrix
    recommendations: tuple[SalienceRecommendation, ...]
    activity: ActivityLog | None


def _rows(filename: str, text: str) -> Iterable[tuple[int, list[str]]]:
    header = _HEADERS[filename]
    reader = csv.reader(io.StringIO(text))
    try:
        first = next(reader)
    except StopIteration:
        raise DatasetParseError("file is empty, header row required", filename, 1) from None
    if [h.strip() for h in first] != header:
        raise DatasetParseError(
            f"header must be {','.join(header)!r}, found {','.join(first)!r}", filename, 1
        )
    for index, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # blank line
        if len(row) != len(header):
            raise DatasetParseError(
                f"expected {len(header)} fields, found {len(row)}", filename, index
            )
        yield index, [field.strip() for field in row]


def _int_field(value: str, what: str, filename: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise DatasetParseError(f"{what} must be an integer, got {value!r}", filename, line) from None


def _float_field(value: str, what: str, filename: str, line: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise DatasetParseError(f"{what} must be a number, got {value!r}", filename, line) from None


def _read_text(directory: Path, filename: str) -> str | None:
    path = directory / filename
    if not path.is_file():
        return None
    return path.read_text(encoding="utf-8")


def load_dataset(directory: str | os.PathLike) -> ProjectDataset:
    """Parse a dataset directory; see the module docstring for the layout."""
    root = Path(directory)
    if not root.is_dir():
        raise DatasetError("not a directory", str(directory))
    texts = {name: _read_text(root, name) for name in _HEADERS}
    missing = [
        name
        for name in (HIERARCHY_FILE, RATINGS_FILE, RECOMMENDATIONS_FILE)
        if texts[name] is None
    ]
    if missing:
        raise DatasetError(f"required file missing: {', '.join(missing)}", str(directory))
    return parse_dataset_texts(texts)


def parse_dataset_texts(texts: dict[str, str | None]) -> ProjectDataset:
    """Parse in-memory file contents keyed by canonical file name."""
    nodes = []
    for line, (node_id, level, parent) in _rows(HIERARCHY_FILE, texts[HIERARCHY_FILE] or ""):
        if not node_id:
            raise DatasetSemanticError("empty requirement id", HIERARCHY_FILE, line)
        nodes.append(RequirementNode(node_id, level, parent or None))
    hierarchy = _semantic(lambda: RequirementHierarchy(nodes), HIERARCHY_FILE)

    rating_rows: list[tuple[str, str, int]] = []
    seen: dict[tuple[str, str], int] = {}
    for line, (stakeholder, requirement, raw) in _rows(RATINGS_FILE, texts[RATINGS_FILE] or ""):
        rating = _int_field(raw, "rating", RATINGS_FILE, line)
        if not 0 <= rating <= 5:
            raise DatasetSemanticError(f"rating {rating} outside 0..5", RATINGS_FILE, line)
        if (stakeholder, requirement) in seen:
            raise DatasetSemanticError(
                f"duplicate rating for ({stakeholder!r}, {requirement!r}), "
                f"first at line {seen[(stakeholder, requirement)]}",
                RATINGS_FILE,
                line,
            )
        seen[(stakeholder, requirement)] = line
        if requirement not in hierarchy:
            raise DatasetSemanticError(
                f"rating references unknown requirement {requirement!r}", RATINGS_FILE, line
            )
        rating_rows.append((stakeholder, requirement, rating))
    ratings = RatingMatrix(rating_rows)

    recommendations = []
    for line, (source, target, salience) in _rows(
        RECOMMENDATIONS_FILE, texts[RECOMMENDATIONS_FILE] or ""
    ):
        value = _int_field(salience, "salience", RECOMMENDATIONS_FILE, line)
        recommendations.append(
            _semantic(
                lambda: SalienceRecommendation(source, target, value),
                RECOMMENDATIONS_FILE,
                line,
            )
        )

    activity = None
    if texts.get(ACTIVITY_FILE) is not None or texts.get(TEMPLATE_FILL_FILE) is not None:
        events = []
        for line, (requirement, kind, stakeholder, timestamp) in _rows(
            ACTIVITY_FILE, texts.get(ACTIVITY_FILE) or f"{','.join(_HEADERS[ACTIVITY_FILE])}\n"
        ):
            if kind not in EVENT_KINDS:
                raise DatasetSemanticError(
                    f"event must be one of {EVENT_KINDS}, got {kind!r}", ACTIVITY_FILE, line
                )
            if requirement not in hierarchy:
                raise DatasetSemanticError(
                    f"activity references unknown requirement {requirement!r}",
                    ACTIVITY_FILE,
                    line,
                )
            events.append(ActivityEvent(requirement, kind, stakeholder, timestamp))
        fill: dict[str, float] = {}
        for line, (requirement, ratio) in _rows(
            TEMPLATE_FILL_FILE,
            texts.get(TEMPLATE_FILL_FILE) or f"{','.join(_HEADERS[TEMPLATE_FILL_FILE])}\n",
        ):
            value = _float_field(ratio, "ratio", TEMPLATE_FILL_FILE, line)
            if not 0.0 <= value <= 1.0:
                raise DatasetSemanticError(
                    f"ratio {value} outside [0, 1]", TEMPLATE_FILL_FILE, line
                )
            if requirement in fill:
                raise DatasetSemanticError(
                    f"duplicate fill ratio for {requirement!r}", TEMPLATE_FILL_FILE, line
                )
            if requirement not in hierarchy:
                raise DatasetSemanticError(
                    f"fill ratio references unknown requirement {requirement!r}",
                    TEMPLATE_FILL_FILE,
                    line,
                )
            fill[requirement] = value
        activity = ActivityLog(events=tuple(events), fill_ratios=fill)

    return ProjectDataset(
        hierarchy=hierarchy,
        ratings=ratings,
        recommendations=tuple(recommendations),
        activity=activity,
    )


def _semantic(build: Callable, filename: str, line: int | None = None):
    """Run a metric-type constructor, relocating its error to the file."""
    try:
        return build()
    except MetricsError as exc:
        raise DatasetSemanticError(str(exc), filename, line) from exc
