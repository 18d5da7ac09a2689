"""Turns raw project data into evidence for the Requisites variables.

The inputs mirror what a requirements-management tool can export: a
three-level requirement hierarchy (objectives, features, specifics), a
stakeholder-by-requirement rating matrix on a 0-5 scale, stakeholder
salience recommendations on a 1-8 scale, and optionally an activity log
(comments, changes, status transitions, template fill ratios).

Every operation is pure and order-independent: shuffling the input
records never changes an extracted state.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from math import floor
from typing import Iterable, Mapping, Sequence

import numpy as np

LEVELS = ("objective", "feature", "specific")

RATING_MIN, RATING_MAX = 0, 5
SALIENCE_MIN, SALIENCE_MAX = 1, 8

# salience scale split into equal thirds
_SALIENCE_LOW_EDGE = SALIENCE_MIN + (SALIENCE_MAX - SALIENCE_MIN) / 3.0      # 10/3
_SALIENCE_HIGH_EDGE = SALIENCE_MIN + 2.0 * (SALIENCE_MAX - SALIENCE_MIN) / 3.0  # 17/3

MANUAL_NOTE_ASSIGNMENT = "manual assignment"
MANUAL_NOTE_UNSUPPORTED = "not derivable from project activity data"
MANUAL_NOTE_NO_ACTIVITY = "no activity log provided"
MANUAL_NOTE_NO_FILL = "no template fill data provided"
MANUAL_NOTE_NO_DATA = "input data not provided"


class MetricsError(Exception):
    """Base class for metric extraction failures."""


class EmptyHierarchy(MetricsError):
    """The requirement hierarchy has no project objectives."""


class HierarchyViolation(MetricsError):
    """A node breaks the objective/feature/specific containment rules."""


class UnratedObjective(MetricsError):
    """An objective has no rating anywhere in its subtree."""


class NoRecommendations(MetricsError):
    """The salience recommendation list is empty."""


class ScaleViolation(MetricsError):
    """A rating or salience value lies outside its declared scale."""


@dataclass(frozen=True)
class RequirementNode:
    id: str
    level: str
    parent: str | None = None


class RequirementHierarchy:
    """Validated objective/feature/specific tree."""

    def __init__(self, nodes: Iterable[RequirementNode]):
        self.nodes = tuple(nodes)
        by_id: dict[str, RequirementNode] = {}
        for node in self.nodes:
            if node.level not in LEVELS:
                raise HierarchyViolation(f"unknown level {node.level!r} for {node.id!r}")
            if node.id in by_id:
                raise HierarchyViolation(f"duplicate requirement id {node.id!r}")
            by_id[node.id] = node
        self._by_id = by_id
        self._children: dict[str, list[str]] = defaultdict(list)
        for node in self.nodes:
            if node.level == "objective":
                if node.parent:
                    raise HierarchyViolation(f"objective {node.id!r} must not have a parent")
                continue
            wanted = "objective" if node.level == "feature" else "feature"
            parent = by_id.get(node.parent or "")
            if parent is None or parent.level != wanted:
                raise HierarchyViolation(
                    f"{node.level} {node.id!r} needs an existing {wanted} parent, "
                    f"got {node.parent!r}"
                )
            self._children[parent.id].append(node.id)
        # deterministic traversal regardless of input order
        for children in self._children.values():
            children.sort()
        self.objectives = tuple(sorted(n.id for n in self.nodes if n.level == "objective"))

    def node(self, node_id: str) -> RequirementNode:
        return self._by_id[node_id]

    def children(self, node_id: str) -> tuple[str, ...]:
        return tuple(self._children.get(node_id, ()))

    def objective_of(self, node_id: str) -> str:
        """Enclosing objective of any node (itself for objectives)."""
        node = self._by_id[node_id]
        while node.parent is not None:
            node = self._by_id[node.parent]
        return node.id

    def all_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._by_id))

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._by_id


class RatingMatrix:
    """(stakeholder, requirement) -> rating on the 0-5 ordinal scale."""

    def __init__(self, entries: Mapping[tuple[str, str], int] | Iterable[tuple[str, str, int]]):
        pairs: dict[tuple[str, str], int] = {}
        items = entries.items() if isinstance(entries, Mapping) else (
            ((s, r), v) for s, r, v in entries
        )
        for (stakeholder, requirement), rating in items:
            rating = int(rating)
            if not RATING_MIN <= rating <= RATING_MAX:
                raise ScaleViolation(
                    f"rating {rating} for ({stakeholder!r}, {requirement!r}) outside "
                    f"{RATING_MIN}..{RATING_MAX}"
                )
            key = (stakeholder, requirement)
            if key in pairs:
                raise ScaleViolation(f"duplicate rating for {key!r}")
            pairs[key] = rating
        self.entries = pairs

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SalienceRecommendation:
    from_stakeholder: str
    to_stakeholder: str
    salience: int

    def __post_init__(self) -> None:
        if self.from_stakeholder == self.to_stakeholder:
            raise ScaleViolation(f"{self.from_stakeholder!r} cannot recommend themselves")
        if not SALIENCE_MIN <= int(self.salience) <= SALIENCE_MAX:
            raise ScaleViolation(
                f"salience {self.salience} outside {SALIENCE_MIN}..{SALIENCE_MAX}"
            )


EVENT_KINDS = ("comment", "change", "accept", "reject")


@dataclass(frozen=True)
class ActivityEvent:
    requirement: str
    kind: str
    stakeholder: str
    timestamp: str

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise MetricsError(f"unknown activity event kind {self.kind!r}")


@dataclass(frozen=True)
class ActivityLog:
    """Recorded requirement activity plus template fill ratios."""

    events: tuple[ActivityEvent, ...] = ()
    fill_ratios: Mapping[str, float] = field(default_factory=dict)
    project_assignments: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        for requirement, ratio in self.fill_ratios.items():
            if not 0.0 <= float(ratio) <= 1.0:
                raise MetricsError(f"fill ratio {ratio} for {requirement!r} outside [0, 1]")
        for stakeholder, count in self.project_assignments.items():
            if int(count) < 0:
                raise MetricsError(f"negative assignment count for {stakeholder!r}")

    def touched_requirements(self) -> dict[str, int]:
        """Per stakeholder, how many distinct requirements they acted on."""
        touched: dict[str, set[str]] = defaultdict(set)
        for event in self.events:
            touched[event.stakeholder].add(event.requirement)
        return {s: len(reqs) for s, reqs in touched.items()}

    def __bool__(self) -> bool:
        return bool(self.events) or bool(self.fill_ratios)


@dataclass(frozen=True)
class EvidenceEntry:
    """Extracted state for one variable, or MANUAL when not derivable."""

    state: str | None
    statistics: dict[str, float | int | str]
    note: str

    @property
    def is_manual(self) -> bool:
        return self.state is None

    def to_dict(self) -> dict:
        return {
            "state": "MANUAL" if self.state is None else self.state,
            "statistics": dict(self.statistics),
            "note": self.note,
        }


@dataclass(frozen=True)
class EvidenceReport:
    """Per-variable extraction results with their supporting statistics."""

    entries: dict[str, EvidenceEntry]

    def evidence(self) -> dict[str, str]:
        """Only the derivable variables, as a network evidence mapping."""
        return {
            var: entry.state
            for var, entry in self.entries.items()
            if entry.state is not None
        }

    def to_dict(self) -> dict:
        return {var: entry.to_dict() for var, entry in self.entries.items()}


def detail_percentage(hierarchy: RequirementHierarchy) -> dict[str, float]:
    """Per objective, the share of its features refined into specifics.

    An objective with no features counts as 0: nothing under it has been
    detailed at all.
    """
    if not hierarchy.objectives:
        raise EmptyHierarchy("hierarchy has no objectives")
    out: dict[str, float] = {}
    for objective in hierarchy.objectives:
        features = hierarchy.children(objective)
        if not features:
            out[objective] = 0.0
            continue
        detailed = sum(1 for f in features if hierarchy.children(f))
        out[objective] = 100.0 * detailed / len(features)
    return out


@dataclass(frozen=True)
class QuartileSummary:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float


def homogeneity(hierarchy: RequirementHierarchy) -> tuple[str, QuartileSummary]:
    """Description homogeneity: 'yes' iff the lower quartile of the
    per-objective detail percentages reaches 50.

    Quartiles use linear interpolation on the sorted sample.
    """
    percentages = list(detail_percentage(hierarchy).values())
    q = np.percentile(percentages, [0, 25, 50, 75, 100])
    summary = QuartileSummary(*(float(x) for x in q))
    return ("yes" if summary.q1 >= 50.0 else "no"), summary


def rating_bin(mean_rating: float) -> str:
    """0-5 rating mean to low/medium/high: round half up, then pair up."""
    rounded = floor(mean_rating + 0.5)
    if rounded <= 1:
        return "low"
    if rounded <= 3:
        return "medium"
    return "high"


def salience_bin(mean_salience: float) -> str:
    """1-8 salience mean to low/medium/high by equal thirds of the scale."""
    if mean_salience < _SALIENCE_LOW_EDGE:
        return "low"
    if mean_salience < _SALIENCE_HIGH_EDGE:
        return "medium"
    return "high"


def _modal(bins: Iterable[str]) -> tuple[str, float]:
    """Most common bin and its share; ties go to high, then medium."""
    counts = Counter(bins)
    total = sum(counts.values())
    winner = max(("high", "medium", "low"), key=lambda b: counts.get(b, 0))
    return winner, counts.get(winner, 0) / total


@dataclass(frozen=True)
class SpecificityResult:
    state: str
    modal_share: float
    objective_means: dict[str, float]
    objective_bins: dict[str, str]


def objective_specificity(
    hierarchy: RequirementHierarchy, ratings: RatingMatrix
) -> SpecificityResult:
    """Shared-meaning estimate from rating consensus.

    Ratings attached anywhere in an objective's subtree count toward that
    objective's mean; the overall state is the modal per-objective bin.
    """
    if not hierarchy.objectives:
        raise EmptyHierarchy("hierarchy has no objectives")
    sums: dict[str, float] = defaultdict(float)
    counts: dict[str, int] = defaultdict(int)
    for (_, requirement), rating in ratings.entries.items():
        if requirement not in hierarchy:
            raise MetricsError(f"rating references unknown requirement {requirement!r}")
        objective = hierarchy.objective_of(requirement)
        sums[objective] += rating
        counts[objective] += 1
    unrated = [o for o in hierarchy.objectives if counts[o] == 0]
    if unrated:
        raise UnratedObjective(f"no ratings anywhere under objectives {unrated}")
    means = {o: sums[o] / counts[o] for o in hierarchy.objectives}
    bins = {o: rating_bin(m) for o, m in means.items()}
    state, share = _modal(bins.values())
    return SpecificityResult(state, share, means, bins)


@dataclass(frozen=True)
class ExpertiseResult:
    state: str
    modal_share: float
    stakeholder_means: dict[str, float]
    stakeholder_bins: dict[str, str]


def stakeholder_expertise(
    recommendations: Sequence[SalienceRecommendation],
) -> ExpertiseResult:
    """Expertise estimate from received salience recommendations.

    Each stakeholder is summarized by the mean salience others assigned
    them; the overall state is the modal bin.
    """
    if not recommendations:
        raise NoRecommendations("no salience recommendations given")
    sums: dict[str, float] = defaultdict(float)
    counts: dict[str, int] = defaultdict(int)
    for rec in recommendations:
        sums[rec.to_stakeholder] += rec.salience
        counts[rec.to_stakeholder] += 1
    means = {s: sums[s] / counts[s] for s in sorted(counts)}
    bins = {s: salience_bin(m) for s, m in means.items()}
    state, share = _modal(bins.values())
    return ExpertiseResult(state, share, means, bins)


def _tercile_state(scores: Sequence[float]) -> tuple[str, dict[str, float]]:
    """Project-relative discretization of per-requirement scores.

    The boundaries are the 1/3 and 2/3 percentiles of the score
    distribution; the project mean is placed against them.  When the
    boundaries coincide there is no spread to speak of, so the answer is
    'medium'.
    """
    lower, upper = (float(x) for x in np.percentile(scores, [100.0 / 3.0, 200.0 / 3.0]))
    mean = float(np.mean(scores))
    stats = {"tercile_low": lower, "tercile_high": upper, "mean": mean}
    if lower == upper:
        return "medium", stats
    if mean <= lower:
        return "low", stats
    if mean <= upper:
        return "medium", stats
    return "high", stats


def _status_flips(events: Sequence[ActivityEvent]) -> int:
    """Accepted/rejected alternations in timestamp order."""
    status = sorted(
        (e for e in events if e.kind in ("accept", "reject")),
        key=lambda e: (e.timestamp, e.kind, e.stakeholder),
    )
    return sum(1 for a, b in zip(status, status[1:]) if a.kind != b.kind)


def extract_evidence(
    hierarchy: RequirementHierarchy,
    ratings: RatingMatrix | None = None,
    recommendations: Sequence[SalienceRecommendation] | None = None,
    activity: ActivityLog | None = None,
) -> EvidenceReport:
    """Evidence values for every measurable Requisites variable.

    The hierarchy alone yields homogeneity_of_description; ratings add
    specificity; recommendations add stakeholders_expertise; an activity
    log adds degree_of_commitment, unclear_cost_benefit,
    requirement_variability and requirement_completeness.  Everything
    else is MANUAL: the engineer has to judge it.  The class variable is
    the prediction target and is never extracted.
    """
    entries: dict[str, EvidenceEntry] = {}

    homog_state, quartiles = homogeneity(hierarchy)
    entries["homogeneity_of_description"] = EvidenceEntry(
        state=homog_state,
        statistics={
            "min": quartiles.minimum,
            "q1": quartiles.q1,
            "median": quartiles.median,
            "q3": quartiles.q3,
            "max": quartiles.maximum,
        },
        note="'yes' iff the lower quartile of per-objective detail percentages is >= 50",
    )

    if ratings is not None and len(ratings):
        spec = objective_specificity(hierarchy, ratings)
        stats: dict[str, float | int | str] = {
            "modal_share": spec.modal_share,
            "objectives": len(spec.objective_bins),
        }
        if activity:
            stats["accepted_multi_stakeholder"] = _accepted_multi_stakeholder(activity)
        entries["specificity"] = EvidenceEntry(
            state=spec.state,
            statistics=stats,
            note="modal bin of per-objective mean ratings",
        )
    else:
        entries["specificity"] = EvidenceEntry(None, {}, MANUAL_NOTE_NO_DATA)

    if recommendations:
        exp = stakeholder_expertise(recommendations)
        entries["stakeholders_expertise"] = EvidenceEntry(
            state=exp.state,
            statistics={
                "modal_share": exp.modal_share,
                "stakeholders": len(exp.stakeholder_bins),
            },
            note="modal bin of mean received salience",
        )
    else:
        entries["stakeholders_expertise"] = EvidenceEntry(None, {}, MANUAL_NOTE_NO_DATA)

    if activity and activity.events:
        by_requirement: dict[str, list[ActivityEvent]] = defaultdict(list)
        for event in activity.events:
            if event.requirement not in hierarchy:
                raise MetricsError(
                    f"activity references unknown requirement {event.requirement!r}"
                )
            by_requirement[event.requirement].append(event)
        all_ids = hierarchy.all_ids()

        def per_requirement(score) -> list[float]:
            return [float(score(by_requirement.get(r, []))) for r in all_ids]

        def multi_stakeholder(events: list[ActivityEvent], kinds: tuple[str, ...]) -> bool:
            actors = {e.stakeholder for e in events if e.kind in kinds}
            return len(actors) >= 2

        commitment = per_requirement(
            lambda evs: 1.0
            if multi_stakeholder(evs, ("comment",)) or multi_stakeholder(evs, ("change",))
            else 0.0
        )
        state, stats = _tercile_state(commitment)
        entries["degree_of_commitment"] = EvidenceEntry(
            state, stats, "share of requirements with multi-stakeholder comments or changes"
        )

        unclear = per_requirement(
            lambda evs: _status_flips(evs) + (1.0 if multi_stakeholder(evs, ("comment",)) else 0.0)
        )
        state, stats = _tercile_state(unclear)
        entries["unclear_cost_benefit"] = EvidenceEntry(
            state, stats, "status flip-flops plus multi-stakeholder comment indicator"
        )

        variability = per_requirement(
            lambda evs: sum(1.0 for e in evs if e.kind == "change")
        )
        state, stats = _tercile_state(variability)
        entries["requirement_variability"] = EvidenceEntry(
            state, stats, "registered change count per requirement"
        )
    else:
        for var in ("degree_of_commitment", "unclear_cost_benefit", "requirement_variability"):
            entries[var] = EvidenceEntry(None, {}, MANUAL_NOTE_NO_ACTIVITY)

    if activity and activity.fill_ratios:
        for requirement in activity.fill_ratios:
            if requirement not in hierarchy:
                raise MetricsError(
                    f"fill ratio references unknown requirement {requirement!r}"
                )
        ratios = [float(x) for _, x in sorted(activity.fill_ratios.items())]
        state, stats = _tercile_state(ratios)
        entries["requirement_completeness"] = EvidenceEntry(
            state, stats, "mean template fill ratio"
        )
    else:
        note = MANUAL_NOTE_NO_FILL if activity else MANUAL_NOTE_NO_ACTIVITY
        entries["requirement_completeness"] = EvidenceEntry(None, {}, note)

    entries["domain_expertise"] = EvidenceEntry(None, {}, MANUAL_NOTE_ASSIGNMENT)
    entries["reused_requirement"] = EvidenceEntry(None, {}, MANUAL_NOTE_UNSUPPORTED)
    entries["unexpected_dependencies"] = EvidenceEntry(None, {}, MANUAL_NOTE_UNSUPPORTED)

    return EvidenceReport(entries=entries)


def _accepted_multi_stakeholder(activity: ActivityLog) -> int:
    """Count of accepted requirements touched by two or more stakeholders."""
    by_requirement: dict[str, list[ActivityEvent]] = defaultdict(list)
    for event in activity.events:
        by_requirement[event.requirement].append(event)
    count = 0
    for events in by_requirement.values():
        status = sorted(
            (e for e in events if e.kind in ("accept", "reject")),
            key=lambda e: (e.timestamp, e.kind, e.stakeholder),
        )
        accepted = bool(status) and status[-1].kind == "accept"
        if accepted and len({e.stakeholder for e in events}) >= 2:
            count += 1
    return count
