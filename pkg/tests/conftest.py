"""Shared fixtures: small reference networks, random network generation,
and the synthetic large-project dataset used across the metric tests."""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from requisites.bn import Cpt, Variable, build_network
from requisites.metrics import (
    RatingMatrix,
    RequirementHierarchy,
    RequirementNode,
    SalienceRecommendation,
)


def make_chain_ab():
    """A -> B with P(a)=0.3, P(b|a)=0.8, P(b|not a)=0.1."""
    variables = [Variable("A", ("a", "not_a")), Variable("B", ("b", "not_b"))]
    cpts = [
        Cpt("A", (), [[0.3, 0.7]]),
        Cpt("B", ("A",), [[0.8, 0.2], [0.1, 0.9]]),
    ]
    return build_network(variables, [("A", "B")], cpts)


def random_net_spec(rng: np.random.Generator, max_vars: int = 8):
    """Plain-Python description of a random strictly-positive network.

    Returns (variables, parents, tables, edges) in the oracle's format.
    """
    n = int(rng.integers(2, max_vars + 1))
    variables = []
    for i in range(n):
        k = int(rng.integers(2, 4))
        variables.append((f"v{i}", [f"s{j}" for j in range(k)]))
    parents = {var: [] for var, _ in variables}
    edges = []
    for j in range(1, n):
        candidates = list(range(j))
        rng.shuffle(candidates)
        for i in candidates[: int(rng.integers(0, min(3, j) + 1))]:
            parents[f"v{j}"].append(f"v{i}")
            edges.append((f"v{i}", f"v{j}"))
    states_of = dict(variables)
    tables = {}
    for var, states in variables:
        rows = 1
        for p in parents[var]:
            rows *= len(states_of[p])
        raw = rng.random((rows, len(states))) + 0.05  # bounded away from zero
        tables[var] = (raw / raw.sum(axis=1, keepdims=True)).tolist()
    return variables, parents, tables, edges


def build_from_spec(variables, parents, tables, edges):
    net_vars = [Variable(v, tuple(states)) for v, states in variables]
    cpts = [Cpt(v, tuple(parents[v]), tables[v]) for v, _ in variables]
    return build_network(net_vars, edges, cpts)


def random_evidence(rng: np.random.Generator, variables, max_items: int = 3):
    states_of = dict(variables)
    count = int(rng.integers(0, max_items + 1))
    picked = rng.choice(len(variables), size=min(count, len(variables)), replace=False)
    return {
        variables[int(i)][0]: str(rng.choice(states_of[variables[int(i)][0]]))
        for i in picked
    }


# --- the synthetic large-project dataset -----------------------------------
#
# Built so that the lower quartile of the per-objective detail percentages
# is 50.96 (two decimals), 90% of objectives get a 'high' specificity bin,
# and 92% of stakeholders get a 'low' expertise bin.

DETAIL_FRACTIONS = [
    Fraction(1, 4),    # 25.0
    Fraction(2, 5),    # 40.0
    Fraction(3, 7),    # 42.857...
    Fraction(9, 20),   # 45.0
    Fraction(1, 2),    # 50.0
    Fraction(20, 39),  # 51.282...  -> Q1 = 50 + 0.75*(51.282-50) = 50.9615
    Fraction(3, 5),
    Fraction(2, 3),
    Fraction(7, 10),
    Fraction(3, 4),
    Fraction(4, 5),
    Fraction(5, 6),
    Fraction(6, 7),
    Fraction(7, 8),
    Fraction(8, 9),
    Fraction(9, 10),
    Fraction(11, 12),
    Fraction(12, 13),
    Fraction(19, 20),
    Fraction(1, 1),
]

# objective index -> pair of ratings each stakeholder pair assigns; 18 of 20
# means land >= 3.5 (high bin), one at 2.0 (medium), one at 1.0 (low)
OBJECTIVE_RATINGS = [(4, 5)] * 9 + [(5, 5)] * 9 + [(2, 2), (1, 1)]

# stakeholder index -> saliences received; 23 of 25 mean < 10/3 (low bin)
RECEIVED_SALIENCES = [(2, 3)] * 23 + [(4, 5), (7, 8)]


def project_rows():
    """Row lists for the five dataset files (no headers)."""
    hierarchy = []
    ratings = []
    recommendations = []
    for idx, fraction in enumerate(DETAIL_FRACTIONS):
        objective = f"obj{idx:02d}"
        hierarchy.append((objective, "objective", ""))
        detailed, total = fraction.numerator, fraction.denominator
        for f in range(total):
            feature = f"{objective}.f{f:02d}"
            hierarchy.append((feature, "feature", objective))
            if f < detailed:
                hierarchy.append((f"{feature}.s0", "specific", feature))
        r1, r2 = OBJECTIVE_RATINGS[idx]
        ratings.append(("st01", objective, r1))
        ratings.append(("st02", objective, r2))
    n = len(RECEIVED_SALIENCES)
    for idx, saliences in enumerate(RECEIVED_SALIENCES):
        receiver = f"st{idx + 1:02d}"
        for offset, salience in enumerate(saliences, start=1):
            sender = f"st{(idx + offset) % n + 1:02d}"
            recommendations.append((sender, receiver, salience))
    return hierarchy, ratings, recommendations


def project_objects(hierarchy_rows=None, rating_rows=None, recommendation_rows=None):
    base = project_rows()
    hierarchy_rows = base[0] if hierarchy_rows is None else hierarchy_rows
    rating_rows = base[1] if rating_rows is None else rating_rows
    recommendation_rows = base[2] if recommendation_rows is None else recommendation_rows
    hierarchy = RequirementHierarchy(
        RequirementNode(i, level, parent or None) for i, level, parent in hierarchy_rows
    )
    ratings = RatingMatrix([(s, r, v) for s, r, v in rating_rows])
    recommendations = tuple(
        SalienceRecommendation(a, b, v) for a, b, v in recommendation_rows
    )
    return hierarchy, ratings, recommendations


def write_project_dir(directory: Path) -> Path:
    hierarchy, ratings, recommendations = project_rows()
    directory.mkdir(parents=True, exist_ok=True)
    _write_csv(directory / "hierarchy.csv", ("id", "level", "parent"), hierarchy)
    _write_csv(directory / "ratings.csv", ("stakeholder", "requirement", "rating"), ratings)
    _write_csv(directory / "recommendations.csv", ("from", "to", "salience"), recommendations)
    return directory


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


@pytest.fixture()
def project_dir(tmp_path) -> Path:
    return write_project_dir(tmp_path / "project")


@pytest.fixture(scope="session")
def default_net():
    from requisites.model import default_network

    return default_network()
