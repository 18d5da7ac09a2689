"""The Requisites network: SRS revision-need prediction.

Eleven discrete variables describe the state of a software requirements
specification; the class variable ``degree_of_revision`` says whether
another discover-document-validate iteration is needed.

CPTs are not stored as free tables.  Root variables carry explicit
priors; every other variable uses a compact weighted-cause scheme (a
graded noisy-OR): each parent state contributes a weight in [0, 1], a
leak term covers unmodelled causes, and the combined activation is
spread over the child's ordered states.  Weights are forced to be
monotone along each parent's declared influence direction, so the
documented qualitative relationships (more negotiation means less
specificity, low expertise means more unclear cost/benefit, and so on)
hold for every parameter setting, not just the shipped one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .bn import (
    BayesianNetwork,
    Cpt,
    IllegalState,
    Posterior,
    UnknownVariable,
    Variable,
    build_network,
    posterior,
)

CLASS_VARIABLE = "degree_of_revision"

#: Variable ids with their ordered state spaces.
VARIABLES: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("stakeholders_expertise", ("high", "medium", "low")),
    ("domain_expertise", ("high", "medium", "low")),
    ("reused_requirement", ("many", "few", "none")),
    ("unexpected_dependencies", ("yes", "no")),
    ("specificity", ("high", "medium", "low")),
    ("unclear_cost_benefit", ("high", "medium", "low")),
    ("degree_of_commitment", ("high", "medium", "low")),
    ("homogeneity_of_description", ("yes", "no")),
    ("requirement_completeness", ("high", "medium", "low")),
    ("requirement_variability", ("high", "medium", "low")),
    (CLASS_VARIABLE, ("yes", "no")),
)

#: (parent, child) pairs; the per-child parent order below is normative
#: for CPT row layout.
EDGES: tuple[tuple[str, str], ...] = (
    ("degree_of_commitment", "specificity"),
    ("stakeholders_expertise", "unclear_cost_benefit"),
    ("domain_expertise", "requirement_completeness"),
    ("stakeholders_expertise", "requirement_completeness"),
    ("domain_expertise", "homogeneity_of_description"),
    ("stakeholders_expertise", "homogeneity_of_description"),
    ("unexpected_dependencies", "requirement_variability"),
    ("unclear_cost_benefit", "requirement_variability"),
    ("requirement_completeness", "requirement_variability"),
    ("degree_of_commitment", "requirement_variability"),
    ("specificity", CLASS_VARIABLE),
    ("homogeneity_of_description", CLASS_VARIABLE),
    ("requirement_variability", CLASS_VARIABLE),
    ("requirement_completeness", CLASS_VARIABLE),
    ("reused_requirement", CLASS_VARIABLE),
)

ROOT_VARIABLES: tuple[str, ...] = (
    "stakeholders_expertise",
    "domain_expertise",
    "reused_requirement",
    "unexpected_dependencies",
    "degree_of_commitment",
)

#: For each weighted child: its child states ordered from least to most
#: activated, and per parent the parent states ordered from weakest to
#: strongest influence.  Both orders fix the direction of the qualitative
#: relationships encoded by the expansion.
@dataclass(frozen=True)
class CauseSpec:
    child: str
    activation_order: tuple[str, ...]
    parent_orders: tuple[tuple[str, tuple[str, ...]], ...]

    @property
    def parents(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.parent_orders)


CAUSE_SPECS: tuple[CauseSpec, ...] = (
    # heavier negotiation erodes shared meaning
    CauseSpec(
        "specificity",
        activation_order=("high", "medium", "low"),
        parent_orders=(("degree_of_commitment", ("low", "medium", "high")),),
    ),
    # inexperienced stakeholders propose requirements without clear value
    CauseSpec(
        "unclear_cost_benefit",
        activation_order=("low", "medium", "high"),
        parent_orders=(("stakeholders_expertise", ("high", "medium", "low")),),
    ),
    CauseSpec(
        "homogeneity_of_description",
        activation_order=("yes", "no"),
        parent_orders=(
            ("domain_expertise", ("high", "medium", "low")),
            ("stakeholders_expertise", ("high", "medium", "low")),
        ),
    ),
    CauseSpec(
        "requirement_completeness",
        activation_order=("high", "medium", "low"),
        parent_orders=(
            ("domain_expertise", ("high", "medium", "low")),
            ("stakeholders_expertise", ("high", "medium", "low")),
        ),
    ),
    CauseSpec(
        "requirement_variability",
        activation_order=("low", "medium", "high"),
        parent_orders=(
            ("unexpected_dependencies", ("no", "yes")),
            ("unclear_cost_benefit", ("low", "medium", "high")),
            ("requirement_completeness", ("high", "medium", "low")),
            ("degree_of_commitment", ("low", "medium", "high")),
        ),
    ),
    CauseSpec(
        CLASS_VARIABLE,
        activation_order=("no", "yes"),
        parent_orders=(
            ("specificity", ("high", "medium", "low")),
            ("homogeneity_of_description", ("yes", "no")),
            ("requirement_variability", ("low", "medium", "high")),
            ("requirement_completeness", ("high", "medium", "low")),
            ("reused_requirement", ("many", "few", "none")),
        ),
    ),
)

_STATES = dict(VARIABLES)
_CAUSE_BY_CHILD = {spec.child: spec for spec in CAUSE_SPECS}


@dataclass(frozen=True)
class CptParamSet:
    """Compact parameterization of all Requisites CPTs.

    ``priors`` hold one raw non-negative row per root variable
    (normalized on expansion).  ``weights`` hold one number in [0, 1]
    per (child, parent, parent state); ``leaks`` one per weighted child.
    """

    priors: dict[str, tuple[float, ...]]
    weights: dict[str, dict[str, dict[str, float]]]
    leaks: dict[str, float]

    def validate(self) -> None:
        for var in ROOT_VARIABLES:
            row = self.priors.get(var)
            if row is None or len(row) != len(_STATES[var]):
                raise IllegalState(f"prior row for {var!r} missing or wrong length")
            if any(p < 0.0 for p in row) or sum(row) <= 0.0:
                raise IllegalState(f"prior row for {var!r} must be non-negative, not all zero")
        for spec in CAUSE_SPECS:
            child_w = self.weights.get(spec.child)
            if child_w is None:
                raise IllegalState(f"no weights for {spec.child!r}")
            for parent, order in spec.parent_orders:
                per_state = child_w.get(parent)
                if per_state is None or set(per_state) != set(order):
                    raise IllegalState(
                        f"weights for {spec.child!r} must cover states of {parent!r}"
                    )
                for state, w in per_state.items():
                    if not 0.0 <= w <= 1.0:
                        raise IllegalState(
                            f"weight {spec.child!r}/{parent!r}={state!r} outside [0, 1]: {w}"
                        )
            if not 0.0 <= self.leaks.get(spec.child, -1.0) <= 1.0:
                raise IllegalState(f"leak for {spec.child!r} outside [0, 1]")

    # --- flat-vector view used by the calibrator -------------------------
    def to_vector(self) -> np.ndarray:
        values: list[float] = []
        for var in ROOT_VARIABLES:
            values.extend(self.priors[var])
        for spec in CAUSE_SPECS:
            values.append(self.leaks[spec.child])
            for parent, order in spec.parent_orders:
                values.extend(self.weights[spec.child][parent][s] for s in order)
        return np.array(values, dtype=float)

    @classmethod
    def from_vector(cls, vector: Sequence[float]) -> "CptParamSet":
        it = iter(float(x) for x in vector)
        priors = {
            var: tuple(next(it) for _ in _STATES[var]) for var in ROOT_VARIABLES
        }
        weights: dict[str, dict[str, dict[str, float]]] = {}
        leaks: dict[str, float] = {}
        for spec in CAUSE_SPECS:
            leaks[spec.child] = next(it)
            weights[spec.child] = {
                parent: {s: next(it) for s in order} for parent, order in spec.parent_orders
            }
        leftovers = sum(1 for _ in it)
        if leftovers:
            raise IllegalState(f"parameter vector has {leftovers} extra entries")
        return cls(priors=priors, weights=weights, leaks=leaks)


def vector_length() -> int:
    return initial_params().to_vector().size


def initial_params() -> CptParamSet:
    """Documented starting point: uniform priors, mid-range weights."""
    priors = {var: tuple(1.0 / len(_STATES[var]) for _ in _STATES[var]) for var in ROOT_VARIABLES}
    weights = {
        spec.child: {parent: {s: 0.3 for s in order} for parent, order in spec.parent_orders}
        for spec in CAUSE_SPECS
    }
    leaks = {spec.child: 0.1 for spec in CAUSE_SPECS}
    return CptParamSet(priors=priors, weights=weights, leaks=leaks)


def _effective_weights(spec: CauseSpec, params: CptParamSet) -> list[np.ndarray]:
    """Per parent, the raw weights made monotone along the influence order.

    The running maximum keeps every weight in [0, 1] and guarantees that
    a stronger parent state never activates the child less.
    """
    out = []
    for parent, order in spec.parent_orders:
        raw = np.array([params.weights[spec.child][parent][s] for s in order])
        out.append(np.maximum.accumulate(raw))
    return out


def _spread(activation: np.ndarray, n_states: int) -> np.ndarray:
    """Distribute activation a over n ordered states: Binomial(n-1, a)."""
    k = np.arange(n_states)
    coeff = np.array([comb(n_states - 1, int(i)) for i in k], dtype=float)
    a = activation[..., None]
    return coeff * a**k * (1.0 - a) ** (n_states - 1 - k)


def expand_cpt(spec: CauseSpec, params: CptParamSet) -> np.ndarray:
    """Full CPT rows for one weighted child, in row-major parent order."""
    child_states = _STATES[spec.child]
    eff = _effective_weights(spec, params)
    # survival = product over parents of (1 - weight of the selected state)
    survival = np.array(1.0 - params.leaks[spec.child])
    for (parent, order), weights in zip(spec.parent_orders, eff):
        # axis per parent, indexed by the *declared* state order of the parent
        declared = _STATES[parent]
        per_declared = np.array([weights[order.index(s)] for s in declared])
        survival = np.multiply.outer(survival, 1.0 - per_declared)
    activation = 1.0 - survival
    spread = _spread(activation, len(child_states))
    # map activation-ordered columns back to the declared state order
    col_of = {state: i for i, state in enumerate(spec.activation_order)}
    columns = [col_of[s] for s in child_states]
    table = spread[..., columns].reshape(-1, len(child_states))
    return table


def expand_params(params: CptParamSet) -> dict[str, np.ndarray]:
    """All CPT tables (row-major, last parent fastest) from a parameter set."""
    params.validate()
    tables: dict[str, np.ndarray] = {}
    for var in ROOT_VARIABLES:
        row = np.array(params.priors[var], dtype=float)
        tables[var] = (row / row.sum()).reshape(1, -1)
    for spec in CAUSE_SPECS:
        tables[spec.child] = expand_cpt(spec, params)
    return tables


def requisites_variables() -> tuple[Variable, ...]:
    return tuple(Variable(var, states) for var, states in VARIABLES)


def parent_order(child: str) -> tuple[str, ...]:
    spec = _CAUSE_BY_CHILD.get(child)
    return spec.parents if spec else ()


def build_requisites(params: CptParamSet) -> BayesianNetwork:
    """Expand a parameter set into a validated eleven-variable network."""
    tables = expand_params(params)
    cpts = [
        Cpt(child=var, parents=parent_order(var), table=tables[var])
        for var, _ in VARIABLES
    ]
    return build_network(requisites_variables(), EDGES, cpts)


@lru_cache(maxsize=1)
def default_network() -> BayesianNetwork:
    """The shipped, pre-calibrated network.  Cached; safe to share."""
    return build_requisites(default_params())


@lru_cache(maxsize=1)
def default_params() -> CptParamSet:
    from .modelfile import load_params
    from importlib.resources import files

    return load_params(files("requisites.data").joinpath("requisites.params.yaml"))


def evidence_trajectory(
    net: BayesianNetwork, ordered_evidence: Sequence[tuple[str, str]]
) -> list[Posterior]:
    """Class posterior after each prefix of the evidence sequence.

    Element 0 is the prior; element k conditions on the first k items.
    """
    seen: set[str] = set()
    for var, state in ordered_evidence:
        net.variable(var).state_index(state)
        if var in seen:
            raise IllegalState(f"duplicate evidence for {var!r} in trajectory")
        seen.add(var)
    steps: list[Posterior] = []
    evidence: dict[str, str] = {}
    steps.append(posterior(net, evidence, CLASS_VARIABLE))
    for var, state in ordered_evidence:
        evidence[var] = state
        steps.append(posterior(net, evidence, CLASS_VARIABLE))
    return steps
