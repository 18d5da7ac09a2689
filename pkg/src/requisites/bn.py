"""Discrete Bayesian networks with exact inference by variable elimination.

A network is a DAG over named variables with a conditional probability
table (CPT) per variable.  The joint distribution is the product of the
CPT entries selected by a full assignment.  Networks are validated and
frozen at construction time; every inference operation is a pure
function, so one network can be shared freely across threads.

CPT rows are laid out in row-major order over the parent state
combinations: the last-listed parent varies fastest.  See
docs/model-format.md for the on-disk representation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

ROW_SUM_TOL = 1e-9


class BayesNetError(Exception):
    """Base class for all model construction and inference errors."""


class UnknownVariable(BayesNetError):
    """A variable id does not exist in the network."""


class IllegalState(BayesNetError):
    """A state label is not legal for its variable."""


class CycleDetected(BayesNetError):
    """The edge set contains a directed cycle."""


class CptMismatch(BayesNetError):
    """A CPT disagrees with the structure or has the wrong shape."""


class RowNotNormalized(BayesNetError):
    """A CPT row does not sum to 1 within tolerance."""


class IncompleteAssignment(BayesNetError):
    """A joint-probability query did not assign every variable."""


class InconsistentEvidence(BayesNetError):
    """The observed evidence has probability zero under the model."""


class ClassObserved(BayesNetError):
    """The class variable of a prediction already carries evidence."""


@dataclass(frozen=True)
class Variable:
    """A named discrete variable with a fixed, ordered state space."""

    id: str
    states: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) < 2:
            raise IllegalState(f"variable {self.id!r} needs at least 2 states")
        if len(set(self.states)) != len(self.states):
            raise IllegalState(f"variable {self.id!r} has duplicate state labels")

    def state_index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise IllegalState(
                f"{state!r} is not a state of {self.id!r} (states: {list(self.states)})"
            ) from None


@dataclass(frozen=True)
class NetworkStructure:
    """DAG skeleton: variables plus (parent, child) edges."""

    variables: tuple[Variable, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "edges", tuple((p, c) for p, c in self.edges))
        ids = [v.id for v in self.variables]
        if len(set(ids)) != len(ids):
            raise CptMismatch("duplicate variable ids")
        known = set(ids)
        seen: set[tuple[str, str]] = set()
        for parent, child in self.edges:
            if parent not in known or child not in known:
                raise UnknownVariable(f"edge ({parent!r}, {child!r}) references unknown variable")
            if parent == child:
                raise CycleDetected(f"self-loop on {parent!r}")
            if (parent, child) in seen:
                raise CptMismatch(f"duplicate edge ({parent!r}, {child!r})")
            seen.add((parent, child))
        _check_acyclic(known, self.edges)

    def parents_of(self, var: str) -> tuple[str, ...]:
        return tuple(p for p, c in self.edges if c == var)

    def children_of(self, var: str) -> tuple[str, ...]:
        return tuple(c for p, c in self.edges if p == var)


def _check_acyclic(ids: set[str], edges: Iterable[tuple[str, str]]) -> None:
    """Kahn's algorithm; raises CycleDetected when no topological order exists."""
    out: dict[str, list[str]] = {v: [] for v in ids}
    indeg = {v: 0 for v in ids}
    for parent, child in edges:
        out[parent].append(child)
        indeg[child] += 1
    queue = [v for v, d in indeg.items() if d == 0]
    done = 0
    while queue:
        node = queue.pop()
        done += 1
        for child in out[node]:
            indeg[child] -= 1
            if indeg[child] == 0:
                queue.append(child)
    if done != len(ids):
        stuck = sorted(v for v, d in indeg.items() if d > 0)
        raise CycleDetected(f"directed cycle through {stuck}")


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table P(child | parents).

    ``table`` has one row per parent-state combination (row-major, last
    parent varies fastest) and one column per child state.
    """

    child: str
    parents: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "parents", tuple(self.parents))
        arr = np.array(self.table, dtype=float, copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        arr.setflags(write=False)
        object.__setattr__(self, "table", arr)

    def validate(self, variables: Mapping[str, Variable]) -> None:
        if self.child not in variables:
            raise UnknownVariable(f"CPT child {self.child!r} is not a network variable")
        for p in self.parents:
            if p not in variables:
                raise UnknownVariable(f"CPT for {self.child!r} names unknown parent {p!r}")
        n_rows = 1
        for p in self.parents:
            n_rows *= len(variables[p].states)
        n_cols = len(variables[self.child].states)
        if self.table.shape != (n_rows, n_cols):
            raise CptMismatch(
                f"CPT for {self.child!r} has shape {self.table.shape}, "
                f"expected ({n_rows}, {n_cols})"
            )
        if np.any(self.table < 0.0) or np.any(self.table > 1.0):
            raise RowNotNormalized(f"CPT for {self.child!r} has entries outside [0, 1]")
        sums = self.table.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
        if bad.size:
            raise RowNotNormalized(
                f"CPT row {int(bad[0])} for {self.child!r} sums to {sums[bad[0]]!r}"
            )


@dataclass(frozen=True)
class Posterior:
    """Normalized distribution over one variable's states."""

    variable: str
    probabilities: dict[str, float]

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(self.probabilities.values())

    def argmax(self) -> str:
        """State with the highest probability; ties go to the earliest state."""
        best_state, best_p = None, -1.0
        for state, p in self.probabilities.items():
            if p > best_p:
                best_state, best_p = state, p
        assert best_state is not None
        return best_state


@dataclass(frozen=True)
class Factor:
    """Inference workspace: non-negative values over the joint states of a scope."""

    scope: tuple[str, ...]
    values: np.ndarray  # one axis per scope variable, in scope order


class BayesianNetwork:
    """Validated, immutable network: structure plus one CPT per variable.

    Construct through :func:`build_network`, which performs all
    validation.  Instances expose read-only views only.
    """

    def __init__(self, structure: NetworkStructure, cpts: Mapping[str, Cpt]):
        self._structure = structure
        self._cpts = dict(cpts)
        self._vars = {v.id: v for v in structure.variables}
        self._order = tuple(v.id for v in structure.variables)
        self._card = {v.id: len(v.states) for v in structure.variables}
        self._children: dict[str, tuple[str, ...]] = {
            v: structure.children_of(v) for v in self._order
        }

    @property
    def structure(self) -> NetworkStructure:
        return self._structure

    @property
    def variable_ids(self) -> tuple[str, ...]:
        return self._order

    def variable(self, var: str) -> Variable:
        try:
            return self._vars[var]
        except KeyError:
            raise UnknownVariable(f"unknown variable {var!r}") from None

    def cpt(self, var: str) -> Cpt:
        self.variable(var)
        return self._cpts[var]

    def cpt_factor(self, var: str) -> Factor:
        """CPT reshaped to a factor over (parents..., child)."""
        cpt = self._cpts[var]
        scope = cpt.parents + (var,)
        shape = tuple(self._card[v] for v in scope)
        return Factor(scope, self._cpts[var].table.reshape(shape))

    # convenience wrappers over the module-level operations
    def posterior(self, evidence: Mapping[str, str], target: str) -> Posterior:
        return posterior(self, evidence, target)

    def markov_blanket(self, var: str) -> frozenset[str]:
        return markov_blanket(self, var)


def build_network(
    variables: Iterable[Variable],
    edges: Iterable[tuple[str, str]],
    cpts: Iterable[Cpt],
) -> BayesianNetwork:
    """Validate everything and return an immutable network.

    Raises CycleDetected, CptMismatch, RowNotNormalized or
    UnknownVariable on the first violation found.
    """
    structure = NetworkStructure(tuple(variables), tuple(edges))
    var_map = {v.id: v for v in structure.variables}
    cpt_map: dict[str, Cpt] = {}
    for cpt in cpts:
        if cpt.child in cpt_map:
            raise CptMismatch(f"two CPTs given for {cpt.child!r}")
        cpt_map[cpt.child] = cpt
    missing = [v for v in var_map if v not in cpt_map]
    if missing:
        raise CptMismatch(f"no CPT for {sorted(missing)}")
    extra = [c for c in cpt_map if c not in var_map]
    if extra:
        raise UnknownVariable(f"CPT for unknown variable {sorted(extra)}")
    for var in var_map:
        cpt = cpt_map[var]
        structural = set(structure.parents_of(var))
        if set(cpt.parents) != structural or len(cpt.parents) != len(structural):
            raise CptMismatch(
                f"CPT parents {list(cpt.parents)} for {var!r} do not match "
                f"structural parents {sorted(structural)}"
            )
        cpt.validate(var_map)
    return BayesianNetwork(structure, cpt_map)


def _validate_evidence(net: BayesianNetwork, evidence: Mapping[str, str]) -> dict[str, str]:
    checked: dict[str, str] = {}
    for var, state in evidence.items():
        variable = net.variable(var)
        variable.state_index(state)
        checked[var] = state
    return checked


def joint_probability(net: BayesianNetwork, assignment: Mapping[str, str]) -> float:
    """Probability of one full assignment: the product of selected CPT entries."""
    missing = [v for v in net.variable_ids if v not in assignment]
    if missing:
        raise IncompleteAssignment(f"assignment misses {sorted(missing)}")
    _validate_evidence(net, {v: assignment[v] for v in net.variable_ids})
    prob = 1.0
    for var in net.variable_ids:
        cpt = net.cpt(var)
        row = 0
        for parent in cpt.parents:
            row = row * len(net.variable(parent).states) + net.variable(
                parent
            ).state_index(assignment[parent])
        col = net.variable(var).state_index(assignment[var])
        prob *= float(cpt.table[row, col])
    return prob


def _reduce(factor: Factor, evidence: Mapping[str, int]) -> Factor:
    """Slice observed variables out of a factor's scope."""
    scope = list(factor.scope)
    values = factor.values
    for var in factor.scope:
        if var in evidence:
            axis = scope.index(var)
            values = np.take(values, evidence[var], axis=axis)
            scope.pop(axis)
    return Factor(tuple(scope), values)


def _product(a: Factor, b: Factor, card: Mapping[str, int]) -> Factor:
    scope = a.scope + tuple(v for v in b.scope if v not in a.scope)
    return Factor(scope, _aligned(a, scope, card) * _aligned(b, scope, card))


def _aligned(factor: Factor, scope: Sequence[str], card: Mapping[str, int]) -> np.ndarray:
    """Broadcast a factor's values over the axes of a larger scope."""
    order = sorted(range(len(factor.scope)), key=lambda i: scope.index(factor.scope[i]))
    values = factor.values.transpose(order)
    shape = tuple(card[v] if v in factor.scope else 1 for v in scope)
    return values.reshape(shape)


def _sum_out(factor: Factor, var: str) -> Factor:
    axis = factor.scope.index(var)
    scope = factor.scope[:axis] + factor.scope[axis + 1 :]
    return Factor(scope, factor.values.sum(axis=axis))


def min_degree_order(scopes: Iterable[Sequence[str]], hidden: Iterable[str]) -> list[str]:
    """Elimination order by the min-degree heuristic on the interaction graph.

    Ties break lexicographically so the order is deterministic.
    """
    neighbors: dict[str, set[str]] = {}
    for scope in scopes:
        for v in scope:
            neighbors.setdefault(v, set()).update(u for u in scope if u != v)
    remaining = set(hidden)
    order: list[str] = []
    while remaining:
        var = min(remaining, key=lambda v: (len(neighbors.get(v, set()) & remaining), v))
        around = neighbors.get(var, set())
        for u in around:
            neighbors.setdefault(u, set()).update(w for w in around if w != u)
            neighbors[u].discard(var)
        order.append(var)
        remaining.discard(var)
    return order


def _eliminate(
    net: BayesianNetwork,
    evidence: Mapping[str, str],
    keep: Sequence[str],
    elimination_order: Sequence[str] | None,
) -> Factor:
    """Reduce by evidence, then sum out everything not kept."""
    card = net._card
    ev_idx = {v: net.variable(v).state_index(s) for v, s in evidence.items()}
    factors = [_reduce(net.cpt_factor(v), ev_idx) for v in net.variable_ids]
    hidden = [v for v in net.variable_ids if v not in keep and v not in ev_idx]
    if elimination_order is None:
        order = min_degree_order([f.scope for f in factors], hidden)
    else:
        order = list(elimination_order)
        if sorted(order) != sorted(hidden):
            raise BayesNetError(
                f"elimination order must cover exactly the hidden variables {sorted(hidden)}"
            )
    for var in order:
        related = [f for f in factors if var in f.scope]
        if not related:
            continue
        factors = [f for f in factors if var not in f.scope]
        product = related[0]
        for f in related[1:]:
            product = _product(f, product, card)
        factors.append(_sum_out(product, var))
    result = Factor((), np.array(1.0))
    for f in factors:
        result = _product(result, f, card)
    return result


def posterior(
    net: BayesianNetwork,
    evidence: Mapping[str, str],
    target: str,
    *,
    elimination_order: Sequence[str] | None = None,
) -> Posterior:
    """Exact conditional distribution P(target | evidence).

    An observed target yields a point mass on its observed state.  Raises
    InconsistentEvidence when the evidence has probability zero under the
    model; the caller sees the conflict instead of a silently uniform
    answer.
    """
    evidence = _validate_evidence(net, evidence)
    variable = net.variable(target)
    if target in evidence:
        norm = _eliminate(net, evidence, (), elimination_order)
        if float(norm.values) <= 0.0:
            raise InconsistentEvidence(f"evidence {evidence!r} has probability 0")
        probs = {s: (1.0 if s == evidence[target] else 0.0) for s in variable.states}
        return Posterior(target, probs)
    factor = _eliminate(net, evidence, (target,), elimination_order)
    values = _aligned(factor, (target,), net._card).reshape(-1)
    total = float(values.sum())
    if total <= 0.0:
        raise InconsistentEvidence(f"evidence {evidence!r} has probability 0")
    normalized = values / total
    return Posterior(target, {s: float(p) for s, p in zip(variable.states, normalized)})


def prior_marginals(net: BayesianNetwork) -> dict[str, Posterior]:
    """Marginal distribution of every variable under empty evidence."""
    return {var: posterior(net, {}, var) for var in net.variable_ids}


def markov_blanket(net: BayesianNetwork, var: str) -> frozenset[str]:
    """Parents, children and children's other parents of ``var``.

    Observing the whole blanket makes every other variable irrelevant to
    ``var``'s posterior.
    """
    net.variable(var)
    structure = net.structure
    blanket: set[str] = set(structure.parents_of(var))
    for child in structure.children_of(var):
        blanket.add(child)
        blanket.update(structure.parents_of(child))
    blanket.discard(var)
    return frozenset(blanket)


def map_predict(net: BayesianNetwork, evidence: Mapping[str, str], class_var: str) -> str:
    """State of ``class_var`` with the highest posterior probability.

    Exact ties resolve to the earliest state in the variable's declared
    order, so the prediction is a pure function of its inputs.
    """
    evidence = _validate_evidence(net, evidence)
    net.variable(class_var)
    if class_var in evidence:
        raise ClassObserved(f"{class_var!r} already carries evidence")
    return posterior(net, evidence, class_var).argmax()
