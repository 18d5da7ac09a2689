"""Fits the Requisites CPT parameters to posterior targets.

A constraint pins P(target = state | evidence) to a value; the objective
is the weighted sum of squared gaps over all constraints.  The search is
derivative-free: coordinate hill-climbing with step halving, restarted
from random points until the evaluation budget runs out.  Everything is
driven by one seeded generator, so a (seed, budget, constraints) triple
always reproduces the same result bit for bit.

Objective evaluations use a dense joint table instead of the variable
elimination engine; with eleven small variables that is both exact and
fast enough to afford thousands of evaluations per second.  Equality of
the two inference routes is covered by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .bn import IllegalState, UnknownVariable
from .model import (
    CLASS_VARIABLE,
    VARIABLES,
    CptParamSet,
    expand_params,
    initial_params,
    parent_order,
)

_STATES = dict(VARIABLES)
_VAR_AXIS = {var: i for i, (var, _) in enumerate(VARIABLES)}

DEFAULT_SEED = 20170904
DEFAULT_BUDGET = 60_000

_INITIAL_STEP = 0.25
_MIN_STEP = 1e-4
# Search stays clear of the degenerate endpoints so a calibrated network
# never assigns probability zero to any evidence configuration.
_LOW, _HIGH = 1e-3, 1.0 - 1e-3


@dataclass(frozen=True)
class CalibrationConstraint:
    """Target posterior probability for one evidence configuration."""

    evidence: tuple[tuple[str, str], ...]
    target: str
    target_state: str
    target_prob: float
    weight: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "evidence", tuple(self.evidence))
        for var, state in self.evidence:
            if var not in _STATES:
                raise UnknownVariable(f"constraint evidence names unknown variable {var!r}")
            if state not in _STATES[var]:
                raise IllegalState(f"{state!r} is not a state of {var!r}")
        if self.target not in _STATES:
            raise UnknownVariable(f"constraint target {self.target!r} unknown")
        if self.target_state not in _STATES[self.target]:
            raise IllegalState(f"{self.target_state!r} is not a state of {self.target!r}")
        if self.target in dict(self.evidence):
            raise IllegalState(f"constraint target {self.target!r} must be unobserved")
        if not 0.0 <= self.target_prob <= 1.0:
            raise IllegalState(f"target probability {self.target_prob} outside [0, 1]")
        if self.weight < 0.0:
            raise IllegalState(f"constraint weight {self.weight} must be non-negative")


@dataclass(frozen=True)
class CalibrationResult:
    params: CptParamSet
    residual: float
    evaluations: int
    trace: tuple[float, ...]


_FULL_SHAPE = tuple(len(states) for _, states in VARIABLES)


def _joint_table(tables: Mapping[str, np.ndarray]) -> np.ndarray:
    """Dense joint distribution with one axis per variable, in declared order."""
    n = len(VARIABLES)
    joint = np.ones(_FULL_SHAPE)
    for var, states in VARIABLES:
        scope = parent_order(var) + (var,)
        shape = [1] * n
        for member in scope:
            shape[_VAR_AXIS[member]] = len(_STATES[member])
        table = tables[var].reshape([len(_STATES[m]) for m in scope])
        axes = [_VAR_AXIS[m] for m in scope]
        order = np.argsort(axes)
        np.multiply(joint, table.transpose(order).reshape(shape), out=joint)
    return joint


@lru_cache(maxsize=16)
def _marginal_plan(constraints: tuple[CalibrationConstraint, ...]):
    """Per constraint: flat joint-cell indices grouped by target state.

    Marginalizing then becomes a gather-and-sum over the flattened joint,
    which is much cheaper than slicing an eleven-axis array per call.
    """
    grids = np.indices(_FULL_SHAPE)
    plans = []
    for c in constraints:
        selected = np.ones(_FULL_SHAPE, dtype=bool)
        for var, state in c.evidence:
            selected &= grids[_VAR_AXIS[var]] == _STATES[var].index(state)
        target_grid = grids[_VAR_AXIS[c.target]]
        by_state = tuple(
            np.flatnonzero(selected & (target_grid == k))
            for k in range(len(_STATES[c.target]))
        )
        plans.append((by_state, _STATES[c.target].index(c.target_state)))
    return tuple(plans)


def constraint_posterior(tables: Mapping[str, np.ndarray], c: CalibrationConstraint) -> float:
    """P(target = state | evidence) read off the dense joint."""
    flat = _joint_table(tables).reshape(-1)
    (plan,) = _marginal_plan((c,))
    return _posterior_from_plan(flat, plan)


def _posterior_from_plan(flat_joint: np.ndarray, plan) -> float:
    by_state, target_index = plan
    sums = [float(flat_joint[idx].sum()) for idx in by_state]
    total = sum(sums)
    if total <= 0.0:
        return float("nan")
    return sums[target_index] / total


def objective(params: CptParamSet, constraints: Sequence[CalibrationConstraint]) -> float:
    """Weighted sum of squared posterior gaps; the quantity calibrate minimizes."""
    tables = expand_params(params)
    return _objective_from_tables(tables, tuple(constraints))


def _objective_from_tables(
    tables: Mapping[str, np.ndarray], constraints: tuple[CalibrationConstraint, ...]
) -> float:
    flat = _joint_table(tables).reshape(-1)
    total = 0.0
    for c, plan in zip(constraints, _marginal_plan(constraints)):
        p = _posterior_from_plan(flat, plan)
        if np.isnan(p):
            return float("inf")
        total += c.weight * (p - c.target_prob) ** 2
    return total


def calibrate(
    constraints: Sequence[CalibrationConstraint],
    seed: int = DEFAULT_SEED,
    budget: int = DEFAULT_BUDGET,
    start: CptParamSet | None = None,
) -> CalibrationResult:
    """Minimize the constraint objective within a fixed evaluation budget.

    Returns the best parameters found; the residual never exceeds the
    starting residual, and the per-sweep trace of the best objective is
    non-increasing.  An empty constraint list returns the start unchanged.
    """
    if budget < 1:
        raise IllegalState(f"budget must be >= 1, got {budget}")
    start_params = start if start is not None else initial_params()
    if not constraints:
        return CalibrationResult(
            params=start_params, residual=0.0, evaluations=0, trace=(0.0,)
        )

    rng = np.random.default_rng(seed)
    x = np.clip(start_params.to_vector(), _LOW, _HIGH)
    evals = 0

    def f(vec: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        return objective(CptParamSet.from_vector(vec), constraints)

    best_x = x.copy()
    best_f = f(x)
    trace = [best_f]

    while evals < budget:
        current = x.copy()
        current_f = f(current) if not np.array_equal(current, best_x) else best_f
        step = _INITIAL_STEP
        while step >= _MIN_STEP and evals < budget:
            improved = False
            coords = rng.permutation(current.size)
            for i in coords:
                if evals >= budget:
                    break
                for direction in (1.0, -1.0):
                    candidate = float(np.clip(current[i] + direction * step, _LOW, _HIGH))
                    if candidate == current[i]:
                        continue
                    trial = current.copy()
                    trial[i] = candidate
                    value = f(trial)
                    if value < current_f:
                        current, current_f = trial, value
                        improved = True
                        break
                    if evals >= budget:
                        break
            if current_f < best_f:
                best_x, best_f = current.copy(), current_f
            trace.append(best_f)
            if not improved:
                step /= 2.0
        # restart from a fresh random point, keeping the incumbent
        x = rng.uniform(_LOW, _HIGH, size=current.size)

    return CalibrationResult(
        params=CptParamSet.from_vector(best_x),
        residual=best_f,
        evaluations=evals,
        trace=tuple(trace),
    )
