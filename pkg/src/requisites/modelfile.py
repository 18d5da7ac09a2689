"""On-disk formats: network definitions, parameter sets, constraint files.

All three are YAML documents; docs/model-format.md is the normative
description.  CPT rows are stored row-major over the parent state
combinations with the last-listed parent varying fastest.  Floats are
written with full shortest round-trip precision, so load(save(x))
reproduces every probability bit for bit.

YAML 1.1 parses bare ``yes``/``no`` as booleans; since those are state
labels here, the loader folds booleans back to the ``yes``/``no``
tokens.  Shipped files quote them anyway.
"""

from __future__ import annotations

import os
from typing import Any, IO

import yaml

from .bn import BayesianNetwork, BayesNetError, Cpt, Variable, build_network
from .calibrate import CalibrationConstraint
from .model import CptParamSet

NETWORK_FORMAT = "bn-network/1"
PARAMS_FORMAT = "bn-params/1"
CONSTRAINTS_FORMAT = "bn-constraints/1"


class ModelFormatError(BayesNetError):
    """The document is not a well-formed model/params/constraints file."""


class _FlowList(list):
    """Marker: dump this list inline ([a, b, c]) instead of block style."""


def _represent_flow_list(dumper: yaml.Dumper, data: "_FlowList"):
    return dumper.represent_sequence("tag:yaml.org,2002:seq", list(data), flow_style=True)


yaml.SafeDumper.add_representer(_FlowList, _represent_flow_list)


def _label(value: Any, where: str) -> str:
    """State/id token from a YAML scalar; bools fold back to yes/no."""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, str):
        return value
    raise ModelFormatError(f"{where}: expected a name token, got {value!r}")


def _load_yaml(source: str | os.PathLike | IO[str], expected_format: str) -> dict:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as handle:
            text = handle.read()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ModelFormatError(f"not parseable YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("top level must be a mapping")
    if doc.get("format") != expected_format:
        raise ModelFormatError(
            f"expected format {expected_format!r}, found {doc.get('format')!r}"
        )
    return doc


def _dump_yaml(doc: dict, target: str | os.PathLike | IO[str]) -> None:
    text = yaml.safe_dump(doc, sort_keys=False, width=100)
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", encoding="utf-8") as handle:
            handle.write(text)


# --- network definitions --------------------------------------------------

def load_network(source: str | os.PathLike | IO[str]) -> BayesianNetwork:
    """Read a network definition and validate it via build_network."""
    doc = _load_yaml(source, NETWORK_FORMAT)
    raw_vars = doc.get("variables")
    if not isinstance(raw_vars, list) or not raw_vars:
        raise ModelFormatError("'variables' must be a non-empty list")
    variables = []
    for entry in raw_vars:
        if not isinstance(entry, dict) or "id" not in entry or "states" not in entry:
            raise ModelFormatError(f"variable entry needs 'id' and 'states': {entry!r}")
        states = entry["states"]
        if not isinstance(states, list):
            raise ModelFormatError(f"'states' of {entry['id']!r} must be a list")
        variables.append(
            Variable(
                _label(entry["id"], "variable id"),
                tuple(_label(s, "state") for s in states),
            )
        )
    edges = []
    for pair in doc.get("edges") or []:
        if not isinstance(pair, list) or len(pair) != 2:
            raise ModelFormatError(f"edge must be a [parent, child] pair: {pair!r}")
        edges.append((_label(pair[0], "edge parent"), _label(pair[1], "edge child")))
    cpts = []
    for entry in doc.get("cpts") or []:
        if not isinstance(entry, dict) or "child" not in entry or "rows" not in entry:
            raise ModelFormatError(f"cpt entry needs 'child' and 'rows': {entry!r}")
        rows = entry["rows"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ModelFormatError(f"cpt rows for {entry['child']!r} must be lists")
        cpts.append(
            Cpt(
                child=_label(entry["child"], "cpt child"),
                parents=tuple(_label(p, "cpt parent") for p in entry.get("parents") or []),
                table=[[float(x) for x in row] for row in rows],
            )
        )
    return build_network(variables, edges, cpts)


def save_network(net: BayesianNetwork, target: str | os.PathLike | IO[str], name: str = "") -> None:
    doc: dict[str, Any] = {"format": NETWORK_FORMAT}
    if name:
        doc["name"] = name
    doc["variables"] = [
        {"id": v.id, "states": _FlowList(v.states)} for v in net.structure.variables
    ]
    doc["edges"] = [_FlowList(edge) for edge in net.structure.edges]
    doc["cpts"] = [
        {
            "child": var,
            "parents": _FlowList(net.cpt(var).parents),
            "rows": [_FlowList(float(x) for x in row) for row in net.cpt(var).table],
        }
        for var in net.variable_ids
    ]
    _dump_yaml(doc, target)


# --- parameter sets (the compact Requisites CPT dialect) -------------------

def load_params(source: str | os.PathLike | IO[str]) -> CptParamSet:
    doc = _load_yaml(source, PARAMS_FORMAT)
    raw_priors = doc.get("priors")
    raw_causes = doc.get("cause_weights")
    if not isinstance(raw_priors, dict) or not isinstance(raw_causes, dict):
        raise ModelFormatError("'priors' and 'cause_weights' mappings are required")
    priors = {}
    for var, row in raw_priors.items():
        if not isinstance(row, list):
            raise ModelFormatError(f"prior row for {var!r} must be a list")
        priors[_label(var, "prior variable")] = tuple(float(x) for x in row)
    weights: dict[str, dict[str, dict[str, float]]] = {}
    leaks: dict[str, float] = {}
    for child, entry in raw_causes.items():
        child = _label(child, "cause child")
        if not isinstance(entry, dict) or "leak" not in entry or "weights" not in entry:
            raise ModelFormatError(f"cause entry for {child!r} needs 'leak' and 'weights'")
        leaks[child] = float(entry["leak"])
        weights[child] = {}
        for parent, per_state in entry["weights"].items():
            if not isinstance(per_state, dict):
                raise ModelFormatError(f"weights for {child!r}/{parent!r} must be a mapping")
            weights[child][_label(parent, "cause parent")] = {
                _label(state, "weight state"): float(w) for state, w in per_state.items()
            }
    params = CptParamSet(priors=priors, weights=weights, leaks=leaks)
    params.validate()
    return params


def save_params(params: CptParamSet, target: str | os.PathLike | IO[str]) -> None:
    params.validate()
    doc: dict[str, Any] = {"format": PARAMS_FORMAT}
    doc["priors"] = {var: _FlowList(float(x) for x in row) for var, row in params.priors.items()}
    doc["cause_weights"] = {
        child: {
            "leak": float(params.leaks[child]),
            "weights": {
                parent: {state: float(w) for state, w in per_state.items()}
                for parent, per_state in params.weights[child].items()
            },
        }
        for child in params.weights
    }
    _dump_yaml(doc, target)


# --- calibration constraint files ------------------------------------------

def load_constraints(source: str | os.PathLike | IO[str]) -> list[CalibrationConstraint]:
    doc = _load_yaml(source, CONSTRAINTS_FORMAT)
    raw = doc.get("constraints")
    if raw is None:
        raise ModelFormatError("'constraints' list is required (may be empty)")
    if not isinstance(raw, list):
        raise ModelFormatError("'constraints' must be a list")
    constraints = []
    for entry in raw:
        if not isinstance(entry, dict):
            raise ModelFormatError(f"constraint must be a mapping: {entry!r}")
        missing = {"target", "state", "probability"} - set(entry)
        if missing:
            raise ModelFormatError(f"constraint misses {sorted(missing)}: {entry!r}")
        evidence = entry.get("evidence") or {}
        if not isinstance(evidence, dict):
            raise ModelFormatError(f"constraint evidence must be a mapping: {entry!r}")
        constraints.append(
            CalibrationConstraint(
                evidence=tuple(
                    (_label(var, "evidence variable"), _label(state, "evidence state"))
                    for var, state in evidence.items()
                ),
                target=_label(entry["target"], "constraint target"),
                target_state=_label(entry["state"], "constraint state"),
                target_prob=float(entry["probability"]),
                weight=float(entry.get("weight", 1.0)),
            )
        )
    return constraints
