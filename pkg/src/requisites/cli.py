"""Command-line front end: inspect the model, infer, extract, calibrate, serve.

Exit codes are fixed for scripting: 0 success, 1 environment problems
(unreadable files, port in use), 2 bad input (flags, model files,
datasets, illegal evidence), 3 evidence that is inconsistent with the
model.  Diagnostics go to stderr; stdout carries only the result, which
in ``--format json`` mode is byte-identical across runs for the same
inputs.
"""

from __future__ import annotations

import argparse
import json
import os
import socket
import sys

from .bn import (
    BayesianNetwork,
    BayesNetError,
    InconsistentEvidence,
    markov_blanket,
    posterior,
)
from .calibrate import DEFAULT_BUDGET, DEFAULT_SEED, calibrate
from .dataset import DatasetError, load_dataset
from .interchange import evidence_to_xml
from .metrics import extract_evidence
from .model import CLASS_VARIABLE, default_network
from .modelfile import ModelFormatError, load_constraints, load_network, save_params

EXIT_OK = 0
EXIT_ENVIRONMENT = 1
EXIT_INPUT = 2
EXIT_INCONSISTENT = 3

MODEL_ENV = "REQUISITES_MODEL"
PORT_ENV = "REQUISITES_PORT"


class _CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fail(message: str, code: int) -> "_CliError":
    return _CliError(message, code)


def _load_model(path: str | None) -> BayesianNetwork:
    if path is None:
        path = os.environ.get(MODEL_ENV)
    if path is None:
        return default_network()
    try:
        return load_network(path)
    except OSError as exc:
        raise _fail(f"cannot read model file: {exc}", EXIT_ENVIRONMENT) from exc
    except BayesNetError as exc:
        raise _fail(f"{type(exc).__name__}: {exc}", EXIT_INPUT) from exc


def _parse_evidence(pairs: list[str]) -> dict[str, str]:
    evidence: dict[str, str] = {}
    for pair in pairs:
        var, sep, state = pair.partition("=")
        if not sep or not var or not state:
            raise _fail(f"evidence must be var=state, got {pair!r}", EXIT_INPUT)
        if var in evidence:
            raise _fail(f"duplicate evidence for {var!r}", EXIT_INPUT)
        evidence[var] = state
    return evidence


def _emit(payload: dict, args: argparse.Namespace, table: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for line in table:
            print(line)


def _posterior_lines(name: str, probabilities: dict[str, float]) -> str:
    states = "  ".join(f"{s}={p:.4f}" for s, p in probabilities.items())
    return f"{name:32s} {states}"


# --- subcommands ---------------------------------------------------------

def _cmd_model(args: argparse.Namespace) -> int:
    try:
        net = _load_model(args.model)
    except _CliError as exc:
        if args.action == "validate" and exc.code == EXIT_INPUT:
            print(f"invalid: {exc}", file=sys.stderr)
            return EXIT_INPUT
        raise
    if args.action == "validate":
        message = f"valid: {len(net.variable_ids)} variables, {len(net.structure.edges)} edges"
        _emit(
            {"valid": True, "variables": len(net.variable_ids), "edges": len(net.structure.edges)},
            args,
            [message],
        )
        return EXIT_OK
    lines = ["variables:"]
    for v in net.structure.variables:
        lines.append(f"  {v.id}: {', '.join(v.states)}")
    lines.append("edges:")
    for parent, child in net.structure.edges:
        lines.append(f"  {parent} -> {child}")
    payload = {
        "variables": [{"id": v.id, "states": list(v.states)} for v in net.structure.variables],
        "edges": [list(e) for e in net.structure.edges],
    }
    _emit(payload, args, lines)
    return EXIT_OK


def _cmd_infer(args: argparse.Namespace) -> int:
    net = _load_model(args.model)
    evidence = _parse_evidence(args.evidence)
    # without explicit targets, show every variable (the priors when no
    # evidence is given)
    targets = list(dict.fromkeys(args.target)) or list(net.variable_ids)
    try:
        posteriors = {t: posterior(net, evidence, t) for t in targets}
        revision = posterior(net, evidence, CLASS_VARIABLE)
    except InconsistentEvidence as exc:
        raise _fail(str(exc), EXIT_INCONSISTENT) from exc
    except BayesNetError as exc:
        raise _fail(str(exc), EXIT_INPUT) from exc
    payload = {
        "posteriors": {t: dict(p.probabilities) for t, p in posteriors.items()},
        "revision": dict(revision.probabilities),
        "prediction": revision.argmax(),
    }
    lines = [_posterior_lines(t, p.probabilities) for t, p in posteriors.items()]
    if CLASS_VARIABLE not in posteriors:
        lines.append(_posterior_lines(CLASS_VARIABLE, revision.probabilities))
    lines.append(f"prediction: {payload['prediction']}")
    _emit(payload, args, lines)
    return EXIT_OK


def _cmd_blanket(args: argparse.Namespace) -> int:
    net = _load_model(args.model)
    try:
        members = sorted(markov_blanket(net, args.variable))
    except BayesNetError as exc:
        raise _fail(str(exc), EXIT_INPUT) from exc
    _emit({"variable": args.variable, "blanket": members}, args, members)
    return EXIT_OK


def _cmd_metrics(args: argparse.Namespace) -> int:
    try:
        data = load_dataset(args.dataset)
        report = extract_evidence(
            data.hierarchy, data.ratings, data.recommendations, data.activity
        )
    except DatasetError as exc:
        raise _fail(str(exc), EXIT_INPUT) from exc
    except Exception as exc:  # metric semantics (unrated objective, ...)
        raise _fail(str(exc), EXIT_INPUT) from exc
    lines = []
    for var, entry in report.entries.items():
        state = "MANUAL" if entry.is_manual else entry.state
        stats = "  ".join(
            f"{k}={v:.4f}" if isinstance(v, float) else f"{k}={v}"
            for k, v in entry.statistics.items()
        )
        lines.append(f"{var:32s} {state:8s} {stats}".rstrip())
        lines.append(f"{'':32s} note: {entry.note}")
    payload = {"report": report.to_dict(), "evidence": report.evidence()}
    if args.emit:
        try:
            with open(args.emit, "w", encoding="utf-8") as handle:
                handle.write(evidence_to_xml(report.evidence()))
        except OSError as exc:
            raise _fail(f"cannot write {args.emit}: {exc}", EXIT_ENVIRONMENT) from exc
        lines.append(f"evidence written to {args.emit}")
    _emit(payload, args, lines)
    return EXIT_OK


def _cmd_calibrate(args: argparse.Namespace) -> int:
    try:
        constraints = load_constraints(args.constraints)
    except OSError as exc:
        raise _fail(f"cannot read constraints: {exc}", EXIT_ENVIRONMENT) from exc
    except (ModelFormatError, BayesNetError) as exc:
        raise _fail(str(exc), EXIT_INPUT) from exc
    result = calibrate(constraints, seed=args.seed, budget=args.budget)
    if args.out:
        try:
            save_params(result.params, args.out)
        except OSError as exc:
            raise _fail(f"cannot write {args.out}: {exc}", EXIT_ENVIRONMENT) from exc
    payload = {
        "residual": result.residual,
        "evaluations": result.evaluations,
        "trace": list(result.trace),
        "seed": args.seed,
        "budget": args.budget,
        "params_file": args.out,
    }
    lines = [
        f"residual    {result.residual:.6e}",
        f"evaluations {result.evaluations}",
        f"trace       {len(result.trace)} sweeps, "
        f"{result.trace[0]:.6e} -> {result.trace[-1]:.6e}",
    ]
    if args.out:
        lines.append(f"params written to {args.out}")
    _emit(payload, args, lines)
    return EXIT_OK


def _cmd_trajectory(args: argparse.Namespace) -> int:
    net = _load_model(args.model)
    try:
        with open(args.steps, "r", encoding="utf-8") as handle:
            raw = [
                line.strip()
                for line in handle
                if line.strip() and not line.strip().startswith("#")
            ]
    except OSError as exc:
        raise _fail(f"cannot read steps file: {exc}", EXIT_ENVIRONMENT) from exc
    pairs = list(_parse_evidence(raw).items())
    from .model import evidence_trajectory

    try:
        steps = evidence_trajectory(net, pairs)
    except InconsistentEvidence as exc:
        raise _fail(str(exc), EXIT_INCONSISTENT) from exc
    except BayesNetError as exc:
        raise _fail(str(exc), EXIT_INPUT) from exc
    labels = ["(prior)"] + [f"+{var}={state}" for var, state in pairs]
    lines = [
        _posterior_lines(label, step.probabilities)
        for label, step in zip(labels, steps)
    ]
    payload = {
        "target": CLASS_VARIABLE,
        "steps": [
            {"evidence": label, "posterior": dict(step.probabilities)}
            for label, step in zip(labels, steps)
        ],
    }
    _emit(payload, args, lines)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    net = _load_model(args.model)
    port = args.port if args.port is not None else int(os.environ.get(PORT_ENV, "8000"))
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, port))
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{port}: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    finally:
        probe.close()
    app = create_app(net, snapshot_path=args.session_snapshot)
    print(f"requisites service listening on http://{args.host}:{port}", flush=True)
    try:
        uvicorn.run(app, host=args.host, port=port, log_level="warning")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="requisites",
        description="SRS revision-need prediction: inspect, infer, extract, calibrate, serve.",
    )
    parser.add_argument(
        "--model",
        default=None,
        help=f"network definition file (default: bundled model, or ${MODEL_ENV})",
    )
    parser.add_argument(
        "--format",
        choices=("table", "json"),
        default="table",
        help="output style: human table or stable machine-readable JSON",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_model = sub.add_parser("model", help="show or validate the model file")
    p_model.add_argument("action", choices=("show", "validate"))
    p_model.set_defaults(func=_cmd_model)

    p_infer = sub.add_parser("infer", help="posteriors for evidence")
    p_infer.add_argument(
        "--evidence", action="append", default=[], metavar="VAR=STATE"
    )
    p_infer.add_argument("--target", action="append", default=[], metavar="VAR")
    p_infer.set_defaults(func=_cmd_infer)

    p_blanket = sub.add_parser("blanket", help="Markov blanket of a variable")
    p_blanket.add_argument("variable")
    p_blanket.set_defaults(func=_cmd_blanket)

    p_metrics = sub.add_parser("metrics", help="extract evidence from a dataset directory")
    p_metrics.add_argument("dataset")
    p_metrics.add_argument("--emit", default=None, metavar="FILE", help="write evidence XML")
    p_metrics.set_defaults(func=_cmd_metrics)

    p_cal = sub.add_parser("calibrate", help="fit parameters to a constraints file")
    p_cal.add_argument("--constraints", required=True)
    p_cal.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_cal.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p_cal.add_argument("--out", default=None, metavar="FILE", help="write fitted params")
    p_cal.set_defaults(func=_cmd_calibrate)

    p_traj = sub.add_parser("trajectory", help="class posterior after each evidence step")
    p_traj.add_argument("--steps", required=True, help="file with one VAR=STATE per line")
    p_traj.set_defaults(func=_cmd_trajectory)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--port", type=int, default=None, help=f"default ${PORT_ENV} or 8000")
    p_serve.add_argument("--host", default="127.0.0.1")
    # also accepted after the subcommand; SUPPRESS keeps the global value
    # when the flag is absent here
    p_serve.add_argument("--model", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    p_serve.add_argument(
        "--session-snapshot", default=None, metavar="FILE",
        help="persist sessions to this file on shutdown and restore on start",
    )
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BayesNetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
