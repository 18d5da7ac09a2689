"""HTTP facade over the network, the metric extractors and evidence sessions.

The loaded network is immutable and shared by every request.  Sessions
are in-memory what-if workspaces: *analytic* sessions accept evidence on
any variable, *exploratory* sessions are locked to the Markov blanket of
their target variable, which is exactly the set of variables that can
influence it once observed.

Every propagation answer carries the class posterior and its predicted
state, whatever else was asked for.  Errors use one body shape:
``{"code": ..., "message": ..., "detail": ...}``.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.datastructures import UploadFile

from .bn import (
    BayesianNetwork,
    BayesNetError,
    IllegalState,
    InconsistentEvidence,
    Posterior,
    UnknownVariable,
    markov_blanket,
    posterior,
)
from .dataset import (
    ACTIVITY_FILE,
    DatasetError,
    DatasetParseError,
    DatasetSemanticError,
    HIERARCHY_FILE,
    RATINGS_FILE,
    RECOMMENDATIONS_FILE,
    TEMPLATE_FILL_FILE,
    load_dataset,
    parse_dataset_texts,
)
from .interchange import EvidenceXmlError, evidence_from_xml, evidence_to_xml
from .metrics import EvidenceReport, extract_evidence
from .model import CLASS_VARIABLE, default_network


class SessionNotFound(BayesNetError):
    pass


class OutsideBlanket(BayesNetError):
    """Exploratory sessions only accept evidence on the target's blanket."""


@dataclass
class Session:
    id: str
    mode: Literal["analytic", "exploratory"]
    target: str | None
    evidence: dict[str, str] = field(default_factory=dict)
    project_values: dict | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "mode": self.mode,
            "target": self.target,
            "evidence": dict(self.evidence),
            "project_values": self.project_values,
        }


class InferRequest(BaseModel):
    evidence: dict[str, str] = {}
    targets: list[str] = []


class SessionCreate(BaseModel):
    mode: Literal["analytic", "exploratory"]
    target: str | None = None


class EvidencePatch(BaseModel):
    evidence: dict[str, str | None]


class ExtractByPath(BaseModel):
    path: str


def _posterior_dict(p: Posterior) -> dict[str, float]:
    return dict(p.probabilities)


def _propagation_response(
    net: BayesianNetwork, evidence: dict[str, str], targets: list[str]
) -> dict:
    posteriors = {t: _posterior_dict(posterior(net, evidence, t)) for t in targets}
    revision = posterior(net, evidence, CLASS_VARIABLE)
    # argmax with declared-order tie-break; equals map_predict when the
    # class is unobserved, and the observed state when it is.
    return {
        "posteriors": posteriors,
        "revision": _posterior_dict(revision),
        "prediction": revision.argmax(),
    }


def create_app(
    net: BayesianNetwork | None = None,
    snapshot_path: str | Path | None = None,
) -> FastAPI:
    """Build the application around one loaded network."""
    network = net if net is not None else default_network()
    app = FastAPI(title="requisites", docs_url=None, redoc_url=None)
    state = app.state
    state.network = network
    state.sessions: dict[str, Session] = {}
    state.project_report: EvidenceReport | None = None
    state.lock = threading.Lock()
    snapshot = Path(snapshot_path) if snapshot_path else None

    def error(status: int, code: str, message: str, detail: str = "") -> JSONResponse:
        return JSONResponse(
            status_code=status,
            content={"code": code, "message": message, "detail": detail},
        )

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError):
        return error(400, "malformed_request", "request body does not match the schema",
                     json.dumps(exc.errors(), default=str))

    @app.exception_handler(BayesNetError)
    async def _bn_error(request: Request, exc: BayesNetError):
        if isinstance(exc, SessionNotFound):
            return error(404, "session_not_found", str(exc))
        if isinstance(exc, OutsideBlanket):
            return error(409, "outside_blanket", str(exc))
        if isinstance(exc, InconsistentEvidence):
            return error(422, "inconsistent_evidence", str(exc))
        if isinstance(exc, EvidenceXmlError):
            return error(400, "invalid_evidence_xml", str(exc))
        if isinstance(exc, (UnknownVariable, IllegalState)):
            return error(400, "illegal_evidence", str(exc))
        return error(400, "model_error", str(exc))

    @app.exception_handler(DatasetError)
    async def _dataset_error(request: Request, exc: DatasetError):
        status = 400 if isinstance(exc, DatasetParseError) else 422
        code = "dataset_parse_error" if status == 400 else "dataset_semantic_error"
        if not isinstance(exc, (DatasetParseError, DatasetSemanticError)):
            status, code = 400, "dataset_error"
        return error(status, code, str(exc), detail=f"{exc.filename}:{exc.line or ''}")

    def _session(session_id: str) -> Session:
        session = state.sessions.get(session_id)
        if session is None:
            raise SessionNotFound(f"no session {session_id!r}")
        return session

    def _check_evidence(evidence: dict[str, str]) -> None:
        for var, value in evidence.items():
            network.variable(var).state_index(value)

    # --- network ---------------------------------------------------------

    @app.get("/network")
    def get_network(cpts: bool = False) -> dict:
        body: dict = {
            "variables": [
                {"id": v.id, "states": list(v.states)} for v in network.structure.variables
            ],
            "edges": [list(edge) for edge in network.structure.edges],
            "class_variable": CLASS_VARIABLE,
        }
        if cpts:
            body["cpts"] = [
                {
                    "child": var,
                    "parents": list(network.cpt(var).parents),
                    "rows": [[float(x) for x in row] for row in network.cpt(var).table],
                }
                for var in network.variable_ids
            ]
        return body

    # --- stateless inference ----------------------------------------------

    @app.post("/infer")
    def infer(request: InferRequest) -> dict:
        _check_evidence(request.evidence)
        for target in request.targets:
            network.variable(target)
        return _propagation_response(network, request.evidence, request.targets)

    @app.get("/markov-blanket/{var}")
    def blanket(var: str):
        try:
            members = sorted(markov_blanket(network, var))
        except UnknownVariable as exc:
            return error(404, "unknown_variable", str(exc))
        values: dict[str, str] = {}
        if state.project_report is not None:
            for member in members:
                entry = state.project_report.entries.get(member)
                if entry is not None:
                    values[member] = "MANUAL" if entry.is_manual else entry.state
        return {"variable": var, "blanket": members, "project_values": values}

    # --- metric extraction -------------------------------------------------

    def _store_report(report: EvidenceReport) -> dict:
        with state.lock:
            state.project_report = report
        return {"report": report.to_dict(), "evidence": report.evidence()}

    @app.post("/metrics/extract")
    async def metrics_extract(request: Request) -> dict:
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            uploads = {
                HIERARCHY_FILE: form.get("hierarchy"),
                RATINGS_FILE: form.get("ratings"),
                RECOMMENDATIONS_FILE: form.get("recommendations"),
                ACTIVITY_FILE: form.get("activity"),
                TEMPLATE_FILL_FILE: form.get("template_fill"),
            }
            texts: dict[str, str | None] = {}
            for name, item in uploads.items():
                if isinstance(item, UploadFile):
                    texts[name] = (await item.read()).decode("utf-8")
                elif isinstance(item, str):
                    texts[name] = item
                else:
                    texts[name] = None
            missing = [
                n
                for n in (HIERARCHY_FILE, RATINGS_FILE, RECOMMENDATIONS_FILE)
                if texts[n] is None
            ]
            if missing:
                raise DatasetParseError(
                    f"missing upload field(s): {', '.join(missing)}", "upload"
                )
            data = parse_dataset_texts(texts)
        else:
            body = ExtractByPath.model_validate(await request.json())
            data = load_dataset(body.path)
        report = extract_evidence(
            data.hierarchy, data.ratings, data.recommendations, data.activity
        )
        return _store_report(report)

    # --- sessions ------------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session(request: SessionCreate) -> dict:
        if request.mode == "exploratory":
            if not request.target:
                raise IllegalState("exploratory sessions need a target variable")
            network.variable(request.target)
        elif request.target is not None:
            network.variable(request.target)
        session = Session(
            id=uuid.uuid4().hex,
            mode=request.mode,
            target=request.target,
            project_values=(
                state.project_report.to_dict() if state.project_report else None
            ),
        )
        with state.lock:
            state.sessions[session.id] = session
        return session.to_dict()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return _session(session_id).to_dict()

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str) -> Response:
        with state.lock:
            if session_id not in state.sessions:
                raise SessionNotFound(f"no session {session_id!r}")
            del state.sessions[session_id]
        return Response(status_code=204)

    def _apply_evidence(session: Session, updates: dict[str, str | None]) -> None:
        settings = {var: value for var, value in updates.items() if value is not None}
        _check_evidence(settings)
        for var in updates:
            network.variable(var)
        if session.mode == "exploratory":
            allowed = markov_blanket(network, session.target)
            outside = sorted(set(settings) - allowed)
            if outside:
                raise OutsideBlanket(
                    f"variables {outside} are outside the blanket of {session.target!r}"
                )
        with state.lock:
            for var, value in updates.items():
                if value is None:
                    session.evidence.pop(var, None)
                else:
                    session.evidence[var] = value

    @app.patch("/sessions/{session_id}/evidence")
    def patch_evidence(session_id: str, request: EvidencePatch) -> dict:
        session = _session(session_id)
        _apply_evidence(session, request.evidence)
        return session.to_dict()

    @app.post("/sessions/{session_id}/propagate")
    def propagate(session_id: str) -> dict:
        session = _session(session_id)
        evidence = dict(session.evidence)
        if session.mode == "exploratory":
            members = sorted(markov_blanket(network, session.target))
            targets = [session.target] + [m for m in members if m not in evidence]
        else:
            targets = list(network.variable_ids)
        return _propagation_response(network, evidence, targets)

    # --- evidence interchange -------------------------------------------------

    @app.get("/sessions/{session_id}/evidence.xml")
    def export_evidence(session_id: str) -> Response:
        session = _session(session_id)
        return Response(
            content=evidence_to_xml(dict(session.evidence)),
            media_type="application/xml",
        )

    @app.post("/sessions/{session_id}/evidence.xml")
    async def import_evidence(session_id: str, request: Request) -> dict:
        session = _session(session_id)
        evidence = evidence_from_xml(await request.body(), network)
        if session.mode == "exploratory":
            allowed = markov_blanket(network, session.target)
            outside = sorted(set(evidence) - allowed)
            if outside:
                raise OutsideBlanket(
                    f"variables {outside} are outside the blanket of {session.target!r}"
                )
        with state.lock:
            session.evidence = evidence
        return session.to_dict()

    # --- optional session snapshotting ---------------------------------------

    if snapshot is not None:

        @app.on_event("startup")
        def _restore() -> None:
            if snapshot.is_file():
                raw = json.loads(snapshot.read_text(encoding="utf-8"))
                with state.lock:
                    for item in raw:
                        session = Session(
                            id=item["id"],
                            mode=item["mode"],
                            target=item.get("target"),
                            evidence=dict(item.get("evidence") or {}),
                            project_values=item.get("project_values"),
                        )
                        state.sessions[session.id] = session

        @app.on_event("shutdown")
        def _snapshot() -> None:
            with state.lock:
                payload = [s.to_dict() for s in state.sessions.values()]
            snapshot.write_text(json.dumps(payload, indent=2), encoding="utf-8")

    return app
