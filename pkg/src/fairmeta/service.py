"""HTTP boundary for evaluation, review, and repair.

Jobs run asynchronously on a small worker pool and are polled by clients;
a finished job's report is immutable, and only the repair-session decision
state changes afterwards (serialized per job). Every number shown in the
review UI is computed here.
"""

from __future__ import annotations

import copy
import tempfile
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import (
    DecisionConflictError,
    EngineError,
    InvalidManualValueError,
    NoProposedRepairError,
    UnknownIssueError,
)
from .evaluate import EvaluationReport, evaluate_batch
from .records import (
    FetchFailure,
    MetadataRecord,
    load_manifest,
    parse_record,
    resolve_manifest,
)
from .repair import (
    Policy,
    RepairSession,
    action_to_dict,
    build_session,
    persist_output,
    record_decision,
    repair_records,
    resolve_manual_value,
)
from .report import record_to_dict, report_to_dict
from .template import Template, flatten_fields, parse_template, validate_template
from .terms import TermIndex, load_vocabulary


class JobState(str, Enum):
    QUEUED = "queued"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


@dataclass
class EvaluationJob:
    job_id: str
    template: Template
    index: TermIndex
    records: list[MetadataRecord]
    failures: list[FetchFailure]
    state: JobState = JobState.QUEUED
    error: str = ""
    report: EvaluationReport | None = None
    session: RepairSession | None = None
    applied_files: dict[str, Path] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _error_response(status: int, code: str, message: str, detail: Any = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": {"code": code, "message": message, "detail": detail}},
    )


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: Any = None):
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail
        super().__init__(message)


def create_app(workspace: str | Path | None = None, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="fairmeta", version="0.1.0")
    app.state.jobs: dict[str, EvaluationJob] = {}
    app.state.executor = ThreadPoolExecutor(max_workers=4, thread_name_prefix="fairmeta-job")
    app.state.workspace = Path(workspace) if workspace else Path(tempfile.mkdtemp(prefix="fairmeta-"))
    app.state.workspace.mkdir(parents=True, exist_ok=True)

    @app.exception_handler(ApiError)
    async def handle_api_error(_req: Request, exc: ApiError):
        return _error_response(exc.status, exc.code, exc.message, exc.detail)

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(_req: Request, exc: RequestValidationError):
        return _error_response(400, "MALFORMED_REQUEST", "request body is malformed", exc.errors())

    @app.exception_handler(EngineError)
    async def handle_engine_error(_req: Request, exc: EngineError):
        return _error_response(400, exc.code, str(exc))

    def get_job(job_id: str) -> EvaluationJob:
        job = app.state.jobs.get(job_id)
        if job is None:
            raise ApiError(404, "UNKNOWN_JOB", f"no job {job_id}")
        return job

    def require_done(job: EvaluationJob) -> EvaluationJob:
        if job.state is not JobState.DONE:
            raise ApiError(409, "JOB_NOT_DONE", f"job is {job.state.value}")
        return job

    def run_job(job: EvaluationJob) -> None:
        job.state = JobState.RUNNING
        try:
            report = evaluate_batch(
                job.records, job.template, job.index, failures=job.failures
            )
            job.report = report
            job.session = build_session(report, Policy.REVIEW)
            job.state = JobState.DONE
        except Exception as exc:  # noqa: BLE001 - job failures surface via the API
            job.error = str(exc)
            job.state = JobState.FAILED

    # ------------------------------------------------------------------
    # job submission
    # ------------------------------------------------------------------

    @app.post("/api/jobs", status_code=202)
    def create_evaluation(body: dict) -> dict:
        if not isinstance(body, dict) or "template" not in body:
            raise ApiError(400, "MALFORMED_REQUEST", "body must carry a 'template'")
        try:
            template = parse_template(body["template"])
        except EngineError as exc:
            raise ApiError(400, exc.code, f"template rejected: {exc}")

        vocabularies = []
        for entry in body.get("vocabularies", []):
            try:
                if "tsv" in entry:
                    vocab_id = entry.get("id")
                    if not vocab_id:
                        raise ApiError(400, "MALFORMED_REQUEST", "inline vocabulary needs an 'id'")
                    vocabularies.append(load_vocabulary(entry["tsv"], vocab_id))
                elif "path" in entry:
                    path = Path(entry["path"])
                    vocab_id = entry.get("id") or path.stem
                    vocabularies.append(
                        load_vocabulary(path.read_text(encoding="utf-8"), vocab_id)
                    )
                else:
                    raise ApiError(400, "MALFORMED_REQUEST", "vocabulary entry needs 'tsv' or 'path'")
            except OSError as exc:
                raise ApiError(400, "VOCABULARY_UNREADABLE", str(exc))
            except EngineError as exc:
                raise ApiError(400, exc.code, f"vocabulary rejected: {exc}")
        index = TermIndex(vocabularies)

        diagnostics = validate_template(template, index.ids())
        errors = [d for d in diagnostics if d.severity == "error"]
        if errors:
            raise ApiError(
                422,
                "TEMPLATE_DIAGNOSTICS",
                "template is not usable with the supplied vocabularies",
                [vars(d) for d in errors],
            )

        records: list[MetadataRecord] = []
        failures: list[FetchFailure] = []
        if "records" in body:
            seen: set[str] = set()
            for entry in body["records"]:
                ref = entry.get("ref")
                if not ref or "document" not in entry:
                    raise ApiError(400, "MALFORMED_REQUEST", "record entries need 'ref' and 'document'")
                if ref in seen:
                    raise ApiError(400, "MALFORMED_REQUEST", f"duplicate record ref {ref!r}")
                seen.add(ref)
                try:
                    records.append(parse_record(ref, entry["document"]))
                except EngineError as exc:
                    raise ApiError(400, exc.code, f"record {ref!r} rejected: {exc}")
        elif "manifest_path" in body or "records_dir" in body:
            locator = body.get("manifest_path") or body.get("records_dir")
            try:
                manifest = load_manifest(locator)
            except (OSError, EngineError) as exc:
                raise ApiError(400, "MALFORMED_REQUEST", f"manifest rejected: {exc}")
            records, failures = resolve_manifest(manifest)

        job = EvaluationJob(
            job_id=uuid.uuid4().hex,
            template=template,
            index=index,
            records=records,
            failures=failures,
        )
        app.state.jobs[job.job_id] = job
        app.state.executor.submit(run_job, job)
        return {"job_id": job.job_id, "state": job.state.value}

    # ------------------------------------------------------------------
    # report access
    # ------------------------------------------------------------------

    @app.get("/api/jobs/{job_id}")
    def get_job_state(job_id: str) -> dict:
        job = get_job(job_id)
        out = {"job_id": job.job_id, "state": job.state.value}
        if job.state is JobState.FAILED:
            out["error"] = job.error
        if job.state is JobState.DONE and job.report is not None:
            summary = job.report.summary
            out["record_count"] = summary.record_count
            out["pass_count"] = summary.pass_count
        return out

    @app.get("/api/jobs/{job_id}/report")
    def get_report(job_id: str) -> dict:
        job = require_done(get_job(job_id))
        assert job.report is not None
        return report_to_dict(job.report)

    @app.get("/api/jobs/{job_id}/records/{record_ref}")
    def get_record_detail(job_id: str, record_ref: str) -> dict:
        job = require_done(get_job(job_id))
        assert job.report is not None and job.session is not None
        evaluation = job.report.record(record_ref)
        if evaluation is None:
            raise ApiError(404, "UNKNOWN_RECORD", f"no record {record_ref!r} in this job")
        record = next(r for r in job.records if r.record_ref == record_ref)

        issues_by_path: dict[str, list[str]] = {}
        for issue in evaluation.issues:
            issues_by_path.setdefault(issue.path.dotted, []).append(issue.issue_id)

        from .records import display  # local import to keep module top uncluttered

        rows = []
        for path, spec, effective_required in flatten_fields(job.template):
            values = record.values_at(path)
            rows.append(
                {
                    "path": path.dotted,
                    "label": spec.label,
                    "value_type": spec.value_kind.value,
                    "required": effective_required,
                    "present": path in record.entries,
                    "values": [display(v) for v in values],
                    "issues": issues_by_path.get(path.dotted, []),
                }
            )
        known = {p.dotted for p, _, _ in flatten_fields(job.template)}
        for path, values in record.entries.items():
            if path.dotted in known:
                continue
            rows.append(
                {
                    "path": path.dotted,
                    "label": path.dotted,
                    "value_type": None,
                    "required": False,
                    "present": True,
                    "values": [display(v) for v in values],
                    "issues": issues_by_path.get(path.dotted, []),
                }
            )

        detail = record_to_dict(evaluation)
        detail["fields"] = rows
        detail["decisions"] = _session_view(job.session, record_ref)
        return detail

    def _session_view(session: RepairSession, record_ref: str | None = None) -> list[dict]:
        actions = [
            a
            for a in session.actions.values()
            if record_ref is None or a.record_ref == record_ref
        ]
        actions.sort(key=lambda a: (a.record_ref, a.path.dotted, a.issue_id))
        return [action_to_dict(a) | {"record_ref": a.record_ref} for a in actions]

    # ------------------------------------------------------------------
    # decisions and repair
    # ------------------------------------------------------------------

    @app.post("/api/jobs/{job_id}/decisions")
    def post_decisions(job_id: str, body: list[dict]) -> dict:
        job = require_done(get_job(job_id))
        assert job.session is not None and job.report is not None
        specs = {p.dotted: s for p, s, _ in flatten_fields(job.template)}

        with job.lock:
            # all-or-nothing: stage on a copy, commit on success
            staged = copy.deepcopy(job.session.actions)
            trial = RepairSession(
                evaluation=job.session.evaluation,
                policy=job.session.policy,
                actions=staged,
                issues=job.session.issues,
            )
            for decision in body:
                issue_id = decision.get("issue_id", "")
                verb = decision.get("action")
                if verb not in ("accept", "reject"):
                    raise ApiError(400, "MALFORMED_REQUEST", "decision 'action' must be accept or reject")
                issue = job.session.issues.get(issue_id)
                if issue is None:
                    raise ApiError(404, "UNKNOWN_ISSUE", f"no issue {issue_id!r} in this job")
                value = None
                if "value" in decision and decision["value"] is not None:
                    spec = specs.get(issue.path.dotted)
                    if spec is None:
                        raise ApiError(422, "INVALID_MANUAL_VALUE", "manual values need a template field")
                    try:
                        value = resolve_manual_value(spec, job.index, decision["value"])
                    except InvalidManualValueError as exc:
                        raise ApiError(422, exc.code, str(exc))
                try:
                    record_decision(
                        trial,
                        issue_id,
                        accept=(verb == "accept"),
                        value=value,
                        decided_by=decision.get("decided_by", "api"),
                    )
                except NoProposedRepairError as exc:
                    raise ApiError(422, exc.code, str(exc))
                except DecisionConflictError as exc:
                    raise ApiError(409, exc.code, str(exc))
                except UnknownIssueError as exc:
                    raise ApiError(404, exc.code, str(exc))
            job.session.actions = staged
            return {"decisions": _session_view(job.session)}

    @app.post("/api/jobs/{job_id}/apply")
    def apply_session(job_id: str, body: dict | None = None) -> dict:
        job = require_done(get_job(job_id))
        assert job.session is not None
        body = body or {}
        try:
            policy = Policy(body.get("policy", "review"))
        except ValueError:
            raise ApiError(400, "MALFORMED_REQUEST", "policy must be 'auto' or 'review'")
        strict = bool(body.get("strict", False))

        with job.lock:
            job.session.policy = policy
            repaired = repair_records(job.records, job.session)
            if strict and not any(repaired.provenance.values()):
                raise ApiError(409, "NOTHING_TO_APPLY", "no applicable repair actions")
            out_dir = app.state.workspace / job.job_id / "cleaned"
            manifest, failures = persist_output(repaired, out_dir, job.template)
            job.applied_files = {ref: out_dir / name for ref, name in manifest}
            changed = {
                ref for ref, actions in repaired.provenance.items() if actions
            }
            return {
                "output_dir": str(out_dir),
                "records": [
                    {
                        "ref": ref,
                        "file": name,
                        "changed": ref in changed,
                        "applied_actions": len(repaired.provenance.get(ref, ())),
                    }
                    for ref, name in manifest
                ],
                "failures": [vars(f) for f in failures],
            }

    @app.get("/api/jobs/{job_id}/repaired/{record_ref}")
    def get_repaired_record(job_id: str, record_ref: str):
        job = require_done(get_job(job_id))
        path = job.applied_files.get(record_ref)
        if path is None:
            raise ApiError(409, "NOT_APPLIED", "run apply before downloading repaired records")
        import json

        return JSONResponse(content=json.loads(path.read_text(encoding="utf-8")))

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
