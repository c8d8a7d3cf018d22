"""Rendering and parsing of evaluation reports.

REPORT_JSON is the canonical machine format and round-trips exactly; the
text table mirrors the summary screen layout and the HTML renderer emits
one self-contained static file.
"""

from __future__ import annotations

import html
import json
from enum import Enum

from .errors import MalformedDocumentError, UnsupportedFormatError
from .evaluate import (
    EvaluationReport,
    Issue,
    IssueKind,
    Provenance,
    RecordEvaluation,
    SuggestedValue,
    compute_metrics,
)
from .fieldpath import FieldPath
from .records import EMPTY, Empty, FetchFailure, FieldValue, Literal, TermRef


class ReportFormat(str, Enum):
    REPORT_JSON = "json"
    TEXT = "text"
    HTML = "html"


def render_report(rep: EvaluationReport, fmt: ReportFormat | str) -> str:
    try:
        fmt = ReportFormat(fmt)
    except ValueError:
        raise UnsupportedFormatError(f"unsupported report format {fmt!r}") from None
    if fmt is ReportFormat.REPORT_JSON:
        return report_to_json(rep)
    if fmt is ReportFormat.TEXT:
        return _render_text(rep)
    return _render_html(rep)


# ---------------------------------------------------------------------------
# REPORT_JSON
# ---------------------------------------------------------------------------


def value_to_doc(value: FieldValue) -> object:
    """Instance-format rendering of a field value for report payloads."""
    if isinstance(value, Empty):
        return {"@value": ""}
    if isinstance(value, TermRef):
        out: dict = {"@id": value.iri}
        if value.label:
            out["rdfs:label"] = value.label
        return out
    if value.datatype:
        return {"@value": value.raw, "@type": value.datatype}
    return value.raw


def value_from_doc(raw: object) -> FieldValue:
    if isinstance(raw, str):
        return Literal(raw=raw) if raw.strip() else EMPTY
    if isinstance(raw, dict):
        if "@id" in raw:
            return TermRef(iri=raw["@id"], label=raw.get("rdfs:label", ""))
        if "@value" in raw:
            text = raw["@value"]
            if not isinstance(text, str):
                text = json.dumps(text)
            if text.strip() == "":
                return EMPTY
            return Literal(raw=text, datatype=raw.get("@type"))
    raise MalformedDocumentError(f"unrecognized value payload {raw!r}")


def issue_to_dict(issue: Issue) -> dict:
    return {
        "id": issue.issue_id,
        "path": issue.path.dotted,
        "kind": issue.kind.value,
        "observed": issue.observed,
        "suggestions": [
            {
                "value": value_to_doc(s.value),
                "score": s.score,
                "provenance": s.provenance.value,
            }
            for s in issue.suggestions
        ],
    }


def record_to_dict(ev: RecordEvaluation) -> dict:
    completeness, adherence = compute_metrics(ev)
    return {
        "ref": ev.record_ref,
        "status": ev.status,
        "required_total": ev.required_total,
        "required_filled": ev.required_filled,
        "filled_total": ev.filled_total,
        "filled_invalid": ev.filled_invalid,
        "completeness_pct": completeness,
        "adherence_pct": adherence,
        "issues": [issue_to_dict(i) for i in ev.issues],
    }


def report_to_dict(rep: EvaluationReport) -> dict:
    summary = rep.summary
    return {
        "template": rep.template_ref,
        "records": [record_to_dict(ev) for ev in rep.records],
        "errors": [
            {"ref": f.record_ref, "code": f.code, "cause": f.cause} for f in rep.errors
        ],
        "summary": {
            "record_count": summary.record_count,
            "pass_count": summary.pass_count,
            "field_noncompliance": [
                {"path": path, "count": count} for path, count in summary.field_noncompliance
            ],
        },
    }


def report_to_json(rep: EvaluationReport) -> str:
    return json.dumps(report_to_dict(rep), indent=2, ensure_ascii=False) + "\n"


def report_from_json(text: str | bytes | dict) -> EvaluationReport:
    """Parse REPORT_JSON back into an EvaluationReport value."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedDocumentError(f"report is not valid JSON: {exc}") from exc
    else:
        doc = text
    if not isinstance(doc, dict) or "template" not in doc or "records" not in doc:
        raise MalformedDocumentError("report must carry 'template' and 'records'")
    records = []
    for entry in doc["records"]:
        issues = []
        for raw in entry.get("issues", []):
            suggestions = tuple(
                SuggestedValue(
                    value=value_from_doc(s["value"]),
                    score=s["score"],
                    provenance=Provenance(s["provenance"]),
                )
                for s in raw.get("suggestions", [])
            )
            issues.append(
                Issue(
                    record_ref=entry["ref"],
                    path=FieldPath.parse(raw["path"]),
                    kind=IssueKind(raw["kind"]),
                    observed=raw["observed"],
                    suggestions=suggestions,
                )
            )
        records.append(
            RecordEvaluation(
                record_ref=entry["ref"],
                issues=tuple(issues),
                required_total=entry["required_total"],
                required_filled=entry["required_filled"],
                filled_total=entry["filled_total"],
                filled_invalid=entry["filled_invalid"],
            )
        )
    errors = tuple(
        FetchFailure(record_ref=e["ref"], cause=e.get("cause", ""), code=e.get("code", "FETCH_FAILED"))
        for e in doc.get("errors", [])
    )
    return EvaluationReport(
        template_ref=doc["template"], records=tuple(records), errors=errors
    )


# ---------------------------------------------------------------------------
# Text table
# ---------------------------------------------------------------------------


def _completeness_cell(ev: RecordEvaluation) -> str:
    pct, _ = compute_metrics(ev)
    return (
        f"{ev.required_filled} ({pct}%)  "
        f"{ev.required_filled} out of {ev.required_total} required metadata fields are filled."
    )


def _adherence_cell(ev: RecordEvaluation) -> str:
    _, pct = compute_metrics(ev)
    valid = ev.filled_total - ev.filled_invalid
    return (
        f"{valid} ({pct}%)  "
        f"{ev.filled_invalid} out of {ev.filled_total} filled metadata fields are invalid."
    )


def _render_text(rep: EvaluationReport) -> str:
    lines = [
        "Metadata Evaluation Summary",
        f"Template: {rep.template_ref}",
        f"Evaluating {len(rep.records)} metadata records",
        "",
    ]
    rows = [
        (ev.record_ref, "✓" if ev.passed else "✗", _completeness_cell(ev), _adherence_cell(ev))
        for ev in rep.records
    ]
    header = ("METADATA REFERENCE", "STATUS", "COMPLETENESS", "ADHERENCE")
    widths = [
        max(len(header[col]), *(len(r[col]) for r in rows)) if rows else len(header[col])
        for col in range(4)
    ]
    def fmt(row: tuple[str, str, str, str]) -> str:
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()

    lines.append(fmt(header))
    lines.extend(fmt(row) for row in rows)
    if rep.errors:
        lines.append("")
        lines.append("Errors:")
        lines.extend(f"  {f.record_ref}: {f.code}: {f.cause}" for f in rep.errors)
    noncompliance = rep.summary.field_noncompliance
    if noncompliance:
        lines.append("")
        lines.append("Most noncompliant fields:")
        lines.extend(f"  {path}: {count}" for path, count in noncompliance)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# HTML
# ---------------------------------------------------------------------------

_HTML_STYLE = """
body { font-family: system-ui, sans-serif; margin: 2rem; color: #1c2530; }
table { border-collapse: collapse; margin: 1rem 0; }
th, td { border: 1px solid #c7cdd4; padding: 0.4rem 0.8rem; text-align: left; }
th { background: #eef1f4; }
.pass { color: #177245; font-weight: bold; }
.fail { color: #b3261e; font-weight: bold; }
.issue-kind { font-family: monospace; }
"""


def _render_html(rep: EvaluationReport) -> str:
    summary = rep.summary
    esc = html.escape
    parts = [
        "<!DOCTYPE html>",
        "<html><head><meta charset=\"utf-8\">",
        f"<title>Metadata Evaluation Summary</title>",
        f"<style>{_HTML_STYLE}</style></head><body>",
        "<h1>Metadata Evaluation Summary</h1>",
        f"<p>Template: <strong>{esc(rep.template_ref)}</strong></p>",
        f"<p>Evaluating {summary.record_count} metadata records; {summary.pass_count} pass.</p>",
        "<table><thead><tr><th>Metadata reference</th><th>Status</th>"
        "<th>Completeness</th><th>Adherence</th></tr></thead><tbody>",
    ]
    for ev in rep.records:
        status = "✓" if ev.passed else "✗"
        cls = "pass" if ev.passed else "fail"
        parts.append(
            f"<tr><td>{esc(ev.record_ref)}</td><td class=\"{cls}\">{status}</td>"
            f"<td>{esc(_completeness_cell(ev))}</td><td>{esc(_adherence_cell(ev))}</td></tr>"
        )
    parts.append("</tbody></table>")
    if rep.errors:
        parts.append("<h2>Errors</h2><ul>")
        parts.extend(
            f"<li>{esc(f.record_ref)}: {esc(f.code)}: {esc(f.cause)}</li>" for f in rep.errors
        )
        parts.append("</ul>")
    if summary.field_noncompliance:
        parts.append("<h2>Most noncompliant fields</h2><table><thead>"
                     "<tr><th>Field</th><th>Records with issues</th></tr></thead><tbody>")
        parts.extend(
            f"<tr><td>{esc(path)}</td><td>{count}</td></tr>"
            for path, count in summary.field_noncompliance
        )
        parts.append("</tbody></table>")
    for ev in rep.records:
        if not ev.issues:
            continue
        parts.append(f"<h2>{esc(ev.record_ref)}: {len(ev.issues)} issues</h2>")
        parts.append("<table><thead><tr><th>Field</th><th>Issue</th><th>Observed</th>"
                     "<th>Top suggestion</th></tr></thead><tbody>")
        for issue in ev.issues:
            top = ""
            if issue.suggestions:
                doc = value_to_doc(issue.suggestions[0].value)
                top = doc if isinstance(doc, str) else json.dumps(doc, ensure_ascii=False)
            parts.append(
                f"<tr><td>{esc(issue.path.dotted)}</td>"
                f"<td class=\"issue-kind\">{esc(issue.kind.value)}</td>"
                f"<td>{esc(issue.observed)}</td><td>{esc(top)}</td></tr>"
            )
        parts.append("</tbody></table>")
    parts.append("</body></html>")
    return "\n".join(parts) + "\n"
