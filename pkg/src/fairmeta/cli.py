"""Batch command line: validate, author, evaluate, repair, report, serve.

Exit codes: 0 = success and every record passed; 1 = evaluation ran but at
least one record failed (CI-friendly); 2 = usage or configuration error;
3 = I/O error. Reports go to ``--out``; the human summary goes to stdout;
diagnostics go to stderr.
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from .errors import EngineError
from .evaluate import evaluate_batch
from .records import load_manifest, resolve_manifest
from .repair import (
    Policy,
    build_session,
    persist_output,
    record_decision,
    repair_records,
    resolve_manual_value,
)
from .report import ReportFormat, render_report, report_from_json, report_to_json
from .template import (
    Template,
    author_template,
    declared_vocabularies,
    flatten_fields,
    parse_template,
    serialize_template,
    validate_template,
)
from .terms import TermIndex, Vocabulary, load_vocabulary

EXIT_OK = 0
EXIT_RECORDS_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _fail(code: int, message: str) -> SystemExit:
    click.echo(f"error: {message}", err=True)
    return SystemExit(code)


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _fail(EXIT_IO, f"cannot read {path}: {exc}")


def _write_text(path: str | Path, text: str) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _fail(EXIT_IO, f"cannot write {path}: {exc}")


def _load_template(path: str) -> Template:
    try:
        return parse_template(_read_text(path))
    except EngineError as exc:
        raise _fail(EXIT_CONFIG, f"template rejected ({exc.code}): {exc}")


def _load_vocabularies(specs: tuple[str, ...]) -> list[Vocabulary]:
    vocabularies = []
    for spec in specs:
        if "=" in spec and not Path(spec).exists():
            vocab_id, _, path = spec.partition("=")
        else:
            vocab_id, path = Path(spec).stem, spec
        try:
            vocabularies.append(load_vocabulary(_read_text(path), vocab_id))
        except EngineError as exc:
            raise _fail(EXIT_CONFIG, f"vocabulary {path} rejected ({exc.code}): {exc}")
    return vocabularies


def _load_records(manifest: str | None, records_dir: str | None):
    source = manifest or records_dir
    if source is None:
        raise _fail(EXIT_CONFIG, "provide --manifest or a records directory")
    try:
        loaded = load_manifest(source)
    except OSError as exc:
        raise _fail(EXIT_IO, f"cannot read {source}: {exc}")
    except EngineError as exc:
        raise _fail(EXIT_CONFIG, f"manifest rejected ({exc.code}): {exc}")
    return resolve_manifest(loaded)


def _build_index(template: Template, vocabularies: list[Vocabulary]) -> TermIndex:
    idx = TermIndex(vocabularies)
    diagnostics = validate_template(template, idx.ids())
    errors = [d for d in diagnostics if d.severity == "error"]
    for diag in diagnostics:
        click.echo(f"{diag.severity}: {diag.code} at {diag.path}: {diag.message}", err=True)
    if errors:
        raise _fail(EXIT_CONFIG, "template is not usable with the supplied vocabularies")
    return idx


@click.group()
@click.version_option(package_name="fairmeta")
def main() -> None:
    """Metadata template engine and FAIRness evaluator."""


@main.command("validate-template")
@click.option("-t", "--template", "template_path", required=True, help="Template JSON file.")
@click.option("-v", "--vocab", "vocab_specs", multiple=True, help="Vocabulary TSV, as PATH or ID=PATH.")
def validate_template_cmd(template_path: str, vocab_specs: tuple[str, ...]) -> None:
    """Parse a template and report diagnostics."""
    template = _load_template(template_path)
    vocabularies = _load_vocabularies(vocab_specs)
    known = {v.id for v in vocabularies} if vocab_specs else declared_vocabularies(template)
    diagnostics = validate_template(template, known)
    for diag in diagnostics:
        click.echo(f"{diag.severity}: {diag.code} at {diag.path}: {diag.message}", err=True)
    if any(d.severity == "error" for d in diagnostics):
        raise SystemExit(EXIT_CONFIG)
    fields = flatten_fields(template)
    required = sum(1 for _, _, req in fields if req)
    click.echo(
        f"{template.name}: {len(fields)} fields ({required} required), template is usable"
    )


@main.command("author")
@click.argument("checklist", type=str)
@click.option("-o", "--out", "out_path", help="Where to write the template JSON (default stdout).")
@click.option("--id", "template_id", default="urn:fairmeta:authored", show_default=True)
@click.option("--name", "template_name", default="Authored template", show_default=True)
def author_cmd(checklist: str, out_path: str | None, template_id: str, template_name: str) -> None:
    """Transform a checklist into a template."""
    try:
        template = author_template(
            _read_text(checklist), template_id=template_id, name=template_name
        )
    except EngineError as exc:
        raise _fail(EXIT_CONFIG, f"checklist rejected ({exc.code}): {exc}")
    rendered = serialize_template(template)
    if out_path:
        _write_text(out_path, rendered)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(rendered, nl=False)


@main.command("evaluate")
@click.option("-t", "--template", "template_path", required=True)
@click.option("-v", "--vocab", "vocab_specs", multiple=True)
@click.option("-m", "--manifest", "manifest_path", help="Manifest file (ref<TAB>locator lines).")
@click.option("-r", "--records", "records_dir", help="Directory of *.json records.")
@click.option("--out", "out_path", help="Write REPORT_JSON here.")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["text", "json", "html"]),
    default="text",
    show_default=True,
    help="Stdout rendering.",
)
@click.option("--jobs", type=int, default=None, help="Evaluation parallelism (default: auto).")
def evaluate_cmd(template_path, vocab_specs, manifest_path, records_dir, out_path, fmt, jobs):
    """Evaluate records against a template and write a report."""
    template = _load_template(template_path)
    idx = _build_index(template, _load_vocabularies(vocab_specs))
    records, failures = _load_records(manifest_path, records_dir)
    for failure in failures:
        click.echo(f"warning: {failure.record_ref}: {failure.code}: {failure.cause}", err=True)
    if jobs is not None and jobs < 1:
        raise _fail(EXIT_CONFIG, "--jobs must be at least 1")
    report = evaluate_batch(records, template, idx, failures=failures, jobs=jobs)
    if out_path:
        _write_text(out_path, report_to_json(report))
    click.echo(render_report(report, ReportFormat(fmt)), nl=False)
    summary = report.summary
    if summary.pass_count < summary.record_count or failures:
        raise SystemExit(EXIT_RECORDS_FAILED)


@main.command("repair")
@click.option("-t", "--template", "template_path", required=True)
@click.option("-v", "--vocab", "vocab_specs", multiple=True)
@click.option("-m", "--manifest", "manifest_path")
@click.option("-r", "--records", "records_dir")
@click.option("--report", "report_path", help="Existing REPORT_JSON (recomputed when omitted).")
@click.option(
    "--policy",
    type=click.Choice(["auto", "review"]),
    default="review",
    show_default=True,
)
@click.option("--decisions", "decisions_path", help="JSON list of {issue_id, action, value?}.")
@click.option("--out-dir", "out_dir", required=True, help="Destination for cleaned records.")
def repair_cmd(
    template_path, vocab_specs, manifest_path, records_dir, report_path, policy, decisions_path, out_dir
):
    """Apply repairs and persist cleaned records with provenance."""
    template = _load_template(template_path)
    idx = _build_index(template, _load_vocabularies(vocab_specs))
    records, failures = _load_records(manifest_path, records_dir)
    for failure in failures:
        click.echo(f"warning: {failure.record_ref}: {failure.code}: {failure.cause}", err=True)

    if report_path:
        try:
            report = report_from_json(_read_text(report_path))
        except EngineError as exc:
            raise _fail(EXIT_CONFIG, f"report rejected ({exc.code}): {exc}")
    else:
        report = evaluate_batch(records, template, idx, failures=failures)

    session = build_session(report, Policy(policy))

    if decisions_path:
        specs = {p.dotted: s for p, s, _ in flatten_fields(template)}
        try:
            decisions = json.loads(_read_text(decisions_path))
        except json.JSONDecodeError as exc:
            raise _fail(EXIT_CONFIG, f"decisions file is not valid JSON: {exc}")
        for decision in decisions:
            issue_id = decision.get("issue_id", "")
            verb = decision.get("action")
            if verb not in ("accept", "reject"):
                raise _fail(EXIT_CONFIG, f"decision for {issue_id!r} must be accept or reject")
            issue = session.issues.get(issue_id)
            if issue is None:
                raise _fail(EXIT_CONFIG, f"unknown issue id {issue_id!r}")
            value = None
            if decision.get("value") is not None:
                spec = specs.get(issue.path.dotted)
                if spec is None:
                    raise _fail(EXIT_CONFIG, f"issue {issue_id!r} has no template field for a manual value")
                try:
                    value = resolve_manual_value(spec, idx, decision["value"])
                except EngineError as exc:
                    raise _fail(EXIT_CONFIG, f"manual value rejected ({exc.code}): {exc}")
            try:
                record_decision(
                    session,
                    issue_id,
                    accept=(verb == "accept"),
                    value=value,
                    decided_by=decision.get("decided_by", "decisions-file"),
                )
            except EngineError as exc:
                raise _fail(EXIT_CONFIG, f"decision rejected ({exc.code}): {exc}")

    repaired = repair_records(records, session)
    try:
        manifest, write_failures = persist_output(repaired, out_dir, template)
    except OSError as exc:
        raise _fail(EXIT_IO, f"cannot write {out_dir}: {exc}")
    for failure in write_failures:
        click.echo(f"warning: {failure.record_ref}: {failure.code}: {failure.cause}", err=True)
    changed = sum(1 for actions in repaired.provenance.values() if actions)
    click.echo(f"wrote {len(manifest)} records to {out_dir} ({changed} changed)")
    if write_failures:
        raise SystemExit(EXIT_IO)


@main.command("report")
@click.option("--report", "report_path", required=True, help="REPORT_JSON input.")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["text", "json", "html"]),
    default="text",
    show_default=True,
)
@click.option("--out", "out_path", help="Write here instead of stdout.")
def report_cmd(report_path: str, fmt: str, out_path: str | None) -> None:
    """Re-render an existing REPORT_JSON as text or HTML."""
    try:
        report = report_from_json(_read_text(report_path))
    except EngineError as exc:
        raise _fail(EXIT_CONFIG, f"report rejected ({exc.code}): {exc}")
    rendered = render_report(report, ReportFormat(fmt))
    if out_path:
        _write_text(out_path, rendered)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(rendered, nl=False)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8112, show_default=True)
@click.option("--ui-dir", "ui_dir", help="Static review-UI bundle to serve at /.")
@click.option("--workspace", help="Directory for job outputs (default: temp dir).")
def serve_cmd(host: str, port: int, ui_dir: str | None, workspace: str | None) -> None:
    """Run the evaluation/review HTTP service."""
    import uvicorn

    from .service import create_app

    if ui_dir is not None and not Path(ui_dir).is_dir():
        raise _fail(EXIT_CONFIG, f"--ui-dir {ui_dir} is not a directory")
    app = create_app(workspace=workspace, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
