"""Turning issues into reviewable repair actions and applying them.

A repair session holds one action per issue at most. Under the AUTO
policy every proposed action applies; under REVIEW only explicitly
accepted ones do. Applying never mutates the input record.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence, Union

from .errors import (
    ConflictingActionsError,
    DecisionConflictError,
    InvalidManualValueError,
    NoProposedRepairError,
    UnknownIssueError,
)
from .evaluate import (
    EvaluationReport,
    Issue,
    IssueKind,
    Provenance,
    RecordEvaluation,
    check_value,
    fnv1a64,
)
from .fieldpath import FieldPath
from .records import (
    FieldValue,
    Literal,
    MetadataRecord,
    TermRef,
    display,
    record_to_json,
)
from .report import value_from_doc, value_to_doc
from .template import FieldSpec, Template, ValueKind
from .terms import TermIndex, lookup_exact, resolve_value_set

TERM_ACCEPT_THRESHOLD = 0.5
RENAME_ACCEPT_THRESHOLD = 0.8


class Policy(str, Enum):
    AUTO = "auto"
    REVIEW = "review"


class ActionStatus(str, Enum):
    PENDING = "PENDING"
    ACCEPTED = "ACCEPTED"
    REJECTED = "REJECTED"
    AUTO_APPLIED = "AUTO_APPLIED"


@dataclass(frozen=True)
class Rename:
    new_path: FieldPath


Replacement = Union[Literal, TermRef, Rename]


@dataclass
class RepairAction:
    issue_id: str
    record_ref: str
    path: FieldPath
    kind: IssueKind
    before: str
    replacement: Replacement | None
    status: ActionStatus = ActionStatus.PENDING
    decided_by: str = ""


def propose_repairs(ev: RecordEvaluation) -> list[RepairAction]:
    """One pending action per issue whose best suggestion clears its
    threshold: coercions always, term matches at >= 0.5, renames at >= 0.8.
    Issues without a qualifying suggestion yield nothing."""
    actions: list[RepairAction] = []
    for issue in ev.issues:
        if not issue.suggestions:
            continue
        top = issue.suggestions[0]
        if top.provenance is Provenance.COERCION:
            replacement: Replacement = top.value  # type: ignore[assignment]
        elif top.provenance is Provenance.TERM_MATCH:
            if top.score < TERM_ACCEPT_THRESHOLD:
                continue
            replacement = top.value  # type: ignore[assignment]
        else:  # FIELD_RENAME
            if top.score < RENAME_ACCEPT_THRESHOLD:
                continue
            assert isinstance(top.value, Literal)
            replacement = Rename(new_path=FieldPath.parse(top.value.raw))
        actions.append(
            RepairAction(
                issue_id=issue.issue_id,
                record_ref=issue.record_ref,
                path=issue.path,
                kind=issue.kind,
                before=issue.observed,
                replacement=replacement,
            )
        )
    return actions


# ---------------------------------------------------------------------------
# Sessions and decisions
# ---------------------------------------------------------------------------


@dataclass
class RepairSession:
    evaluation: EvaluationReport
    policy: Policy
    actions: dict[str, RepairAction] = field(default_factory=dict)
    issues: dict[str, Issue] = field(default_factory=dict)


def build_session(report: EvaluationReport, policy: Policy = Policy.REVIEW) -> RepairSession:
    session = RepairSession(evaluation=report, policy=policy)
    for ev in report.records:
        for issue in ev.issues:
            session.issues[issue.issue_id] = issue
        for action in propose_repairs(ev):
            session.actions[action.issue_id] = action
    return session


def resolve_manual_value(
    spec: FieldSpec, idx: TermIndex, raw_doc: object
) -> FieldValue:
    """Validate a reviewer-supplied value against the field spec.

    Controlled fields must match a term exactly (by iri, label, or
    synonym) and resolve to the preferred label; numeric fields get their
    datatype filled in. Raises InvalidManualValueError otherwise.
    """
    try:
        value = value_from_doc(raw_doc)
    except Exception as exc:
        raise InvalidManualValueError(str(exc)) from exc
    if spec.value_kind is ValueKind.CONTROLLED:
        valueset = resolve_value_set(spec.value_sets, idx)
        term = lookup_exact(value, valueset)
        if term is None:
            raise InvalidManualValueError(
                f"{display(value)!r} is not a term of the field's value set"
            )
        return TermRef(iri=term.iri, label=term.label)
    drafts = check_value(spec, value, idx, required=True)
    if drafts:
        raise InvalidManualValueError(
            f"{display(value)!r} fails validation: {drafts[0].kind.value}"
        )
    if isinstance(value, Literal) and value.datatype is None:
        if spec.value_kind is ValueKind.INTEGER:
            value = Literal(raw=value.raw, datatype="xsd:integer")
        elif spec.value_kind is ValueKind.DECIMAL:
            value = Literal(raw=value.raw, datatype="xsd:float")
    return value


def record_decision(
    session: RepairSession,
    issue_id: str,
    accept: bool,
    *,
    value: FieldValue | None = None,
    decided_by: str = "",
) -> RepairAction:
    """Record one accept/reject decision; repeated identical decisions are
    no-ops, contradictory ones raise DecisionConflictError."""
    issue = session.issues.get(issue_id)
    if issue is None:
        raise UnknownIssueError(f"issue {issue_id} does not belong to this session")
    action = session.actions.get(issue_id)

    wanted_status = ActionStatus.ACCEPTED if accept else ActionStatus.REJECTED
    if accept and value is None and (action is None or action.replacement is None):
        raise NoProposedRepairError(
            f"issue {issue_id} has no proposed repair; supply a replacement value"
        )

    if action is None:
        action = RepairAction(
            issue_id=issue_id,
            record_ref=issue.record_ref,
            path=issue.path,
            kind=issue.kind,
            before=issue.observed,
            replacement=None,
        )
        session.actions[issue_id] = action

    new_replacement = action.replacement if value is None else value
    if action.status is ActionStatus.PENDING:
        action.status = wanted_status
        action.replacement = new_replacement
        action.decided_by = decided_by
        return action
    if action.status is wanted_status and _same_replacement(action.replacement, new_replacement):
        return action  # idempotent repeat
    raise DecisionConflictError(
        f"issue {issue_id} already decided as {action.status.value}"
    )


def _same_replacement(a: Replacement | None, b: Replacement | None) -> bool:
    return a == b


# ---------------------------------------------------------------------------
# Applying
# ---------------------------------------------------------------------------


def _applicable(session: RepairSession, record_ref: str) -> list[RepairAction]:
    actions = [a for a in session.actions.values() if a.record_ref == record_ref]
    if session.policy is Policy.AUTO:
        chosen = [a for a in actions if a.status is not ActionStatus.REJECTED]
    else:
        chosen = [a for a in actions if a.status is ActionStatus.ACCEPTED]
    chosen.sort(key=lambda a: (a.path.dotted, a.issue_id))
    return chosen


def apply_repairs(r: MetadataRecord, session: RepairSession) -> MetadataRecord:
    """Apply the session's applicable actions to one record, returning a
    new record; entries untouched by any action are preserved verbatim."""
    actions = _applicable(session, r.record_ref)
    if not actions:
        return r

    # conflict check: a path may be touched by at most one distinct change
    touched: dict[FieldPath, Replacement | None] = {}
    for action in actions:
        targets = [action.path]
        if isinstance(action.replacement, Rename):
            targets.append(action.replacement.new_path)
        for target in targets:
            if target in touched and touched[target] != action.replacement:
                raise ConflictingActionsError(
                    f"multiple accepted actions disagree about {target.dotted}"
                )
            touched[target] = action.replacement

    entries: dict[FieldPath, tuple[FieldValue, ...]] = dict(r.entries)
    for action in actions:
        repl = action.replacement
        if repl is None:
            continue
        if isinstance(repl, Rename):
            if repl.new_path in entries:
                raise ConflictingActionsError(
                    f"rename target {repl.new_path.dotted} already present"
                )
            moved = entries.get(action.path)
            if moved is None:
                continue
            # keep the entry's original position under its new key
            entries = {
                (repl.new_path if path == action.path else path): values
                for path, values in entries.items()
            }
            continue
        current = entries.get(action.path)
        if current is None:
            entries[action.path] = (repl,)
            continue
        entries[action.path] = tuple(
            repl if display(v) == action.before else v for v in current
        )
    if session.policy is Policy.AUTO:
        for action in actions:
            if action.status is ActionStatus.PENDING:
                action.status = ActionStatus.AUTO_APPLIED
    return MetadataRecord(record_ref=r.record_ref, entries=entries)


@dataclass(frozen=True)
class RepairedRecordSet:
    records: tuple[MetadataRecord, ...]
    provenance: dict[str, tuple[RepairAction, ...]]


def repair_records(
    records: Sequence[MetadataRecord], session: RepairSession
) -> RepairedRecordSet:
    """Apply the session across a batch; every record is carried through,
    changed or not."""
    repaired: list[MetadataRecord] = []
    provenance: dict[str, tuple[RepairAction, ...]] = {}
    for record in records:
        repaired.append(apply_repairs(record, session))
        applied = [
            a
            for a in _applicable(session, record.record_ref)
            if a.replacement is not None
        ]
        provenance[record.record_ref] = tuple(applied)
    return RepairedRecordSet(records=tuple(repaired), provenance=provenance)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

_UNSAFE_RE = re.compile(r"[^A-Za-z0-9._-]")


def _safe_stem(ref: str) -> str:
    stem = _UNSAFE_RE.sub("_", ref)
    if stem != ref:
        stem = f"{stem}-{format(fnv1a64(ref.encode('utf-8')), '08x')[:8]}"
    return stem


@dataclass(frozen=True)
class WriteFailure:
    record_ref: str
    cause: str
    code: str = "WRITE_FAILED"


def action_to_dict(action: RepairAction) -> dict:
    after: object
    if isinstance(action.replacement, Rename):
        after = {"rename": action.replacement.new_path.dotted}
    elif action.replacement is None:
        after = None
    else:
        after = value_to_doc(action.replacement)
    return {
        "issue_id": action.issue_id,
        "path": action.path.dotted,
        "kind": action.kind.value,
        "before": action.before,
        "after": after,
        "status": action.status.value,
        "decided_by": action.decided_by,
    }


def persist_output(
    repaired: RepairedRecordSet, destination: str | Path, template: Template
) -> tuple[list[tuple[str, str]], list[WriteFailure]]:
    """Write each record plus a ``<record>.repairs.json`` provenance
    sidecar into the destination directory, then a ``manifest.txt``
    naming them all. Overwrites are idempotent: identical inputs yield
    byte-identical files."""
    dest = Path(destination)
    dest.mkdir(parents=True, exist_ok=True)
    manifest: list[tuple[str, str]] = []
    failures: list[WriteFailure] = []
    for record in repaired.records:
        stem = _safe_stem(record.record_ref)
        try:
            (dest / f"{stem}.json").write_text(
                record_to_json(record, template), encoding="utf-8"
            )
            sidecar = [
                action_to_dict(a) for a in repaired.provenance.get(record.record_ref, ())
            ]
            (dest / f"{stem}.repairs.json").write_text(
                json.dumps(sidecar, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
            )
            manifest.append((record.record_ref, f"{stem}.json"))
        except OSError as exc:
            failures.append(WriteFailure(record_ref=record.record_ref, cause=str(exc)))
    manifest_text = "".join(f"{ref}\t{name}\n" for ref, name in manifest)
    (dest / "manifest.txt").write_text(manifest_text, encoding="utf-8")
    return manifest, failures
