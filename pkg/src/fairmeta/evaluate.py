"""Record evaluation: issue detection, quality metrics, batch reports.

Evaluation is a pure function of (record, template, term index): the same
record evaluated alone or inside any batch yields the identical result,
which is what makes batch runs safe to parallelize and reports byte-stable.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .fieldpath import FieldPath
from .records import (
    DECIMAL_LEXICAL_RE,
    Empty,
    FetchFailure,
    FieldValue,
    INTEGER_LEXICAL_RE,
    Literal,
    MetadataRecord,
    TermRef,
    display,
)
from .template import FieldSpec, Template, ValueKind, flatten_fields, iter_elements
from .terms import (
    TermIndex,
    TermRecord,
    closest_match,
    lookup_exact,
    name_similarity,
    resolve_value_set,
)

# suggestion policy: full candidate list for small value sets, top-10 otherwise
MAX_TERM_SUGGESTIONS = 10
RENAME_SIMILARITY_THRESHOLD = 0.8


class IssueKind(str, Enum):
    MISSING_REQUIRED_VALUE = "MISSING_REQUIRED_VALUE"
    MISSING_REQUIRED_FIELD = "MISSING_REQUIRED_FIELD"
    POSSIBLE_FIELD_MISSPELLING = "POSSIBLE_FIELD_MISSPELLING"
    EXPECTING_INPUT_NUMBER = "EXPECTING_INPUT_NUMBER"
    EXPECTING_INPUT_DATE = "EXPECTING_INPUT_DATE"
    VALUE_NOT_ONTOLOGY_TERM = "VALUE_NOT_ONTOLOGY_TERM"
    UNKNOWN_FIELD = "UNKNOWN_FIELD"


# the only kinds that mark a filled field invalid; UNKNOWN_FIELD is advisory
INVALID_VALUE_KINDS = frozenset(
    {
        IssueKind.EXPECTING_INPUT_NUMBER,
        IssueKind.EXPECTING_INPUT_DATE,
        IssueKind.VALUE_NOT_ONTOLOGY_TERM,
    }
)

MISSING_KINDS = frozenset(
    {IssueKind.MISSING_REQUIRED_VALUE, IssueKind.MISSING_REQUIRED_FIELD}
)


class Provenance(str, Enum):
    COERCION = "COERCION"
    TERM_MATCH = "TERM_MATCH"
    FIELD_RENAME = "FIELD_RENAME"


@dataclass(frozen=True)
class SuggestedValue:
    value: FieldValue
    score: float
    provenance: Provenance


@dataclass(frozen=True)
class Issue:
    record_ref: str
    path: FieldPath
    kind: IssueKind
    observed: str
    suggestions: tuple[SuggestedValue, ...] = ()

    @property
    def issue_id(self) -> str:
        return stable_issue_id(self.record_ref, self.path.dotted, self.kind.value, self.observed)


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a; the fixed hash behind issue identifiers."""
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def stable_issue_id(record_ref: str, path: str, kind: str, observed: str) -> str:
    key = "|".join((record_ref, path, kind, observed))
    return format(fnv1a64(key.encode("utf-8")), "016x")


@dataclass(frozen=True)
class RecordEvaluation:
    record_ref: str
    issues: tuple[Issue, ...]
    required_total: int
    required_filled: int
    filled_total: int
    filled_invalid: int

    @property
    def passed(self) -> bool:
        return self.required_filled == self.required_total and self.filled_invalid == 0

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass(frozen=True)
class BatchSummary:
    record_count: int
    pass_count: int
    field_noncompliance: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class EvaluationReport:
    template_ref: str
    records: tuple[RecordEvaluation, ...]
    errors: tuple[FetchFailure, ...] = ()

    @property
    def summary(self) -> BatchSummary:
        counts: dict[str, int] = {}
        for ev in self.records:
            for path in {i.path.dotted for i in ev.issues}:
                counts[path] = counts.get(path, 0) + 1
        ranked = tuple(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))
        return BatchSummary(
            record_count=len(self.records),
            pass_count=sum(1 for ev in self.records if ev.passed),
            field_noncompliance=ranked,
        )

    def record(self, record_ref: str) -> RecordEvaluation | None:
        for ev in self.records:
            if ev.record_ref == record_ref:
                return ev
        return None


# ---------------------------------------------------------------------------
# Alignment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Alignment:
    """Result of matching record keys against template paths."""

    aligned: tuple[tuple[FieldPath, FieldSpec, tuple[FieldValue, ...]], ...]
    missing_required: tuple[FieldPath, ...]
    unknown: tuple[FieldPath, ...]
    renames: tuple[tuple[FieldPath, FieldPath, float], ...]  # (unknown, missing, score)


def _demanded_paths(
    r: MetadataRecord, t: Template
) -> tuple[list[tuple[FieldPath, FieldSpec]], set[FieldPath]]:
    """Fields the record must fill: effectively-required fields, plus
    required fields under optional elements the record instantiated."""
    elements = dict(iter_elements(t))
    instantiated = {
        ep for ep in elements if any(entry.is_under(ep) for entry in r.entries)
    }

    demanded: list[tuple[FieldPath, FieldSpec]] = []
    for path, spec, _ in flatten_fields(t):
        if not spec.required:
            continue
        ancestors = (FieldPath(path.segments[: i + 1]) for i in range(len(path.segments) - 1))
        if all(elements[a].required or a in instantiated for a in ancestors):
            demanded.append((path, spec))
    return demanded, instantiated


def align_fields(r: MetadataRecord, t: Template) -> Alignment:
    """Match record entries to template fields by machine name, list the
    demanded-but-absent paths, and propose renames for unknown keys whose
    name sits within edit distance of a missing field name."""
    known = {path: spec for path, spec, _ in flatten_fields(t)}
    aligned = tuple(
        (path, known[path], values) for path, values in r.entries.items() if path in known
    )
    unknown = tuple(path for path in r.entries if path not in known)
    demanded, _ = _demanded_paths(r, t)
    missing_required = tuple(path for path, _ in demanded if path not in r.entries)

    # greedy one-to-one matching, best similarity first
    candidates: list[tuple[float, FieldPath, FieldPath]] = []
    for missing in missing_required:
        for candidate in unknown:
            score = name_similarity(candidate.dotted, missing.dotted)
            if score >= RENAME_SIMILARITY_THRESHOLD:
                candidates.append((score, candidate, missing))
    candidates.sort(key=lambda c: (-c[0], c[1].dotted, c[2].dotted))
    renames: list[tuple[FieldPath, FieldPath, float]] = []
    used_unknown: set[FieldPath] = set()
    used_missing: set[FieldPath] = set()
    for score, candidate, missing in candidates:
        if candidate in used_unknown or missing in used_missing:
            continue
        used_unknown.add(candidate)
        used_missing.add(missing)
        renames.append((candidate, missing, score))
    renames.sort(key=lambda rn: rn[0].dotted)
    return Alignment(
        aligned=aligned,
        missing_required=missing_required,
        unknown=unknown,
        renames=tuple(renames),
    )


# ---------------------------------------------------------------------------
# Value checks
# ---------------------------------------------------------------------------

_INTEGER_RE = INTEGER_LEXICAL_RE
_DECIMAL_RE = DECIMAL_LEXICAL_RE
_DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}\Z")
_LETTERS_WS_RE = re.compile(r"[^\W\d_]*\Z")  # letters only, after whitespace strip


@dataclass(frozen=True)
class IssueDraft:
    kind: IssueKind
    observed: str
    suggestions: tuple[SuggestedValue, ...] = ()


def _leading_numeric_token(raw: str, kind: ValueKind) -> str | None:
    """The maximal leading numeric token, offered as a coercion only when
    the remainder is nothing but whitespace and letters ("208 days" yes,
    "20.8.1" no)."""
    text = raw.strip()
    pattern = _INTEGER_RE if kind is ValueKind.INTEGER else _DECIMAL_RE
    token = None
    for end in range(len(text), 0, -1):
        if pattern.match(text[:end]):
            token = text[:end]
            break
    if token is None:
        return None
    remainder = text[len(token):]
    if all(_LETTERS_WS_RE.match(part) for part in remainder.split()):
        return token
    return None


def _is_valid_date(raw: str) -> bool:
    import datetime

    if not _DATE_RE.match(raw.strip()):
        return False
    try:
        datetime.date.fromisoformat(raw.strip())
        return True
    except ValueError:
        return False


def check_value(
    spec: FieldSpec,
    value: FieldValue,
    idx: TermIndex,
    *,
    required: bool = False,
    valueset: Sequence[TermRecord] | None = None,
) -> list[IssueDraft]:
    """Check one value against its field spec.

    ``valueset`` lets callers reuse an already-resolved term set; when
    omitted, the field's value-set specs are resolved against ``idx``.
    """
    if isinstance(value, Empty):
        if required:
            # free-entry repair slot: no derivable suggestion
            return [IssueDraft(kind=IssueKind.MISSING_REQUIRED_VALUE, observed="")]
        return []

    if spec.value_kind in (ValueKind.INTEGER, ValueKind.DECIMAL):
        if isinstance(value, TermRef):
            return [IssueDraft(kind=IssueKind.EXPECTING_INPUT_NUMBER, observed=display(value))]
        pattern = _INTEGER_RE if spec.value_kind is ValueKind.INTEGER else _DECIMAL_RE
        if pattern.match(value.raw.strip()):
            return []
        suggestions: tuple[SuggestedValue, ...] = ()
        token = _leading_numeric_token(value.raw, spec.value_kind)
        if token is not None:
            datatype = "xsd:integer" if spec.value_kind is ValueKind.INTEGER else "xsd:float"
            suggestions = (
                SuggestedValue(
                    value=Literal(raw=token, datatype=datatype),
                    score=1.0,
                    provenance=Provenance.COERCION,
                ),
            )
        return [
            IssueDraft(
                kind=IssueKind.EXPECTING_INPUT_NUMBER,
                observed=value.raw,
                suggestions=suggestions,
            )
        ]

    if spec.value_kind is ValueKind.DATE:
        if isinstance(value, TermRef):
            return [IssueDraft(kind=IssueKind.EXPECTING_INPUT_DATE, observed=display(value))]
        if _is_valid_date(value.raw):
            return []
        return [IssueDraft(kind=IssueKind.EXPECTING_INPUT_DATE, observed=value.raw)]

    if spec.value_kind is ValueKind.CONTROLLED:
        if valueset is None:
            valueset = resolve_value_set(spec.value_sets, idx)
        if lookup_exact(value, valueset) is not None:
            return []
        query = display(value)
        k = min(len(valueset), MAX_TERM_SUGGESTIONS)
        candidates = closest_match(query, valueset, k) if k else []
        suggestions = tuple(
            SuggestedValue(
                value=TermRef(iri=c.term.iri, label=c.term.label),
                score=c.score,
                provenance=Provenance.TERM_MATCH,
            )
            for c in candidates
        )
        return [
            IssueDraft(
                kind=IssueKind.VALUE_NOT_ONTOLOGY_TERM,
                observed=query,
                suggestions=suggestions,
            )
        ]

    # TEXT accepts any non-empty literal or term reference
    return []


# ---------------------------------------------------------------------------
# Record evaluation
# ---------------------------------------------------------------------------


def evaluate_record(r: MetadataRecord, t: Template, idx: TermIndex) -> RecordEvaluation:
    """Evaluate one record: align fields, check every aligned value, and
    compute the completeness/adherence counters."""
    flattened = flatten_fields(t)
    known = {path: spec for path, spec, _ in flattened}
    valuesets = {
        path: resolve_value_set(spec.value_sets, idx)
        for path, spec, _ in flattened
        if spec.value_kind is ValueKind.CONTROLLED
    }

    alignment = align_fields(r, t)
    demanded, _ = _demanded_paths(r, t)
    demanded_paths = [path for path, _ in demanded]

    issues: list[Issue] = []
    seen_issue_keys: set[tuple[str, IssueKind, str]] = set()

    def add(path: FieldPath, draft: IssueDraft) -> None:
        key = (path.dotted, draft.kind, draft.observed)
        if key in seen_issue_keys:
            return
        seen_issue_keys.add(key)
        issues.append(
            Issue(
                record_ref=r.record_ref,
                path=path,
                kind=draft.kind,
                observed=draft.observed,
                suggestions=draft.suggestions,
            )
        )

    filled_paths: set[FieldPath] = set()
    invalid_paths: set[FieldPath] = set()

    # template order first: one pass over the flattened fields
    entries = r.entries
    demanded_set = set(demanded_paths)
    for path, spec, _ in flattened:
        values = entries.get(path)
        if values is None:
            if path in demanded_set:
                add(path, IssueDraft(kind=IssueKind.MISSING_REQUIRED_FIELD, observed=""))
            continue
        filled = any(not isinstance(v, Empty) for v in values)
        if filled:
            filled_paths.add(path)
        required_here = path in demanded_set
        valueset = valuesets.get(path)
        if not filled:
            if required_here:
                add(path, IssueDraft(kind=IssueKind.MISSING_REQUIRED_VALUE, observed=""))
            continue
        for value in values:
            if isinstance(value, Empty):
                continue  # blank entries beside real ones are not missing values
            for draft in check_value(spec, value, idx, required=required_here, valueset=valueset):
                add(path, draft)
                if draft.kind in INVALID_VALUE_KINDS:
                    invalid_paths.add(path)

    # rename proposals for unknown keys, then plain unknown-field advisories
    rename_sources = {src for src, _, _ in alignment.renames}
    for src, target, score in alignment.renames:
        add(
            src,
            IssueDraft(
                kind=IssueKind.POSSIBLE_FIELD_MISSPELLING,
                observed=src.dotted,
                suggestions=(
                    SuggestedValue(
                        value=Literal(raw=target.dotted),
                        score=score,
                        provenance=Provenance.FIELD_RENAME,
                    ),
                ),
            ),
        )
    for path in alignment.unknown:
        if path not in rename_sources:
            add(path, IssueDraft(kind=IssueKind.UNKNOWN_FIELD, observed=path.dotted))

    required_total = len(demanded_paths)
    required_filled = sum(1 for path in demanded_paths if r.is_filled(path))
    return RecordEvaluation(
        record_ref=r.record_ref,
        issues=tuple(issues),
        required_total=required_total,
        required_filled=required_filled,
        filled_total=len(filled_paths),
        filled_invalid=len(invalid_paths),
    )


def _round_half_away(x: float) -> int:
    import math

    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def compute_metrics(ev: RecordEvaluation) -> tuple[int, int]:
    """(completeness_pct, adherence_pct), rounded to the nearest integer
    with halves away from zero; empty denominators count as 100."""
    if ev.required_total == 0:
        completeness = 100
    else:
        completeness = _round_half_away(100.0 * ev.required_filled / ev.required_total)
    if ev.filled_total == 0:
        adherence = 100
    else:
        adherence = _round_half_away(
            100.0 * (ev.filled_total - ev.filled_invalid) / ev.filled_total
        )
    return completeness, adherence


# ---------------------------------------------------------------------------
# Batch evaluation
# ---------------------------------------------------------------------------


def evaluate_batch(
    records: Sequence[MetadataRecord],
    t: Template,
    idx: TermIndex,
    *,
    failures: Sequence[FetchFailure] = (),
    jobs: int | None = None,
) -> EvaluationReport:
    """Evaluate records in input order.

    ``jobs`` sets the worker count; results are merged in input order so
    the report is identical for any setting. Fetch failures ride along as
    report errors and stay out of every metric denominator.
    """
    if jobs is not None and jobs < 1:
        raise ValueError("jobs must be at least 1")
    if jobs == 1 or len(records) <= 1:
        evaluations = [evaluate_record(r, t, idx) for r in records]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            evaluations = list(pool.map(lambda r: evaluate_record(r, t, idx), records))
    return EvaluationReport(
        template_ref=t.id,
        records=tuple(evaluations),
        errors=tuple(failures),
    )
