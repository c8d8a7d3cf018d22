"""fairmeta: metadata template engine and FAIRness evaluator.

Parse machine-actionable metadata templates, validate metadata records
against them and their controlled vocabularies, propose and apply
repairs, and report per-record and repository-level quality.
"""

from .errors import EngineError
from .evaluate import (
    EvaluationReport,
    Issue,
    IssueKind,
    RecordEvaluation,
    SuggestedValue,
    align_fields,
    check_value,
    compute_metrics,
    evaluate_batch,
    evaluate_record,
)
from .fieldpath import FieldPath
from .records import (
    EMPTY,
    Empty,
    FieldValue,
    Literal,
    MetadataRecord,
    RecordManifest,
    TermRef,
    load_manifest,
    parse_record,
    resolve_manifest,
    serialize_record,
)
from .repair import (
    Policy,
    RepairAction,
    RepairSession,
    apply_repairs,
    build_session,
    persist_output,
    propose_repairs,
    repair_records,
)
from .report import ReportFormat, render_report, report_from_json, report_to_json
from .template import (
    ElementSpec,
    FieldSpec,
    Template,
    ValueKind,
    ValueSetSpec,
    author_template,
    flatten_fields,
    parse_template,
    serialize_template,
    validate_template,
)
from .terms import (
    MatchCandidate,
    TermIndex,
    TermRecord,
    Vocabulary,
    closest_match,
    load_vocabulary,
    lookup_exact,
    resolve_value_set,
)

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "Empty",
    "EngineError",
    "ElementSpec",
    "EvaluationReport",
    "FieldPath",
    "FieldSpec",
    "FieldValue",
    "Issue",
    "IssueKind",
    "Literal",
    "MatchCandidate",
    "MetadataRecord",
    "Policy",
    "RecordEvaluation",
    "RecordManifest",
    "RepairAction",
    "RepairSession",
    "ReportFormat",
    "SuggestedValue",
    "Template",
    "TermIndex",
    "TermRecord",
    "TermRef",
    "ValueKind",
    "ValueSetSpec",
    "Vocabulary",
    "align_fields",
    "apply_repairs",
    "author_template",
    "build_session",
    "check_value",
    "closest_match",
    "compute_metrics",
    "evaluate_batch",
    "evaluate_record",
    "flatten_fields",
    "load_manifest",
    "load_vocabulary",
    "lookup_exact",
    "parse_record",
    "parse_template",
    "persist_output",
    "propose_repairs",
    "render_report",
    "repair_records",
    "report_from_json",
    "report_to_json",
    "resolve_manifest",
    "resolve_value_set",
    "serialize_record",
    "serialize_template",
    "validate_template",
]
