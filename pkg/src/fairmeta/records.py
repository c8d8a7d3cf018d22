"""Metadata record instances in the linked-data interchange subset.

A record maps dotted field paths to ordered value lists. Values are
either literals (``{"@value": "208", "@type": "xsd:float"}`` or a bare
string), references to controlled terms (``{"@id": ..., "rdfs:label":
...}``), or the explicit empty value produced by whitespace-only input.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Union

from .errors import AmbiguousValueError, MalformedDocumentError
from .fieldpath import FieldPath, is_machine_name
from .template import Template, ValueKind, flatten_fields

XSD_INTEGER = "xsd:integer"
XSD_FLOAT = "xsd:float"
XSD_DATE = "xsd:date"

# lexical forms accepted for typed numeric literals
INTEGER_LEXICAL_RE = re.compile(r"[+-]?\d+\Z")
DECIMAL_LEXICAL_RE = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\Z")


@dataclass(frozen=True)
class Literal:
    raw: str
    datatype: str | None = None


@dataclass(frozen=True)
class TermRef:
    iri: str
    label: str = ""

    def __post_init__(self) -> None:
        if not self.iri:
            raise ValueError("term reference requires a nonempty iri")


@dataclass(frozen=True)
class Empty:
    """A present-but-blank entry; distinct from an absent field."""


EMPTY = Empty()

FieldValue = Union[Literal, TermRef, Empty]


def display(value: FieldValue) -> str:
    """Human-facing rendering used in issue listings and provenance."""
    if isinstance(value, Literal):
        return value.raw
    if isinstance(value, TermRef):
        return value.label or value.iri
    return ""


@dataclass(frozen=True)
class MetadataRecord:
    record_ref: str
    entries: dict[FieldPath, tuple[FieldValue, ...]] = field(default_factory=dict)

    def values_at(self, path: FieldPath) -> tuple[FieldValue, ...]:
        return self.entries.get(path, ())

    def is_filled(self, path: FieldPath) -> bool:
        return any(not isinstance(v, Empty) for v in self.values_at(path))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_record(record_ref: str, doc: str | bytes | dict) -> MetadataRecord:
    """Parse an instance document. Unknown keys are kept; nothing is lost.

    Raises MalformedDocumentError on syntax or shape problems and
    AmbiguousValueError when an object carries both ``@value`` and ``@id``.
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise MalformedDocumentError(f"record is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocumentError("record document must be a JSON object")
    entries: dict[FieldPath, list[FieldValue]] = {}
    _collect(doc, (), entries)
    return MetadataRecord(
        record_ref=record_ref, entries={p: tuple(vs) for p, vs in entries.items()}
    )


def _collect(obj: dict, prefix: tuple[str, ...], entries: dict[FieldPath, list[FieldValue]]) -> None:
    for key, raw in obj.items():
        if key.startswith("@") or ":" in key:
            # reserved/context keys at object level are not fields
            continue
        if not is_machine_name(key):
            raise MalformedDocumentError(
                f"record key {key!r} is not a valid machine name",
                path=".".join(prefix) or None,
            )
        _collect_value(raw, prefix + (key,), entries)


def _collect_value(
    raw: object, segments: tuple[str, ...], entries: dict[FieldPath, list[FieldValue]]
) -> None:
    path_str = ".".join(segments)
    if isinstance(raw, list):
        for item in raw:
            if isinstance(item, list):
                raise MalformedDocumentError("nested arrays are not allowed", path=path_str)
            _collect_value(item, segments, entries)
        return
    if isinstance(raw, dict):
        has_value = "@value" in raw
        has_id = "@id" in raw
        if has_value and has_id:
            raise AmbiguousValueError(
                "object carries both '@value' and '@id'", path=path_str
            )
        if has_value:
            _append(entries, segments, _literal(raw.get("@value"), raw.get("@type"), path_str))
            return
        if has_id:
            iri = raw.get("@id")
            if not isinstance(iri, str) or not iri:
                raise MalformedDocumentError("'@id' must be a nonempty string", path=path_str)
            label = raw.get("rdfs:label", "")
            if not isinstance(label, str):
                raise MalformedDocumentError("'rdfs:label' must be a string", path=path_str)
            _append(entries, segments, TermRef(iri=iri, label=label))
            return
        # nested element object
        _collect(raw, segments, entries)
        return
    _append(entries, segments, _literal(raw, None, path_str))


def _literal(raw: object, datatype: object, path_str: str) -> FieldValue:
    if datatype is not None and not isinstance(datatype, str):
        raise MalformedDocumentError("'@type' must be a string", path=path_str)
    if raw is None:
        return EMPTY
    if isinstance(raw, bool):
        text = "true" if raw else "false"
    elif isinstance(raw, (int, float)):
        text = json.dumps(raw)
    elif isinstance(raw, str):
        text = raw
    else:
        raise MalformedDocumentError("'@value' must be a scalar", path=path_str)
    if text.strip() == "":
        return EMPTY
    return Literal(raw=text, datatype=datatype)


def _append(
    entries: dict[FieldPath, list[FieldValue]], segments: tuple[str, ...], value: FieldValue
) -> None:
    entries.setdefault(FieldPath(segments), []).append(value)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def serialize_record(r: MetadataRecord, t: Template) -> dict:
    """Emit the instance document for a record.

    Template-known integer/decimal fields get their ``@type`` filled in
    when the stored literal is untyped, so persisted records are always
    explicitly typed.
    """
    kinds = {path: spec.value_kind for path, spec, _ in flatten_fields(t)}
    doc: dict = {}
    for path, values in r.entries.items():
        rendered = [_value_to_doc(v, kinds.get(path)) for v in values]
        _insert(doc, path.segments, rendered if len(rendered) != 1 else rendered[0])
    return doc


def record_to_json(r: MetadataRecord, t: Template) -> str:
    return json.dumps(serialize_record(r, t), indent=2, ensure_ascii=False) + "\n"


def _value_to_doc(value: FieldValue, kind: ValueKind | None) -> object:
    if isinstance(value, Empty):
        return {"@value": ""}
    if isinstance(value, TermRef):
        out: dict = {"@id": value.iri}
        if value.label:
            out["rdfs:label"] = value.label
        return out
    datatype = value.datatype
    # only canonicalize untyped literals that really are numeric; aberrant
    # values must survive a round-trip unchanged
    if datatype is None and kind is ValueKind.INTEGER and INTEGER_LEXICAL_RE.match(value.raw.strip()):
        datatype = XSD_INTEGER
    elif datatype is None and kind is ValueKind.DECIMAL and DECIMAL_LEXICAL_RE.match(value.raw.strip()):
        datatype = XSD_FLOAT
    out = {"@value": value.raw}
    if datatype:
        out["@type"] = datatype
    return out


def _insert(doc: dict, segments: tuple[str, ...], value: object) -> None:
    node = doc
    for seg in segments[:-1]:
        node = node.setdefault(seg, {})
        if not isinstance(node, dict):
            raise MalformedDocumentError(
                f"cannot nest under a leaf value", path=".".join(segments)
            )
    node[segments[-1]] = value


# ---------------------------------------------------------------------------
# Manifests and batch input
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RecordManifest:
    """Ordered (record_ref, locator) pairs; refs are unique."""

    entries: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class FetchFailure:
    record_ref: str
    cause: str
    code: str = "FETCH_FAILED"


Fetcher = Callable[[str], str]


def local_file_fetcher(locator: str) -> str:
    return Path(locator).read_text(encoding="utf-8")


def load_manifest(path: str | Path) -> RecordManifest:
    """Read a manifest file (``ref<TAB>locator`` lines) or a directory of
    ``*.json`` records named by file stem."""
    path = Path(path)
    entries: list[tuple[str, str]] = []
    seen: set[str] = set()
    if path.is_dir():
        for child in sorted(path.glob("*.json")):
            entries.append((child.stem, str(child)))
            seen.add(child.stem)
        return RecordManifest(entries=tuple(entries))
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" not in line:
            raise MalformedDocumentError(
                f"manifest line must be 'record_ref<TAB>locator'", line=line_no
            )
        ref, locator = line.split("\t", 1)
        ref, locator = ref.strip(), locator.strip()
        if not ref or not locator:
            raise MalformedDocumentError("manifest line has empty ref or locator", line=line_no)
        if ref in seen:
            raise MalformedDocumentError(f"duplicate record ref {ref!r}", line=line_no)
        seen.add(ref)
        # relative locators resolve against the manifest's directory
        loc_path = Path(locator)
        if not loc_path.is_absolute():
            locator = str(path.parent / loc_path)
        entries.append((ref, locator))
    return RecordManifest(entries=tuple(entries))


def resolve_manifest(
    m: RecordManifest, fetcher: Fetcher = local_file_fetcher
) -> tuple[list[MetadataRecord], list[FetchFailure]]:
    """Fetch and parse every manifest entry, in manifest order.

    Failures are collected per entry, never raised, so one unreadable
    record does not abort the batch.
    """
    records: list[MetadataRecord] = []
    failures: list[FetchFailure] = []
    for ref, locator in m.entries:
        try:
            text = fetcher(locator)
            records.append(parse_record(ref, text))
        except Exception as exc:  # noqa: BLE001 - contract: collect, don't throw
            failures.append(FetchFailure(record_ref=ref, cause=str(exc)))
    return records, failures
