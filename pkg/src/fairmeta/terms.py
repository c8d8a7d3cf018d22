"""Controlled vocabularies: loading, value-set resolution, and term lookup.

The local vocabulary store stands in for a remote ontology repository;
anything that can answer ``resolve_value_set`` / ``lookup_exact`` /
``closest_match`` (see :class:`TerminologyClient`) can replace it without
touching the evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

from .errors import (
    DuplicateIriError,
    MalformedDocumentError,
    UnknownRootTermError,
    UnknownTermError,
    UnknownVocabularyError,
)
from .records import FieldValue, Literal, TermRef
from .template import SelectAll, SelectBranch, ValueSetSpec


@dataclass(frozen=True)
class TermRecord:
    iri: str
    label: str
    synonyms: tuple[str, ...] = ()
    parents: tuple[str, ...] = ()


@dataclass(frozen=True)
class Vocabulary:
    id: str
    terms: tuple[TermRecord, ...] = ()


@dataclass(frozen=True)
class MatchCandidate:
    term: TermRecord
    score: float
    matched_on: str  # "LABEL" or "SYNONYM"


def normalize(s: str) -> str:
    """Casefold, drop everything but letters/digits/spaces, collapse runs
    of whitespace. Used identically at index and query time."""
    cleaned = "".join(c if c.isalnum() or c.isspace() else " " for c in s.casefold())
    return " ".join(cleaned.split())


def levenshtein(a: str, b: str) -> int:
    """Edit distance with unit costs, two-row dynamic programming."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    current[-1] + 1,
                    previous[j] + 1,
                    previous[j - 1] + (ca != cb),
                )
            )
        previous = current
    return previous[-1]


def similarity(a: str, b: str) -> float:
    """Normalized-Levenshtein similarity in [0, 1] over normalized strings."""
    na, nb = normalize(a), normalize(b)
    longest = max(len(na), len(nb))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(na, nb) / longest


def name_similarity(a: str, b: str) -> float:
    """Similarity between machine names: casefold only, so underscores
    count toward the length (``sampl_ID`` vs ``sample_ID`` is 8/9)."""
    na, nb = a.casefold(), b.casefold()
    longest = max(len(na), len(nb))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(na, nb) / longest


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

_HEADER = ("iri", "label", "synonyms", "parents")


def load_vocabulary(doc: str, vocab_id: str) -> Vocabulary:
    """Parse the TSV vocabulary format (header ``iri label synonyms
    parents``; multi-valued cells are ``|``-separated)."""
    lines = doc.splitlines()
    if not lines:
        return Vocabulary(id=vocab_id)
    header = tuple(h.strip() for h in lines[0].split("\t"))
    if header != _HEADER:
        expected = "\t".join(_HEADER)
        raise MalformedDocumentError(
            f"vocabulary header must be {expected!r}, got {lines[0]!r}"
        )
    terms: list[TermRecord] = []
    seen: set[str] = set()
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) < 2:
            raise MalformedDocumentError("vocabulary row needs at least iri and label", line=line_no)
        cells += [""] * (4 - len(cells))
        iri, label, synonyms, parents = (c.strip() for c in cells[:4])
        if not iri:
            raise MalformedDocumentError("row has empty iri", line=line_no)
        if not label:
            raise MalformedDocumentError("row has empty label", line=line_no)
        if iri in seen:
            raise DuplicateIriError(f"iri {iri} appears more than once", line=line_no)
        seen.add(iri)
        terms.append(
            TermRecord(
                iri=iri,
                label=label,
                synonyms=tuple(s.strip() for s in synonyms.split("|") if s.strip()),
                parents=tuple(p.strip() for p in parents.split("|") if p.strip()),
            )
        )
    return Vocabulary(id=vocab_id, terms=tuple(terms))


def dangling_parents(vocab: Vocabulary) -> list[str]:
    """Parent references that do not resolve within the vocabulary."""
    known = {t.iri for t in vocab.terms}
    return sorted({p for t in vocab.terms for p in t.parents if p not in known})


# ---------------------------------------------------------------------------
# Index
# ---------------------------------------------------------------------------


class TermIndex:
    """Immutable lookup structure over a set of vocabularies.

    Safe to share across concurrent evaluators; all queries are read-only.
    """

    def __init__(self, vocabularies: Iterable[Vocabulary]):
        self.vocabularies: dict[str, Vocabulary] = {}
        self._by_iri: dict[str, dict[str, TermRecord]] = {}
        self._children: dict[str, dict[str, tuple[str, ...]]] = {}
        self.label_index: dict[str, set[tuple[str, str]]] = {}
        for vocab in vocabularies:
            if vocab.id in self.vocabularies:
                raise DuplicateIriError(f"vocabulary {vocab.id!r} loaded twice")
            self.vocabularies[vocab.id] = vocab
            by_iri: dict[str, TermRecord] = {}
            children: dict[str, list[str]] = {}
            for term in vocab.terms:
                by_iri[term.iri] = term
                for parent in term.parents:
                    children.setdefault(parent, []).append(term.iri)
                for alias in (term.label, *term.synonyms):
                    self.label_index.setdefault(normalize(alias), set()).add(
                        (vocab.id, term.iri)
                    )
            self._by_iri[vocab.id] = by_iri
            self._children[vocab.id] = {k: tuple(v) for k, v in children.items()}

    def term(self, vocab_id: str, iri: str) -> TermRecord | None:
        return self._by_iri.get(vocab_id, {}).get(iri)

    def children_of(self, vocab_id: str, iri: str) -> tuple[str, ...]:
        return self._children.get(vocab_id, {}).get(iri, ())

    def ids(self) -> set[str]:
        return set(self.vocabularies)


# ---------------------------------------------------------------------------
# Value-set resolution and matching
# ---------------------------------------------------------------------------


def resolve_value_set(specs: Sequence[ValueSetSpec], idx: TermIndex) -> tuple[TermRecord, ...]:
    """Union of the terms selected by each spec, deduplicated by iri and
    ordered by (label, iri) for determinism."""
    collected: dict[str, TermRecord] = {}
    for spec in specs:
        vocab = idx.vocabularies.get(spec.source)
        if vocab is None:
            raise UnknownVocabularyError(f"vocabulary {spec.source!r} is not loaded")
        if isinstance(spec.selector, SelectAll):
            chosen: Iterable[TermRecord] = vocab.terms
        elif isinstance(spec.selector, SelectBranch):
            root = spec.selector.root
            if idx.term(spec.source, root) is None:
                raise UnknownRootTermError(
                    f"branch root {root} not found in {spec.source!r}"
                )
            reached: list[str] = []
            seen = {root}
            frontier = [root]
            while frontier:
                current = frontier.pop()
                reached.append(current)
                for child in idx.children_of(spec.source, current):
                    if child not in seen:
                        seen.add(child)
                        frontier.append(child)
            chosen = [idx.term(spec.source, iri) for iri in reached]  # type: ignore[misc]
        else:
            terms = []
            for iri in spec.selector.terms:
                term = idx.term(spec.source, iri)
                if term is None:
                    raise UnknownTermError(f"term {iri} not found in {spec.source!r}")
                terms.append(term)
            chosen = terms
        for term in chosen:
            collected.setdefault(term.iri, term)
    return tuple(sorted(collected.values(), key=lambda t: (t.label.casefold(), t.iri)))


def lookup_exact(value: FieldValue, valueset: Sequence[TermRecord]) -> TermRecord | None:
    """Exact membership: term references match by iri, literals by
    normalized label or synonym equality."""
    if isinstance(value, TermRef):
        for term in valueset:
            if term.iri == value.iri:
                return term
        return None
    if isinstance(value, Literal):
        wanted = normalize(value.raw)
        if not wanted:
            return None
        for term in valueset:
            if normalize(term.label) == wanted:
                return term
            if any(normalize(s) == wanted for s in term.synonyms):
                return term
    return None


def closest_match(value: str, valueset: Sequence[TermRecord], k: int = 1) -> list[MatchCandidate]:
    """Rank the value set by similarity to ``value``.

    Each term scores its best alias (label or synonym); ties order by
    score desc, label asc, iri asc, so the ranking is deterministic.
    Returns ``min(k, len(valueset))`` candidates.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    scored: list[MatchCandidate] = []
    for term in valueset:
        best = similarity(value, term.label)
        matched_on = "LABEL"
        for synonym in term.synonyms:
            s = similarity(value, synonym)
            if s > best:
                best = s
                matched_on = "SYNONYM"
        scored.append(MatchCandidate(term=term, score=best, matched_on=matched_on))
    scored.sort(key=lambda c: (-c.score, c.term.label.casefold(), c.term.iri))
    return scored[:k]


class TerminologyClient(Protocol):
    """Boundary for plugging in a remote ontology repository client."""

    def resolve_value_set(self, specs: Sequence[ValueSetSpec]) -> tuple[TermRecord, ...]: ...

    def lookup_exact(self, value: FieldValue, specs: Sequence[ValueSetSpec]) -> TermRecord | None: ...

    def closest_match(self, value: str, specs: Sequence[ValueSetSpec], k: int) -> list[MatchCandidate]: ...


class LocalTerminologyClient:
    """TerminologyClient backed by an in-memory :class:`TermIndex`."""

    def __init__(self, idx: TermIndex):
        self.idx = idx

    def resolve_value_set(self, specs: Sequence[ValueSetSpec]) -> tuple[TermRecord, ...]:
        return resolve_value_set(specs, self.idx)

    def lookup_exact(self, value: FieldValue, specs: Sequence[ValueSetSpec]) -> TermRecord | None:
        return lookup_exact(value, self.resolve_value_set(specs))

    def closest_match(self, value: str, specs: Sequence[ValueSetSpec], k: int) -> list[MatchCandidate]:
        return closest_match(value, self.resolve_value_set(specs), k)
