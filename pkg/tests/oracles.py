"""Independent reference implementations used only by the test suite.

These deliberately avoid the package's own matching and evaluation code
paths: full-matrix edit distance instead of the two-row recurrence,
regex-based normalization instead of character filtering, and a direct
field-by-field record walk instead of the aligned evaluator. Tests
compare the production code against these.
"""

from __future__ import annotations

import re

_STRIP_RE = re.compile(r"[^\w\s]|_", re.UNICODE)


def oracle_normalize(s: str) -> str:
    return " ".join(_STRIP_RE.sub(" ", s.casefold()).split())


def oracle_levenshtein(a: str, b: str) -> int:
    """Textbook full-matrix edit distance."""
    m, n = len(a), len(b)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        dp[i][0] = i
    for j in range(n + 1):
        dp[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            dp[i][j] = min(dp[i - 1][j] + 1, dp[i][j - 1] + 1, dp[i - 1][j - 1] + cost)
    return dp[m][n]


def oracle_similarity(a: str, b: str) -> float:
    na, nb = oracle_normalize(a), oracle_normalize(b)
    longest = max(len(na), len(nb))
    if longest == 0:
        return 1.0
    return 1.0 - oracle_levenshtein(na, nb) / longest


def oracle_rank(query: str, terms, k: int | None = None):
    """All-pairs ranking: (iri, label, score, matched_on) tuples ordered by
    score desc, label asc (casefolded), iri asc."""
    rows = []
    for term in terms:
        best = oracle_similarity(query, term.label)
        matched_on = "LABEL"
        for synonym in term.synonyms:
            s = oracle_similarity(query, synonym)
            if s > best:
                best = s
                matched_on = "SYNONYM"
        rows.append((term.iri, term.label, best, matched_on))
    rows.sort(key=lambda r: (-r[2], r[1].casefold(), r[0]))
    if k is not None:
        rows = rows[:k]
    return rows


# ---------------------------------------------------------------------------
# naive record evaluation: every (template field, record entry) pair, walked
# directly over the raw structures
# ---------------------------------------------------------------------------

_INT_OK = re.compile(r"^[+-]?[0-9]+$")
_DEC_OK = re.compile(r"^[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?$")
_DATE_OK = re.compile(r"^[0-9]{4}-[0-9]{2}-[0-9]{2}$")


def _walk_template(nodes, prefix, anc_required, fields, elements):
    for node in nodes:
        dotted = ".".join(prefix + [node.name])
        if hasattr(node, "children"):
            elements.append((dotted, node.required))
            _walk_template(node.children, prefix + [node.name], anc_required and node.required, fields, elements)
        else:
            fields.append((dotted, node, anc_required and node.required))


def _is_real_date(raw):
    import datetime

    if not _DATE_OK.match(raw.strip()):
        return False
    try:
        datetime.date.fromisoformat(raw.strip())
        return True
    except ValueError:
        return False


def naive_evaluate(record, template, vocabularies):
    """Returns the set of (dotted_path, kind, observed) triples the
    evaluator must produce for this record.

    ``vocabularies`` is a list of Vocabulary values; selector resolution,
    membership checks, and rename matching are all recomputed here from
    first principles.
    """
    fields, elements = [], []
    _walk_template(template.children, [], True, fields, elements)
    entry_keys = {p.dotted: vals for p, vals in record.entries.items()}

    vocab_by_id = {v.id: v for v in vocabularies}

    def resolve(specs):
        out = {}
        for spec in specs:
            vocab = vocab_by_id[spec.source]
            kind = type(spec.selector).__name__
            if kind == "SelectAll":
                chosen = list(vocab.terms)
            elif kind == "SelectBranch":
                children_of = {}
                for t in vocab.terms:
                    for parent in t.parents:
                        children_of.setdefault(parent, []).append(t.iri)
                by_iri = {t.iri: t for t in vocab.terms}
                todo, seen = [spec.selector.root], {spec.selector.root}
                chosen = []
                while todo:
                    cur = todo.pop()
                    chosen.append(by_iri[cur])
                    for ch in children_of.get(cur, []):
                        if ch not in seen:
                            seen.add(ch)
                            todo.append(ch)
            else:
                by_iri = {t.iri: t for t in vocab.terms}
                chosen = [by_iri[i] for i in spec.selector.terms]
            for t in chosen:
                out[t.iri] = t
        return list(out.values())

    instantiated = set()
    for dotted, _ in elements:
        prefix = dotted + "."
        if any(k.startswith(prefix) for k in entry_keys):
            instantiated.add(dotted)
    elem_required = dict(elements)

    def demanded(dotted, spec):
        if not spec.required:
            return False
        parts = dotted.split(".")
        for i in range(1, len(parts)):
            anc = ".".join(parts[:i])
            if not elem_required[anc] and anc not in instantiated:
                return False
        return True

    issues = set()
    known_paths = {dotted for dotted, _, _ in fields}
    missing_demanded = []
    for dotted, spec, _ in fields:
        need = demanded(dotted, spec)
        values = entry_keys.get(dotted)
        if values is None:
            if need:
                issues.add((dotted, "MISSING_REQUIRED_FIELD", ""))
                missing_demanded.append(dotted)
            continue
        non_empty = [v for v in values if type(v).__name__ != "Empty"]
        if not non_empty:
            if need:
                issues.add((dotted, "MISSING_REQUIRED_VALUE", ""))
            continue
        for v in non_empty:
            is_term = type(v).__name__ == "TermRef"
            text = v.label or v.iri if is_term else v.raw
            vt = spec.value_kind.value
            if vt == "integer":
                if is_term or not _INT_OK.match(v.raw.strip()):
                    issues.add((dotted, "EXPECTING_INPUT_NUMBER", text))
            elif vt == "decimal":
                if is_term or not _DEC_OK.match(v.raw.strip()):
                    issues.add((dotted, "EXPECTING_INPUT_NUMBER", text))
            elif vt == "date":
                if is_term or not _is_real_date(v.raw):
                    issues.add((dotted, "EXPECTING_INPUT_DATE", text))
            elif vt == "controlled":
                terms = resolve(spec.value_sets)
                if is_term:
                    ok = any(t.iri == v.iri for t in terms)
                else:
                    wanted = oracle_normalize(v.raw)
                    ok = bool(wanted) and any(
                        oracle_normalize(t.label) == wanted
                        or any(oracle_normalize(s) == wanted for s in t.synonyms)
                        for t in terms
                    )
                if not ok:
                    issues.add((dotted, "VALUE_NOT_ONTOLOGY_TERM", text))

    unknown = [k for k in entry_keys if k not in known_paths]

    def name_sim(a, b):
        a, b = a.casefold(), b.casefold()
        longest = max(len(a), len(b))
        return 1.0 if longest == 0 else 1 - oracle_levenshtein(a, b) / longest

    pairs = []
    for miss in missing_demanded:
        for cand in unknown:
            s = name_sim(cand, miss)
            if s >= 0.8:
                pairs.append((s, cand, miss))
    pairs.sort(key=lambda p: (-p[0], p[1], p[2]))
    used_c, used_m, renamed = set(), set(), set()
    for s, cand, miss in pairs:
        if cand in used_c or miss in used_m:
            continue
        used_c.add(cand)
        used_m.add(miss)
        renamed.add(cand)
        issues.add((cand, "POSSIBLE_FIELD_MISSPELLING", cand))
    for cand in unknown:
        if cand not in renamed:
            issues.add((cand, "UNKNOWN_FIELD", cand))
    return issues
