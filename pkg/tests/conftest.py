from __future__ import annotations

import json
from pathlib import Path

import pytest

from fairmeta.records import MetadataRecord, load_manifest, parse_record, resolve_manifest
from fairmeta.template import Template, parse_template
from fairmeta.terms import TermIndex, Vocabulary, load_vocabulary

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

_ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and "test_acceptance" in item.nodeid:
        _ACCEPTANCE_RESULTS.append((item.name, report.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for name, passed in _ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")

BATCH_ORDER = [
    "Visium_90LC_A4_S1",
    "Visium_90LC_A4_S2",
    "Visium_90LC_I4_S1",
    "Visium_90LC_I4_S2",
    "Visium_90LC_I4_S3",
]


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def sample_template_doc() -> dict:
    return json.loads((FIXTURES / "sample_section.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def sample_template(sample_template_doc) -> Template:
    return parse_template(sample_template_doc)


@pytest.fixture(scope="session")
def vocabularies() -> list[Vocabulary]:
    vocabs = []
    for path in sorted((FIXTURES / "vocabularies").glob("*.tsv")):
        vocabs.append(load_vocabulary(path.read_text(encoding="utf-8"), path.stem))
    return vocabs


@pytest.fixture(scope="session")
def term_index(vocabularies) -> TermIndex:
    return TermIndex(vocabularies)


@pytest.fixture(scope="session")
def batch_records() -> list[MetadataRecord]:
    manifest = load_manifest(FIXTURES / "manifest.txt")
    records, failures = resolve_manifest(manifest)
    assert not failures
    return records


@pytest.fixture(scope="session")
def review_record() -> MetadataRecord:
    path = FIXTURES / "review" / "Visium_90LC_I4_S2.json"
    return parse_record(path.stem, path.read_text(encoding="utf-8"))
