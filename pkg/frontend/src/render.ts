// HTML renderers for the two screens. Pure string builders so they are
// testable without a browser; app.ts attaches event handlers afterwards.

import type { ApplyResultPayload } from './models.js';
import type { DetailVM, IssueRowVM, SummaryVM } from './viewmodels.js';

export function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function bar(pct: number): string {
  return `<span class="bar"><span class="bar-fill" style="width:${Math.max(0, Math.min(100, pct))}%"></span></span>`;
}

export function renderSummary(vm: SummaryVM, jobId: string): string {
  const rows = vm.rows
    .map(
      (row) => `
    <tr data-ref="${esc(row.ref)}">
      <td><a href="?job=${encodeURIComponent(jobId)}&amp;record=${encodeURIComponent(row.ref)}">${esc(row.ref)}</a></td>
      <td class="${row.passed ? 'pass' : 'fail'}">${row.statusGlyph}</td>
      <td>${bar(row.completenessPct)} ${row.completenessPct}% <span class="note">${esc(row.completenessText)}</span></td>
      <td>${bar(row.adherencePct)} ${row.adherencePct}% <span class="note">${esc(row.adherenceText)}</span></td>
    </tr>`,
    )
    .join('');
  const ranking = vm.noncompliance
    .map((n) => `<li><code>${esc(n.path)}</code> &mdash; ${n.count} record(s)</li>`)
    .join('');
  const errors = vm.errors.length
    ? `<section class="errors"><h2>Errors</h2><ul>${vm.errors
        .map((e) => `<li>${esc(e.ref)}: ${esc(e.code)}: ${esc(e.cause)}</li>`)
        .join('')}</ul></section>`
    : '';
  const placeholder = vm.rows.length
    ? ''
    : '<p class="placeholder">No records in this evaluation.</p>';
  return `
  <h1>Metadata Evaluation Summary</h1>
  <p>Template: <strong>${esc(vm.template)}</strong></p>
  <p>Evaluating ${vm.recordCount} metadata records &mdash; ${vm.passCount} pass.</p>
  <table class="summary" data-testid="summary-table">
    <thead><tr><th>Metadata reference</th><th>Status</th><th>Completeness</th><th>Adherence</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>
  ${placeholder}
  ${errors}
  <section class="panel">
    <h2>Most noncompliant fields</h2>
    <ol data-testid="noncompliance">${ranking}</ol>
  </section>
  <section class="panel">
    <h2>Repair</h2>
    <button data-action="apply-auto">Apply all suggestions (auto)</button>
    <button data-action="apply-review">Apply accepted decisions (review)</button>
    <div id="apply-result"></div>
  </section>`;
}

function renderControl(row: IssueRowVM): string {
  if (row.control.kind === 'dropdown') {
    const options = row.control.options
      .map(
        (o, i) =>
          `<option value="${i}">${esc(o.label)} (${o.score.toFixed(2)})</option>`,
      )
      .join('');
    const search = row.control.searchable
      ? `<input type="search" class="option-search" data-issue="${esc(row.issueId)}" placeholder="filter terms...">`
      : '';
    return `${search}<select data-issue="${esc(row.issueId)}">${options}</select>`;
  }
  return `<input type="text" data-issue="${esc(row.issueId)}" value="${esc(row.control.prefill)}" placeholder="enter a value">`;
}

function decisionBadge(row: IssueRowVM): string {
  if (!row.decision || row.decision.status === 'PENDING') return '<span class="badge pending">pending</span>';
  const status = row.decision.status.toLowerCase();
  return `<span class="badge ${esc(status)}">${esc(status)}</span>`;
}

export function renderDetail(vm: DetailVM, jobId: string): string {
  const issueRows = vm.issueRows
    .map(
      (row) => `
    <tr class="issue-row" data-issue-id="${esc(row.issueId)}">
      <td><code>${esc(row.path)}</code></td>
      <td>${esc(row.observed) || '<span class="note">(empty)</span>'}</td>
      <td><span class="issue-kind">${esc(row.kind)}</span></td>
      <td>${renderControl(row)}</td>
      <td>
        <button data-decide="accept" data-issue="${esc(row.issueId)}">Accept</button>
        <button data-decide="reject" data-issue="${esc(row.issueId)}">Reject</button>
        ${decisionBadge(row)}
        <span class="decision-error" data-issue="${esc(row.issueId)}"></span>
      </td>
    </tr>`,
    )
    .join('');
  const fieldRows = vm.fields
    .map((f) => {
      const badge = f.issueIds.length
        ? `<span class="badge fail">${f.issueIds.length} issue(s)</span>`
        : '';
      return `
    <tr>
      <td><code>${esc(f.path)}</code>${f.required ? ' <span class="req">*</span>' : ''}</td>
      <td>${esc(f.label)}</td>
      <td>${f.present ? esc(f.display) : '<span class="note">(absent)</span>'}</td>
      <td>${badge}</td>
    </tr>`;
    })
    .join('');
  return `
  <p><a href="?job=${encodeURIComponent(jobId)}">&larr; back to summary</a></p>
  <h1>Metadata Evaluation Report</h1>
  <p>Record <strong>${esc(vm.ref)}</strong> <span class="${vm.statusGlyph === '✓' ? 'pass' : 'fail'}">${vm.statusGlyph}</span>
     &mdash; completeness ${vm.completenessPct}%, adherence ${vm.adherencePct}%</p>
  <h2>Found ${vm.issueRows.length} issues</h2>
  <table class="issues" data-testid="issue-table">
    <thead><tr><th>Field name</th><th>Field value</th><th>Issue</th><th>Suggested repair</th><th>Decision</th></tr></thead>
    <tbody>${issueRows}</tbody>
  </table>
  <h2>All fields</h2>
  <table class="fields" data-testid="field-table">
    <thead><tr><th>Field</th><th>Label</th><th>Value</th><th></th></tr></thead>
    <tbody>${fieldRows}</tbody>
  </table>`;
}

export function renderApplyResult(result: ApplyResultPayload, jobId: string): string {
  const links = result.records
    .map(
      (r) => `
    <li>
      <a href="/api/jobs/${encodeURIComponent(jobId)}/repaired/${encodeURIComponent(r.ref)}" target="_blank">${esc(r.ref)}</a>
      ${r.changed ? `<span class="badge accepted">${r.applied_actions} repair(s) applied</span>` : '<span class="badge pending">unchanged</span>'}
    </li>`,
    )
    .join('');
  return `<p>Cleaned records written to <code>${esc(result.output_dir)}</code>:</p><ul data-testid="repaired-links">${links}</ul>`;
}

export function renderJobState(state: string, error?: string): string {
  if (state === 'failed') {
    return `<h1>Evaluation failed</h1><p class="fail">${esc(error ?? 'unknown error')}</p>`;
  }
  return `<h1>Evaluating&hellip;</h1><p>Job is ${esc(state)}; this view refreshes automatically.</p><div class="spinner"></div>`;
}

export function renderJobForm(): string {
  return `
  <h1>Metadata Evaluation</h1>
  <p>Enter an evaluation job id to review its report.</p>
  <form id="job-form">
    <input type="text" name="job" placeholder="job id" required>
    <button type="submit">Open</button>
  </form>`;
}
