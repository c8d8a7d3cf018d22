// @vitest-environment happy-dom
import { describe, expect, it } from 'vitest';

import { renderDetail, renderSummary } from '../src/render.js';
import { buildDetailVM, buildSummaryVM } from '../src/viewmodels.js';
import { recordedDetail, recordedReport } from './fixtures.js';

function mount(html: string): HTMLElement {
  const root = document.createElement('main');
  root.innerHTML = html;
  document.body.replaceChildren(root);
  return root;
}

describe('summary screen', () => {
  it('shows one row per record with pass/fail glyphs', () => {
    const root = mount(renderSummary(buildSummaryVM(recordedReport), 'job-1'));
    const rows = root.querySelectorAll('[data-testid="summary-table"] tbody tr');
    expect(rows).toHaveLength(5);
    const glyphs = Array.from(rows).map((r) => r.children[1]!.textContent?.trim());
    expect(glyphs.filter((g) => g === '✓')).toHaveLength(1);
    expect(glyphs.filter((g) => g === '✗')).toHaveLength(4);
  });

  it('links each row to its detail view', () => {
    const root = mount(renderSummary(buildSummaryVM(recordedReport), 'job-1'));
    const link = root.querySelector<HTMLAnchorElement>('tbody tr a');
    expect(link?.getAttribute('href')).toBe('?job=job-1&record=Visium_90LC_A4_S1');
  });

  it('shows the noncompliance ranking panel in order', () => {
    const root = mount(renderSummary(buildSummaryVM(recordedReport), 'job-1'));
    const items = root.querySelectorAll('[data-testid="noncompliance"] li');
    expect(items[0]!.textContent).toContain('storage_medium');
    expect(items[0]!.textContent).toContain('3');
  });

  it('renders a placeholder when the report is empty', () => {
    const empty = {
      ...recordedReport,
      records: [],
      summary: { record_count: 0, pass_count: 0, field_noncompliance: [] },
    };
    const root = mount(renderSummary(buildSummaryVM(empty), 'job-1'));
    expect(root.querySelector('.placeholder')?.textContent).toContain('No records');
  });
});

describe('detail screen', () => {
  it('renders the issue table rows with controls', () => {
    const root = mount(renderDetail(buildDetailVM(recordedDetail), 'job-1'));
    const rows = root.querySelectorAll('.issue-row');
    expect(rows).toHaveLength(3);
    const dropdown = root.querySelector<HTMLSelectElement>('select[data-issue="bbbbbbbbbbbbbbb3"]');
    expect(dropdown).not.toBeNull();
    expect(dropdown!.querySelectorAll('option')).toHaveLength(7);
    expect(dropdown!.querySelector('option')!.textContent).toContain('OCT Embedded');
  });

  it('prefills the coercion input with the suggested token', () => {
    const root = mount(renderDetail(buildDetailVM(recordedDetail), 'job-1'));
    const input = root.querySelector<HTMLInputElement>('input[data-issue="bbbbbbbbbbbbbbb2"]');
    expect(input?.getAttribute('value')).toBe('208');
  });

  it('offers a free-entry box for the missing required value', () => {
    const root = mount(renderDetail(buildDetailVM(recordedDetail), 'job-1'));
    const input = root.querySelector<HTMLInputElement>('input[data-issue="bbbbbbbbbbbbbbb1"]');
    expect(input).not.toBeNull();
    expect(input?.getAttribute('value')).toBe('');
  });

  it('escapes observed values', () => {
    const hostile = {
      ...recordedDetail,
      issues: [
        {
          ...recordedDetail.issues[2]!,
          observed: '<img src=x onerror=alert(1)>',
        },
      ],
      decisions: [],
    };
    const html = renderDetail(buildDetailVM(hostile), 'job-1');
    expect(html).not.toContain('<img src=x');
    expect(html).toContain('&lt;img src=x');
  });
});
