// Pure view-model construction. Everything shown comes verbatim from the
// API payloads: percentages, counts, ranking order, and candidate lists.

import type {
  DecisionPayload,
  IssuePayload,
  RecordDetailPayload,
  ReportPayload,
  SuggestionPayload,
} from './models.js';
import { valueDocText } from './models.js';

// dropdowns show the full candidate list up to this size; at the cap a
// search box filters the options
export const DROPDOWN_LIMIT = 10;

export interface SummaryRowVM {
  ref: string;
  passed: boolean;
  statusGlyph: '✓' | '✗';
  completenessPct: number;
  completenessText: string;
  adherencePct: number;
  adherenceText: string;
  issueCount: number;
}

export interface SummaryVM {
  template: string;
  recordCount: number;
  passCount: number;
  rows: SummaryRowVM[];
  noncompliance: { path: string; count: number }[];
  errors: { ref: string; code: string; cause: string }[];
}

export function buildSummaryVM(report: ReportPayload): SummaryVM {
  return {
    template: report.template,
    recordCount: report.summary.record_count,
    passCount: report.summary.pass_count,
    rows: report.records.map((r) => ({
      ref: r.ref,
      passed: r.status === 'pass',
      statusGlyph: r.status === 'pass' ? '✓' : '✗',
      completenessPct: r.completeness_pct,
      completenessText: `${r.required_filled} out of ${r.required_total} required metadata fields are filled.`,
      adherencePct: r.adherence_pct,
      adherenceText: `${r.filled_invalid} out of ${r.filled_total} filled metadata fields are invalid.`,
      issueCount: r.issues.length,
    })),
    noncompliance: report.summary.field_noncompliance,
    errors: report.errors,
  };
}

export type RepairControlVM =
  | {
      kind: 'dropdown';
      // options exactly as the API ranked them
      options: { label: string; value: SuggestionPayload['value']; score: number }[];
      searchable: boolean;
    }
  | { kind: 'free-entry'; prefill: string };

export interface IssueRowVM {
  issueId: string;
  path: string;
  kind: string;
  observed: string;
  control: RepairControlVM;
  decision: DecisionPayload | null;
}

export interface DetailFieldVM {
  path: string;
  label: string;
  required: boolean;
  present: boolean;
  display: string;
  issueIds: string[];
}

export interface DetailVM {
  ref: string;
  statusGlyph: '✓' | '✗';
  completenessPct: number;
  adherencePct: number;
  issueRows: IssueRowVM[];
  fields: DetailFieldVM[];
}

export function buildControl(issue: IssuePayload): RepairControlVM {
  if (issue.kind === 'VALUE_NOT_ONTOLOGY_TERM' && issue.suggestions.length > 0) {
    return {
      kind: 'dropdown',
      options: issue.suggestions.map((s) => ({
        label: valueDocText(s.value),
        value: s.value,
        score: s.score,
      })),
      searchable: issue.suggestions.length >= DROPDOWN_LIMIT,
    };
  }
  const top = issue.suggestions[0];
  return { kind: 'free-entry', prefill: top ? valueDocText(top.value) : '' };
}

export function buildDetailVM(detail: RecordDetailPayload): DetailVM {
  const decisionsById = new Map<string, DecisionPayload>();
  for (const decision of detail.decisions) {
    decisionsById.set(decision.issue_id, decision);
  }
  return {
    ref: detail.ref,
    statusGlyph: detail.status === 'pass' ? '✓' : '✗',
    completenessPct: detail.completeness_pct,
    adherencePct: detail.adherence_pct,
    issueRows: detail.issues.map((issue) => ({
      issueId: issue.id,
      path: issue.path,
      kind: issue.kind,
      observed: issue.observed,
      control: buildControl(issue),
      decision: decisionsById.get(issue.id) ?? null,
    })),
    fields: detail.fields.map((f) => ({
      path: f.path,
      label: f.label,
      required: f.required,
      present: f.present,
      display: f.values.join('; '),
      issueIds: f.issues,
    })),
  };
}
