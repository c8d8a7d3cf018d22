// Payload shapes served by the evaluation API. The UI treats every number
// in these as authoritative and never recomputes metrics client-side.

export type Provenance = 'COERCION' | 'TERM_MATCH' | 'FIELD_RENAME';

export type ValueDoc =
  | string
  | { '@value': string; '@type'?: string }
  | { '@id': string; 'rdfs:label'?: string };

export interface SuggestionPayload {
  value: ValueDoc;
  score: number;
  provenance: Provenance;
}

export interface IssuePayload {
  id: string;
  path: string;
  kind: string;
  observed: string;
  suggestions: SuggestionPayload[];
}

export interface RecordRowPayload {
  ref: string;
  status: 'pass' | 'fail';
  required_total: number;
  required_filled: number;
  filled_total: number;
  filled_invalid: number;
  completeness_pct: number;
  adherence_pct: number;
  issues: IssuePayload[];
}

export interface ReportPayload {
  template: string;
  records: RecordRowPayload[];
  errors: { ref: string; code: string; cause: string }[];
  summary: {
    record_count: number;
    pass_count: number;
    field_noncompliance: { path: string; count: number }[];
  };
}

export interface FieldRowPayload {
  path: string;
  label: string;
  value_type: string | null;
  required: boolean;
  present: boolean;
  values: string[];
  issues: string[];
}

export interface DecisionPayload {
  issue_id: string;
  record_ref: string;
  path: string;
  kind: string;
  before: string;
  after: unknown;
  status: 'PENDING' | 'ACCEPTED' | 'REJECTED' | 'AUTO_APPLIED';
  decided_by: string;
}

export interface RecordDetailPayload extends RecordRowPayload {
  fields: FieldRowPayload[];
  decisions: DecisionPayload[];
}

export interface JobStatePayload {
  job_id: string;
  state: 'queued' | 'running' | 'done' | 'failed';
  error?: string;
  record_count?: number;
  pass_count?: number;
}

export interface ApplyResultPayload {
  output_dir: string;
  records: { ref: string; file: string; changed: boolean; applied_actions: number }[];
  failures: unknown[];
}

export interface DecisionRequest {
  issue_id: string;
  action: 'accept' | 'reject';
  value?: ValueDoc;
  decided_by?: string;
}

export function valueDocText(doc: ValueDoc): string {
  if (typeof doc === 'string') return doc;
  if ('@id' in doc) return doc['rdfs:label'] ?? doc['@id'];
  return doc['@value'];
}
