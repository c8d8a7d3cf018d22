// A recorded report payload in the shape the evaluation API serves.
// Numbers mirror the five-record sample batch.

import type { RecordDetailPayload, ReportPayload } from '../src/models.js';

export const recordedReport: ReportPayload = {
  template: 'https://example.org/templates/sample-section',
  records: [
    {
      ref: 'Visium_90LC_A4_S1',
      status: 'pass',
      required_total: 11,
      required_filled: 11,
      filled_total: 18,
      filled_invalid: 0,
      completeness_pct: 100,
      adherence_pct: 100,
      issues: [],
    },
    {
      ref: 'Visium_90LC_A4_S2',
      status: 'fail',
      required_total: 11,
      required_filled: 9,
      filled_total: 18,
      filled_invalid: 0,
      completeness_pct: 82,
      adherence_pct: 100,
      issues: [
        {
          id: 'aaaaaaaaaaaaaaa1',
          path: 'preparation_medium',
          kind: 'MISSING_REQUIRED_FIELD',
          observed: '',
          suggestions: [],
        },
        {
          id: 'aaaaaaaaaaaaaaa2',
          path: 'storage_temperature',
          kind: 'MISSING_REQUIRED_VALUE',
          observed: '',
          suggestions: [],
        },
      ],
    },
    {
      ref: 'Visium_90LC_I4_S1',
      status: 'fail',
      required_total: 11,
      required_filled: 11,
      filled_total: 18,
      filled_invalid: 3,
      completeness_pct: 100,
      adherence_pct: 83,
      issues: [],
    },
    {
      ref: 'Visium_90LC_I4_S2',
      status: 'fail',
      required_total: 11,
      required_filled: 11,
      filled_total: 18,
      filled_invalid: 5,
      completeness_pct: 100,
      adherence_pct: 72,
      issues: [],
    },
    {
      ref: 'Visium_90LC_I4_S3',
      status: 'fail',
      required_total: 11,
      required_filled: 10,
      filled_total: 18,
      filled_invalid: 2,
      completeness_pct: 91,
      adherence_pct: 89,
      issues: [],
    },
  ],
  errors: [],
  summary: {
    record_count: 5,
    pass_count: 1,
    field_noncompliance: [
      { path: 'storage_medium', count: 3 },
      { path: 'preparation_medium', count: 2 },
      { path: 'source_storage_time_value', count: 2 },
    ],
  },
};

const storageCandidates = [
  'OCT Embedded',
  'CMC Embedded',
  'Paraffin Embedded',
  'OCT Embedded Cryoprotected (sucrose)',
  'Buffered Formalin (10% NBF)',
  '1 x PBS',
  'PFA 4%',
].map((label, i) => ({
  value: { '@id': `urn:storage:${i}`, 'rdfs:label': label },
  score: (7 - i) / 10,
  provenance: 'TERM_MATCH' as const,
}));

export const recordedDetail: RecordDetailPayload = {
  ref: 'Visium_90LC_I4_S2',
  status: 'fail',
  required_total: 11,
  required_filled: 10,
  filled_total: 17,
  filled_invalid: 2,
  completeness_pct: 91,
  adherence_pct: 88,
  issues: [
    {
      id: 'bbbbbbbbbbbbbbb1',
      path: 'preparation_medium',
      kind: 'MISSING_REQUIRED_VALUE',
      observed: '',
      suggestions: [],
    },
    {
      id: 'bbbbbbbbbbbbbbb2',
      path: 'source_storage_time_value',
      kind: 'EXPECTING_INPUT_NUMBER',
      observed: '208 days',
      suggestions: [
        { value: { '@value': '208', '@type': 'xsd:float' }, score: 1.0, provenance: 'COERCION' },
      ],
    },
    {
      id: 'bbbbbbbbbbbbbbb3',
      path: 'storage_medium',
      kind: 'VALUE_NOT_ONTOLOGY_TERM',
      observed: 'Cryostat embedded',
      suggestions: storageCandidates,
    },
  ],
  fields: [
    {
      path: 'sample_ID',
      label: 'Sample ID',
      value_type: 'text',
      required: true,
      present: true,
      values: ['Visium_90LC_I4_S2'],
      issues: [],
    },
    {
      path: 'preparation_medium',
      label: 'Preparation Medium',
      value_type: 'controlled',
      required: true,
      present: true,
      values: [''],
      issues: ['bbbbbbbbbbbbbbb1'],
    },
    {
      path: 'source_storage_time_value',
      label: 'Source Storage Time Value',
      value_type: 'decimal',
      required: true,
      present: true,
      values: ['208 days'],
      issues: ['bbbbbbbbbbbbbbb2'],
    },
    {
      path: 'storage_medium',
      label: 'Storage Medium',
      value_type: 'controlled',
      required: true,
      present: true,
      values: ['Cryostat embedded'],
      issues: ['bbbbbbbbbbbbbbb3'],
    },
  ],
  decisions: [
    {
      issue_id: 'bbbbbbbbbbbbbbb2',
      record_ref: 'Visium_90LC_I4_S2',
      path: 'source_storage_time_value',
      kind: 'EXPECTING_INPUT_NUMBER',
      before: '208 days',
      after: { '@value': '208', '@type': 'xsd:float' },
      status: 'PENDING',
      decided_by: '',
    },
    {
      issue_id: 'bbbbbbbbbbbbbbb3',
      record_ref: 'Visium_90LC_I4_S2',
      path: 'storage_medium',
      kind: 'VALUE_NOT_ONTOLOGY_TERM',
      before: 'Cryostat embedded',
      after: { '@id': 'urn:storage:0', 'rdfs:label': 'OCT Embedded' },
      status: 'PENDING',
      decided_by: '',
    },
  ],
};
