// Thin typed client over the evaluation service routes.

import type {
  ApplyResultPayload,
  DecisionPayload,
  DecisionRequest,
  JobStatePayload,
  RecordDetailPayload,
  ReportPayload,
} from './models.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail?: unknown,
  ) {
    super(message);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(`${base}${path}`, init);
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const err = (body as { error?: { code?: string; message?: string; detail?: unknown } })?.error;
    throw new ApiError(
      response.status,
      err?.code ?? 'HTTP_ERROR',
      err?.message ?? `request failed with ${response.status}`,
      err?.detail,
    );
  }
  return body as T;
}

function post(body: unknown): RequestInit {
  return {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify(body),
  };
}

export class EvaluationApi {
  constructor(private base: string = '') {}

  createJob(payload: unknown): Promise<{ job_id: string; state: string }> {
    return request(this.base, '/api/jobs', post(payload));
  }

  jobState(jobId: string): Promise<JobStatePayload> {
    return request(this.base, `/api/jobs/${encodeURIComponent(jobId)}`);
  }

  report(jobId: string): Promise<ReportPayload> {
    return request(this.base, `/api/jobs/${encodeURIComponent(jobId)}/report`);
  }

  recordDetail(jobId: string, ref: string): Promise<RecordDetailPayload> {
    return request(
      this.base,
      `/api/jobs/${encodeURIComponent(jobId)}/records/${encodeURIComponent(ref)}`,
    );
  }

  postDecisions(jobId: string, decisions: DecisionRequest[]): Promise<{ decisions: DecisionPayload[] }> {
    return request(this.base, `/api/jobs/${encodeURIComponent(jobId)}/decisions`, post(decisions));
  }

  apply(jobId: string, policy: 'auto' | 'review'): Promise<ApplyResultPayload> {
    return request(this.base, `/api/jobs/${encodeURIComponent(jobId)}/apply`, post({ policy }));
  }

  repairedRecord(jobId: string, ref: string): Promise<Record<string, unknown>> {
    return request(
      this.base,
      `/api/jobs/${encodeURIComponent(jobId)}/repaired/${encodeURIComponent(ref)}`,
    );
  }

  repairedRecordUrl(jobId: string, ref: string): string {
    return `${this.base}/api/jobs/${encodeURIComponent(jobId)}/repaired/${encodeURIComponent(ref)}`;
  }
}
