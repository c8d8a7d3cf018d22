// Entry point: routes on ?job=...&record=..., fetches from the API, and
// re-renders from server responses only (no optimistic local state).

import { ApiError, EvaluationApi } from './api.js';
import type { DecisionRequest, ValueDoc } from './models.js';
import {
  renderApplyResult,
  renderDetail,
  renderJobForm,
  renderJobState,
  renderSummary,
} from './render.js';
import { buildDetailVM, buildSummaryVM, type DetailVM } from './viewmodels.js';

const POLL_MS = 750;

export class App {
  private currentDetail: DetailVM | null = null;

  constructor(
    private root: HTMLElement,
    private api: EvaluationApi = new EvaluationApi(),
    private win: Window = window,
  ) {}

  params(): { job: string | null; record: string | null } {
    const query = new URLSearchParams(this.win.location.search);
    return { job: query.get('job'), record: query.get('record') };
  }

  async route(): Promise<void> {
    const { job, record } = this.params();
    if (!job) {
      this.root.innerHTML = renderJobForm();
      this.wireJobForm();
      return;
    }
    if (record) {
      await this.showDetail(job, record);
      return;
    }
    await this.showSummary(job);
  }

  private wireJobForm(): void {
    const form = this.root.querySelector<HTMLFormElement>('#job-form');
    form?.addEventListener('submit', (event) => {
      event.preventDefault();
      const input = form.querySelector<HTMLInputElement>('input[name=job]');
      if (input?.value) {
        this.win.location.search = `?job=${encodeURIComponent(input.value.trim())}`;
      }
    });
  }

  async showSummary(jobId: string): Promise<void> {
    try {
      const state = await this.api.jobState(jobId);
      if (state.state !== 'done') {
        this.root.innerHTML = renderJobState(state.state, state.error);
        if (state.state === 'queued' || state.state === 'running') {
          this.win.setTimeout(() => void this.showSummary(jobId), POLL_MS);
        }
        return;
      }
      const report = await this.api.report(jobId);
      this.root.innerHTML = renderSummary(buildSummaryVM(report), jobId);
      this.wireApplyButtons(jobId);
    } catch (err) {
      this.renderError(err);
    }
  }

  private wireApplyButtons(jobId: string): void {
    for (const policy of ['auto', 'review'] as const) {
      const button = this.root.querySelector<HTMLButtonElement>(
        `button[data-action="apply-${policy}"]`,
      );
      button?.addEventListener('click', () => void this.apply(jobId, policy));
    }
  }

  async apply(jobId: string, policy: 'auto' | 'review'): Promise<void> {
    const target = this.root.querySelector<HTMLElement>('#apply-result');
    if (!target) return;
    try {
      const result = await this.api.apply(jobId, policy);
      target.innerHTML = renderApplyResult(result, jobId);
    } catch (err) {
      target.innerHTML = `<p class="fail">${err instanceof ApiError ? err.message : String(err)}</p>`;
    }
  }

  async showDetail(jobId: string, ref: string): Promise<void> {
    try {
      const detail = await this.api.recordDetail(jobId, ref);
      this.currentDetail = buildDetailVM(detail);
      this.root.innerHTML = renderDetail(this.currentDetail, jobId);
      this.wireDecisions(jobId, ref);
    } catch (err) {
      this.renderError(err);
    }
  }

  private wireDecisions(jobId: string, ref: string): void {
    this.root.querySelectorAll<HTMLButtonElement>('button[data-decide]').forEach((button) => {
      button.addEventListener('click', () => {
        const issueId = button.dataset.issue ?? '';
        const verb = button.dataset.decide as 'accept' | 'reject';
        void this.decide(jobId, ref, issueId, verb);
      });
    });
    // search box narrows the dropdown options client-side
    this.root.querySelectorAll<HTMLInputElement>('input.option-search').forEach((input) => {
      input.addEventListener('input', () => {
        const select = this.root.querySelector<HTMLSelectElement>(
          `select[data-issue="${input.dataset.issue}"]`,
        );
        if (!select) return;
        const needle = input.value.toLowerCase();
        for (const option of Array.from(select.options)) {
          option.hidden = needle.length > 0 && !option.text.toLowerCase().includes(needle);
        }
      });
    });
  }

  decisionValue(issueId: string): ValueDoc | undefined {
    const select = this.root.querySelector<HTMLSelectElement>(`select[data-issue="${issueId}"]`);
    if (select) {
      // the dropdown indexes into the API's own suggestion list; the
      // selected term goes back verbatim, never rebuilt client-side
      const row = this.currentDetail?.issueRows.find((r) => r.issueId === issueId);
      if (row && row.control.kind === 'dropdown') {
        const option = row.control.options[Number(select.value)];
        if (option) return option.value;
      }
      return undefined;
    }
    const input = this.root.querySelector<HTMLInputElement>(`input[data-issue="${issueId}"]`);
    if (input && input.value.trim()) return input.value.trim();
    return undefined;
  }

  async decide(jobId: string, ref: string, issueId: string, verb: 'accept' | 'reject'): Promise<void> {
    const decision: DecisionRequest = { issue_id: issueId, action: verb, decided_by: 'review-ui' };
    if (verb === 'accept') {
      const value = this.decisionValue(issueId);
      if (value !== undefined) decision.value = value;
    }
    const errorSlot = this.root.querySelector<HTMLElement>(
      `.decision-error[data-issue="${issueId}"]`,
    );
    try {
      await this.api.postDecisions(jobId, [decision]);
      // reflect server-confirmed state only
      await this.showDetail(jobId, ref);
    } catch (err) {
      if (errorSlot) {
        errorSlot.textContent = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
      }
    }
  }

  private renderError(err: unknown): void {
    const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    this.root.innerHTML = `<h1>Error</h1><p class="fail">${message
      .replace(/&/g, '&amp;')
      .replace(/</g, '&lt;')}</p>`;
  }
}

export function boot(): void {
  const root = document.getElementById('app');
  if (root) void new App(root).route();
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  boot();
}
