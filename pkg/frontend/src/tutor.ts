/**
 * Tutor stepper state. As with the quiz player, the durable view is a pure
 * function of the last /state snapshot; only the latest submit verdict is
 * transient. Attempt counters always mirror server-reported budgets.
 */

import {
  ApiClient,
  ApiError,
  FinalReport,
  IoCase,
  SubmitResponse,
  TutorState,
  TutorStep,
} from './api.js';

export class TutorController {
  state: TutorState | null = null;
  lastSubmit: SubmitResponse | null = null;
  expired = false;
  /** Sandbox infrastructure failure: shown as a non-blame error state. */
  infrastructureError: string | null = null;

  constructor(private readonly api: ApiClient) {}

  get sessionId(): string | null {
    return this.state?.session_id ?? null;
  }

  get currentStep(): TutorStep | null {
    if (!this.state) return null;
    return this.state.steps[this.state.current_index] ?? null;
  }

  get allStepsResolved(): boolean {
    return this.state !== null && this.state.current_index >= this.state.steps.length;
  }

  async start(problem: string, ioCases: IoCase[] = [], difficulty = 'easy'): Promise<TutorState> {
    this.lastSubmit = null;
    this.expired = false;
    this.infrastructureError = null;
    this.state = await this.api.tutorStart(problem, ioCases, difficulty);
    return this.state;
  }

  async resume(sessionId: string): Promise<TutorState> {
    try {
      this.state = await this.api.tutorState(sessionId);
      this.expired = false;
      return this.state;
    } catch (err) {
      if (err instanceof ApiError && err.sessionExpired) {
        this.expired = true;
        this.state = null;
      }
      throw err;
    }
  }

  async submit(snippet: string): Promise<SubmitResponse> {
    if (!this.state) throw new Error('no active tutor session');
    const sessionId = this.state.session_id;
    const stepIndex = this.state.current_index;
    try {
      this.lastSubmit = await this.api.tutorSubmit(sessionId, stepIndex, snippet);
    } catch (err) {
      this.noteError(err);
      throw err;
    }
    await this.resume(sessionId);
    return this.lastSubmit;
  }

  async finalize(): Promise<FinalReport> {
    if (!this.state) throw new Error('no active tutor session');
    const sessionId = this.state.session_id;
    let report: FinalReport;
    try {
      report = await this.api.tutorFinalize(sessionId);
    } catch (err) {
      this.noteError(err);
      throw err;
    }
    await this.resume(sessionId);
    return report;
  }

  private noteError(err: unknown): void {
    if (err instanceof ApiError && err.infrastructure) {
      this.infrastructureError = err.message;
    }
    if (err instanceof ApiError && err.sessionExpired) {
      this.expired = true;
      this.state = null;
    }
  }
}
