/**
 * Quiz player state machine.
 *
 * Everything durable lives server-side; this controller only caches the
 * latest /state snapshot plus the transient feedback of the last grade. A
 * page reload (or `resume`) rebuilds the identical durable view from
 * /state alone.
 */

import { ApiClient, ApiError, QuizAnswerResponse, QuizState } from './api.js';

export const BLOOM_LADDER = ['Apply', 'Analyse', 'Evaluate', 'Create'] as const;

export class QuizController {
  state: QuizState | null = null;
  lastFeedback: QuizAnswerResponse | null = null;
  expired = false;
  error: string | null = null;

  constructor(private readonly api: ApiClient) {}

  get sessionId(): string | null {
    return this.state?.session_id ?? null;
  }

  async start(topic: string, subtopicIndex = 0): Promise<QuizState> {
    this.lastFeedback = null;
    this.expired = false;
    this.error = null;
    this.state = await this.api.quizStart(topic, subtopicIndex);
    return this.state;
  }

  /** Rebuild the durable view from the server; used on reload and polling. */
  async resume(sessionId: string): Promise<QuizState> {
    try {
      this.state = await this.api.quizState(sessionId);
      this.expired = false;
      this.error = null;
      return this.state;
    } catch (err) {
      if (err instanceof ApiError && err.sessionExpired) {
        this.expired = true;
        this.state = null;
      }
      throw err;
    }
  }

  async answer(label: string): Promise<QuizAnswerResponse> {
    if (!this.state) throw new Error('no active quiz session');
    const sessionId = this.state.session_id;
    try {
      this.lastFeedback = await this.api.quizAnswer(sessionId, label);
    } catch (err) {
      if (err instanceof ApiError && err.sessionExpired) {
        this.expired = true;
        this.state = null;
      }
      throw err;
    }
    await this.resume(sessionId);
    return this.lastFeedback;
  }

  /** Restart the session on another of the decomposed subtopics. */
  async switchSubtopic(index: number): Promise<QuizState> {
    if (!this.state) throw new Error('no active quiz session');
    return this.start(this.state.topic, index);
  }

  /** Ladder cells with the active level marked, for the indicator. */
  ladder(): { level: string; active: boolean }[] {
    const current = this.state?.current_bloom ?? BLOOM_LADDER[0];
    return BLOOM_LADDER.map((level) => ({ level, active: level === current }));
  }
}
