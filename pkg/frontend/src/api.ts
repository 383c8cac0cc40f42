/**
 * Typed client for the teaching-assistant HTTP JSON API.
 *
 * The UI is a pure client: every piece of displayed state comes from these
 * endpoints, and nothing (grading, verdicts, budgets) is computed here.
 */

export interface ContextChunk {
  chunk_id: string;
  score: number;
  text: string | null;
}

export interface AskResponse {
  answer_text: string;
  context_chunks: ContextChunk[];
  insufficient: boolean;
  prompt_fingerprint: string;
}

export interface RouteResponse {
  label: string;
  parse_path: string;
  raw_model_output: string;
}

export interface PendingItem {
  stem: string;
  options: Record<string, string>;
  bloom: string;
  concepts: string[];
}

export interface QuizHistoryEntry {
  learner_label: string;
  correct: boolean;
  bloom: string;
  feedback_mode: string;
}

export interface QuizState {
  session_id: string;
  topic: string;
  subtopic: string;
  subtopics: string[];
  shortfall: boolean;
  current_bloom: string;
  bloom_trajectory: string[];
  pending_item: PendingItem | null;
  history: QuizHistoryEntry[];
  exhausted: boolean;
}

export interface QuizFeedback {
  mode: string;
  correct_label: string;
  correct_text: string;
  chosen_rationale: string | null;
}

export interface QuizAnswerResponse {
  correct: boolean;
  feedback: QuizFeedback;
  current_bloom: string;
  next_item: PendingItem | null;
  exhausted: boolean;
}

export interface TutorStep {
  index: number;
  description: string;
  status: string;
  refinement_attempts_used: number;
  attempts_remaining: number;
  substituted: boolean;
  reference_failed: boolean;
}

export interface CaseResult {
  stdin: string | null;
  expected: string | null;
  actual: string;
  exit_status: string;
  matched: boolean;
}

export interface FinalReport {
  completed: boolean;
  all_steps_passed: boolean;
  attempts_used: number;
  case_results: CaseResult[];
}

export interface TutorState {
  session_id: string;
  problem_id: string;
  difficulty: string;
  plan: string[];
  current_index: number;
  steps: TutorStep[];
  cumulative_code: string;
  completed: boolean;
  final_sandbox_attempts_used: number;
  final_attempts_remaining: number;
  final_report: FinalReport | null;
}

export interface Verdict {
  equivalent: boolean;
  flaw_summary: string | null;
  learner_thought_model: string | null;
  improvement_hint: string | null;
}

export interface SubmitResponse {
  outcome: 'passed' | 'retry' | 'step_failed';
  step_index: number;
  attempts_used: number;
  attempts_remaining: number;
  verdict: Verdict | null;
  gate_error: string | null;
  sandbox_error: string | null;
  next_step_index: number | null;
  cumulative_code: string;
}

export interface IoCase {
  stdin: string;
  expected_stdout: string;
}

/** Error carrying the HTTP status and the service's error body. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly errorKind: string,
    detail: string,
  ) {
    super(detail);
  }

  /** Expired sessions get a dedicated restart prompt in the UI. */
  get sessionExpired(): boolean {
    return this.status === 410;
  }

  /** Sandbox infrastructure trouble is never the learner's fault. */
  get infrastructure(): boolean {
    return this.status === 503;
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, 'NetworkError', `service unreachable: ${err}`);
    }
    const data = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(
        response.status,
        typeof data.error === 'string' ? data.error : 'HttpError',
        typeof data.detail === 'string' ? data.detail : `HTTP ${response.status}`,
      );
    }
    return data as T;
  }

  health(): Promise<{ status: string; indices: Record<string, number> }> {
    return this.request('GET', '/v1/health');
  }

  route(query: string): Promise<RouteResponse> {
    return this.request('POST', '/v1/route', { query });
  }

  ask(query: string): Promise<AskResponse> {
    return this.request('POST', '/v1/qa/ask', { query });
  }

  quizStart(topic: string, subtopicIndex = 0): Promise<QuizState> {
    return this.request('POST', '/v1/quiz/start', {
      topic,
      subtopic_index: subtopicIndex,
    });
  }

  quizState(sessionId: string): Promise<QuizState> {
    return this.request('GET', `/v1/quiz/state?session_id=${encodeURIComponent(sessionId)}`);
  }

  quizAnswer(sessionId: string, label: string): Promise<QuizAnswerResponse> {
    return this.request('POST', '/v1/quiz/answer', { session_id: sessionId, label });
  }

  tutorStart(problem: string, ioCases: IoCase[] = [], difficulty = 'easy'): Promise<TutorState> {
    return this.request('POST', '/v1/tutor/start', {
      problem,
      difficulty,
      io_cases: ioCases,
    });
  }

  tutorState(sessionId: string): Promise<TutorState> {
    return this.request('GET', `/v1/tutor/state?session_id=${encodeURIComponent(sessionId)}`);
  }

  tutorSubmit(sessionId: string, stepIndex: number, snippet: string): Promise<SubmitResponse> {
    return this.request('POST', '/v1/tutor/submit', {
      session_id: sessionId,
      step_index: stepIndex,
      snippet,
    });
  }

  tutorFinalize(sessionId: string, ioCases?: IoCase[]): Promise<FinalReport> {
    return this.request('POST', '/v1/tutor/finalize', {
      session_id: sessionId,
      io_cases: ioCases ?? null,
    });
  }
}
