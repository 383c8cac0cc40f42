/**
 * Pure HTML renderers: view model in, markup string out. Keeping these free
 * of DOM access makes every visible state unit-testable in node.
 */

import { AskResponse, CaseResult, QuizAnswerResponse, QuizState, SubmitResponse, TutorState } from './api.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

// -- chat pane ---------------------------------------------------------------

/** Replace [[chunk id]] markers with expandable source excerpts. */
export function renderAnswerBody(answer: AskResponse): string {
  const excerpts = new Map(answer.context_chunks.map((c) => [c.chunk_id, c.text ?? '']));
  const html = escapeHtml(answer.answer_text).replace(
    /\[\[chunk ([^\]]+)\]\]/g,
    (whole, id: string) => {
      const text = excerpts.get(id);
      if (text === undefined) return whole;
      return (
        `<details class="citation"><summary>[[chunk ${escapeHtml(id)}]]</summary>` +
        `<blockquote>${escapeHtml(text)}</blockquote></details>`
      );
    },
  );
  return html.replace(/\n/g, '<br>');
}

export function renderAnswer(answer: AskResponse): string {
  const banner = answer.insufficient
    ? '<div class="banner banner-warn" data-role="insufficiency">' +
      'The course material may not sufficiently support this answer.</div>'
    : '';
  const citations = answer.context_chunks
    .map(
      (c) =>
        `<details class="citation"><summary>[[chunk ${escapeHtml(c.chunk_id)}]] ` +
        `<span class="score">${c.score.toFixed(3)}</span></summary>` +
        `<blockquote>${escapeHtml(c.text ?? '')}</blockquote></details>`,
    )
    .join('');
  return (
    `${banner}<div class="answer">${renderAnswerBody(answer)}</div>` +
    `<div class="citations">${citations}</div>`
  );
}

export function renderErrorCard(message: string, retryable: boolean): string {
  const retry = retryable ? '<button data-action="retry">retry</button>' : '';
  return `<div class="card error-card">service error: ${escapeHtml(message)} ${retry}</div>`;
}

// -- quiz player -------------------------------------------------------------

export function renderLadder(cells: { level: string; active: boolean }[]): string {
  const items = cells
    .map(
      (c) =>
        `<span class="ladder-cell${c.active ? ' active' : ''}" data-level="${c.level}">` +
        `${c.level}</span>`,
    )
    .join('<span class="ladder-sep">&rsaquo;</span>');
  return `<div class="ladder" data-role="ladder">${items}</div>`;
}

export function renderSubtopicSelector(state: QuizState): string {
  const notice = state.shortfall
    ? '<p class="notice">fewer than five subtopics were found for this topic</p>'
    : '';
  const options = state.subtopics
    .map(
      (s, i) =>
        `<label><input type="radio" name="subtopic" value="${i}"` +
        `${s === state.subtopic ? ' checked' : ''}> ${escapeHtml(s)}</label>`,
    )
    .join('');
  return `${notice}<div class="subtopics" data-role="subtopics">${options}</div>`;
}

export function renderQuizItem(state: QuizState): string {
  const item = state.pending_item;
  if (!item) {
    return state.exhausted
      ? '<p class="notice">no further items are available in this session.</p>'
      : '';
  }
  const options = ['A', 'B', 'C', 'D']
    .map((label) => {
      const text = item.options[label] ?? '';
      return (
        `<button class="option" data-action="answer" data-label="${label}">` +
        `<span class="opt-label">${label}</span> ${escapeHtml(text)}</button>`
      );
    })
    .join('');
  return (
    `<div class="card quiz-item" data-bloom="${item.bloom}">` +
    `<p class="stem">[${item.bloom}] ${escapeHtml(item.stem)}</p>` +
    `<div class="options">${options}</div></div>`
  );
}

export function renderQuizFeedback(feedback: QuizAnswerResponse): string {
  if (feedback.correct) {
    return '<div class="card feedback confirm" data-role="feedback">correct!</div>';
  }
  const rationale = feedback.feedback.chosen_rationale
    ? `<p class="rationale">why your pick tempts: ${escapeHtml(feedback.feedback.chosen_rationale)}</p>`
    : '';
  return (
    '<div class="card feedback corrective" data-role="feedback">' +
    `<p>not quite. correct answer: <strong>${feedback.feedback.correct_label}</strong>) ` +
    `${escapeHtml(feedback.feedback.correct_text)}</p>${rationale}</div>`
  );
}

export function renderQuiz(state: QuizState | null, feedback: QuizAnswerResponse | null, expired: boolean): string {
  if (expired) {
    return (
      '<div class="card error-card" data-role="expired">this session has expired. ' +
      '<button data-action="restart">start a new quiz</button></div>'
    );
  }
  if (!state) return '<p class="notice">enter a topic to start a quiz.</p>';
  const cells = ['Apply', 'Analyse', 'Evaluate', 'Create'].map((level) => ({
    level,
    active: level === state.current_bloom,
  }));
  return (
    renderLadder(cells) +
    renderSubtopicSelector(state) +
    (feedback ? renderQuizFeedback(feedback) : '') +
    renderQuizItem(state)
  );
}

// -- tutor stepper ------------------------------------------------------------

export function renderPlan(state: TutorState): string {
  const items = state.plan
    .map((step, i) => {
      const status = state.steps[i]?.status ?? 'pending';
      const marker = i === state.current_index ? ' current' : '';
      return `<li class="plan-step ${status}${marker}">${escapeHtml(step)}</li>`;
    })
    .join('');
  return `<ol class="plan">${items}</ol>`;
}

export function renderVerdict(result: SubmitResponse): string {
  if (result.outcome === 'passed') {
    return '<div class="card feedback confirm" data-role="verdict">step passed</div>';
  }
  const parts: string[] = [];
  if (result.gate_error) parts.push(`syntax: ${escapeHtml(result.gate_error)}`);
  if (result.sandbox_error) parts.push(`runtime: ${escapeHtml(result.sandbox_error)}`);
  if (result.verdict?.flaw_summary) parts.push(`flaw: ${escapeHtml(result.verdict.flaw_summary)}`);
  if (result.verdict?.learner_thought_model)
    parts.push(`you may have assumed: ${escapeHtml(result.verdict.learner_thought_model)}`);
  if (result.verdict?.improvement_hint)
    parts.push(`hint: ${escapeHtml(result.verdict.improvement_hint)}`);
  const failed = result.outcome === 'step_failed';
  const counter = failed
    ? 'attempts exhausted; the reference solution was installed'
    : `<span data-role="attempts">${result.attempts_remaining}</span> attempts remaining`;
  return (
    `<div class="card feedback ${failed ? 'failed' : 'corrective'}" data-role="verdict">` +
    `<p>${parts.join('</p><p>') || 'not equivalent to the step'}</p>` +
    `<p class="counter">${counter}</p></div>`
  );
}

export function renderCaseDiff(caseResult: CaseResult): string {
  const cls = caseResult.matched ? 'match' : 'mismatch';
  return (
    `<tr class="${cls}"><td>${escapeHtml(caseResult.stdin ?? '')}</td>` +
    `<td><pre>${escapeHtml(caseResult.expected ?? '')}</pre></td>` +
    `<td><pre>${escapeHtml(caseResult.actual)}</pre></td>` +
    `<td>${caseResult.matched ? 'match' : caseResult.exit_status}</td></tr>`
  );
}

export function renderTutor(
  state: TutorState | null,
  lastSubmit: SubmitResponse | null,
  expired: boolean,
  infrastructureError: string | null,
): string {
  if (expired) {
    return (
      '<div class="card error-card" data-role="expired">this session has expired. ' +
      '<button data-action="restart">start over</button></div>'
    );
  }
  if (infrastructureError) {
    return (
      '<div class="card error-card" data-role="infrastructure">' +
      'the execution sandbox is unavailable (not a problem with your code). ' +
      `${escapeHtml(infrastructureError)}</div>`
    );
  }
  if (!state) return '<p class="notice">describe a problem to start the tutor.</p>';

  const step = state.steps[state.current_index];
  const codePane =
    `<div class="code-pane"><h4>code so far</h4>` +
    `<pre data-role="cumulative">${escapeHtml(state.cumulative_code || '(empty)')}</pre></div>`;
  const finalPane = state.final_report
    ? `<div class="final"><h4>final checks (attempt ${state.final_report.attempts_used} of 3, ` +
      `${state.final_report.completed ? 'completed' : 'not completed'})</h4>` +
      `<table class="cases"><tr><th>stdin</th><th>expected</th><th>actual</th><th></th></tr>` +
      state.final_report.case_results.map(renderCaseDiff).join('') +
      `</table></div>`
    : '';
  const editor = step
    ? `<div class="step-view"><p class="step-text" data-role="step">` +
      `step ${step.index + 1} of ${state.steps.length}: ${escapeHtml(step.description)}</p>` +
      `<p class="counter"><span data-role="attempts">${step.attempts_remaining}</span> attempts remaining</p>` +
      `<textarea data-role="snippet" rows="4" placeholder="type only the new lines"></textarea>` +
      `<button data-action="submit">submit snippet</button></div>`
    : `<div class="step-view"><p>all steps resolved.</p>` +
      `<button data-action="finalize">run final checks</button></div>`;
  return (
    renderPlan(state) +
    codePane +
    (lastSubmit ? renderVerdict(lastSubmit) : '') +
    editor +
    finalPane
  );
}
