/**
 * DOM wiring: three tabs (chat, quiz, tutor) over the controllers, with a
 * 1-second /state poll for whichever session is active. Session ids live in
 * sessionStorage so a reload restores the identical view from the server.
 */

import { ApiClient } from './api.js';
import { QaController } from './qa.js';
import { QuizController } from './quiz.js';
import { renderAnswer, renderErrorCard, renderQuiz, renderTutor } from './render.js';
import { TutorController } from './tutor.js';

const baseUrl =
  new URLSearchParams(window.location.search).get('server') ?? 'http://127.0.0.1:8722';

const api = new ApiClient(baseUrl);
const qa = new QaController(api);
const quiz = new QuizController(api);
const tutor = new TutorController(api);

const POLL_MS = 1000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

// -- chat pane -----------------------------------------------------------------

function paintQa(): void {
  const pane = el('qa-log');
  pane.innerHTML = qa.entries
    .map((entry, i) => {
      const body = entry.pending
        ? '<p class="notice">thinking…</p>'
        : entry.error
          ? renderErrorCard(entry.error, entry.retryable).replace(
              'data-action="retry"',
              `data-action="retry" data-index="${i}"`,
            )
          : renderAnswer(entry.answer!);
      return `<div class="exchange"><p class="query">${entry.query}</p>${body}</div>`;
    })
    .join('');
  pane.querySelectorAll('[data-action="retry"]').forEach((button) => {
    button.addEventListener('click', async () => {
      const index = Number((button as HTMLElement).dataset.index);
      await qa.retry(qa.entries[index]!);
      paintQa();
    });
  });
}

el<HTMLFormElement>('qa-form').addEventListener('submit', async (event) => {
  event.preventDefault();
  const input = el<HTMLInputElement>('qa-input');
  const query = input.value.trim();
  if (!query) return;
  input.value = '';
  const done = qa.submit(query);
  paintQa();
  await done;
  paintQa();
});

// -- quiz pane -----------------------------------------------------------------

function paintQuiz(): void {
  const pane = el('quiz-view');
  pane.innerHTML = renderQuiz(quiz.state, quiz.lastFeedback, quiz.expired);
  pane.querySelectorAll('[data-action="answer"]').forEach((button) => {
    button.addEventListener('click', async () => {
      const label = (button as HTMLElement).dataset.label!;
      try {
        await quiz.answer(label);
      } catch {
        /* expiry handled by controller state */
      }
      paintQuiz();
    });
  });
  pane.querySelector('[data-action="restart"]')?.addEventListener('click', () => {
    sessionStorage.removeItem('quiz-session');
    quiz.expired = false;
    paintQuiz();
  });
  pane.querySelectorAll('input[name="subtopic"]').forEach((radio) => {
    radio.addEventListener('change', async () => {
      const state = await quiz.switchSubtopic(Number((radio as HTMLInputElement).value));
      sessionStorage.setItem('quiz-session', state.session_id);
      paintQuiz();
    });
  });
}

el<HTMLFormElement>('quiz-form').addEventListener('submit', async (event) => {
  event.preventDefault();
  const topic = el<HTMLInputElement>('quiz-topic').value.trim();
  if (!topic) return;
  const state = await quiz.start(topic);
  sessionStorage.setItem('quiz-session', state.session_id);
  paintQuiz();
});

// -- tutor pane ----------------------------------------------------------------

function paintTutor(): void {
  const pane = el('tutor-view');
  pane.innerHTML = renderTutor(tutor.state, tutor.lastSubmit, tutor.expired, tutor.infrastructureError);
  pane.querySelector('[data-action="submit"]')?.addEventListener('click', async () => {
    const snippet = (pane.querySelector('[data-role="snippet"]') as HTMLTextAreaElement).value;
    if (!snippet.trim()) return;
    try {
      await tutor.submit(snippet);
    } catch {
      /* surfaced through controller state */
    }
    paintTutor();
  });
  pane.querySelector('[data-action="finalize"]')?.addEventListener('click', async () => {
    try {
      await tutor.finalize();
    } catch {
      /* surfaced through controller state */
    }
    paintTutor();
  });
  pane.querySelector('[data-action="restart"]')?.addEventListener('click', () => {
    sessionStorage.removeItem('tutor-session');
    tutor.expired = false;
    paintTutor();
  });
}

el<HTMLFormElement>('tutor-form').addEventListener('submit', async (event) => {
  event.preventDefault();
  const problem = el<HTMLTextAreaElement>('tutor-problem').value.trim();
  if (!problem) return;
  const state = await tutor.start(problem);
  sessionStorage.setItem('tutor-session', state.session_id);
  paintTutor();
});

// -- restore + poll ---------------------------------------------------------------

async function restore(): Promise<void> {
  const quizSession = sessionStorage.getItem('quiz-session');
  if (quizSession) {
    await quiz.resume(quizSession).catch(() => undefined);
    paintQuiz();
  }
  const tutorSession = sessionStorage.getItem('tutor-session');
  if (tutorSession) {
    await tutor.resume(tutorSession).catch(() => undefined);
    paintTutor();
  }
}

// Repaint on poll only when the server state actually changed, so typing
// in the snippet editor survives idle polls.
let quizSnapshot = '';
let tutorSnapshot = '';

setInterval(async () => {
  if (quiz.sessionId) {
    await quiz.resume(quiz.sessionId).catch(() => undefined);
    const snapshot = JSON.stringify(quiz.state);
    if (snapshot !== quizSnapshot) {
      quizSnapshot = snapshot;
      paintQuiz();
    }
  }
  if (tutor.sessionId) {
    await tutor.resume(tutor.sessionId).catch(() => undefined);
    const snapshot = JSON.stringify(tutor.state);
    if (snapshot !== tutorSnapshot) {
      tutorSnapshot = snapshot;
      paintTutor();
    }
  }
}, POLL_MS);

void restore();
paintQa();
paintQuiz();
paintTutor();
