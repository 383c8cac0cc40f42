/** Chat pane state: one entry per submitted question. */

import { ApiClient, ApiError, AskResponse } from './api.js';

export interface QaEntry {
  query: string;
  pending: boolean;
  answer: AskResponse | null;
  error: string | null;
  retryable: boolean;
}

export class QaController {
  entries: QaEntry[] = [];

  constructor(private readonly api: ApiClient) {}

  async submit(query: string): Promise<QaEntry> {
    const entry: QaEntry = { query, pending: true, answer: null, error: null, retryable: false };
    this.entries.push(entry);
    await this.run(entry);
    return entry;
  }

  /** Re-run a failed entry in place (the inline error card's retry action). */
  async retry(entry: QaEntry): Promise<void> {
    entry.pending = true;
    entry.error = null;
    await this.run(entry);
  }

  private async run(entry: QaEntry): Promise<void> {
    try {
      entry.answer = await this.api.ask(entry.query);
    } catch (err) {
      entry.error = err instanceof ApiError ? err.message : String(err);
      entry.retryable = true;
    } finally {
      entry.pending = false;
    }
  }
}
