/**
 * Poll-and-render loop between the label service and the view.
 *
 * The learner holds at most one open query, so a 1-second poll is
 * plenty; everything here is about not answering that one query
 * twice. A submit snapshots the displayed doc_id up front (the
 * console must never label anything else), the in-flight flag
 * suppresses double-clicks, and a conflict response means another
 * client won the race: drop the stale card and refetch quietly.
 */

import { ApiError, LabelClient, Polarity, QueryPayload, StatusPayload } from "./api.js";

export interface ConsoleView {
  renderIdle(): void;
  renderQuery(query: QueryPayload): void;
  renderStatus(status: StatusPayload): void;
  renderDone(): void;
  /** Disable the answer controls while a submit is in flight. */
  setBusy(busy: boolean): void;
  /** false shows the reconnecting banner; true clears it. */
  setConnected(connected: boolean): void;
  showError(message: string): void;
}

export interface ConsoleState {
  query: QueryPayload | null;
  status: StatusPayload | null;
  answerInFlight: boolean;
  connected: boolean;
}

export const DEFAULT_POLL_MS = 1000;

export class ConsoleController {
  readonly state: ConsoleState = {
    query: null,
    status: null,
    answerInFlight: false,
    connected: true,
  };

  private timer: ReturnType<typeof setInterval> | null = null;
  private pollInFlight = false;

  constructor(
    private readonly api: LabelClient,
    private readonly view: ConsoleView,
    private readonly intervalMs: number = DEFAULT_POLL_MS,
  ) {}

  start(): void {
    if (this.timer !== null) {
      return;
    }
    void this.poll();
    this.timer = setInterval(() => void this.poll(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  get running(): boolean {
    return this.timer !== null;
  }

  /** One poll round: status first, then the query. Safe to re-enter. */
  async poll(): Promise<void> {
    if (this.pollInFlight) {
      return;
    }
    this.pollInFlight = true;
    try {
      const status = await this.api.status();
      this.state.status = status;
      if (!this.state.connected) {
        this.state.connected = true;
        this.view.setConnected(true);
      }
      this.view.renderStatus(status);
      if (status.done) {
        // The serve process is about to exit; further polls would only
        // flash the reconnecting banner over a finished run.
        this.stop();
        this.state.query = null;
        this.view.renderDone();
        return;
      }
      const query = await this.api.pendingQuery();
      if (this.state.answerInFlight) {
        // Keep the card the person is currently answering.
        return;
      }
      this.state.query = query;
      if (query === null) {
        this.view.renderIdle();
      } else {
        this.view.renderQuery(query);
      }
    } catch {
      // Anything from a refused socket to a bad payload reads the same
      // from here: the service is not usable right now. The timer keeps
      // polling, so the banner clears itself once it answers again.
      if (this.state.connected) {
        this.state.connected = false;
        this.view.setConnected(false);
      }
    } finally {
      this.pollInFlight = false;
    }
  }

  /** Answer the displayed query. No-op while idle or already submitting. */
  async submit(label: Polarity): Promise<void> {
    const query = this.state.query;
    if (query === null || this.state.answerInFlight) {
      return;
    }
    this.state.answerInFlight = true;
    this.view.setBusy(true);
    try {
      await this.api.submit(query.doc_id, label);
      // accepted and conflict land in the same place: this query is
      // settled (by us or by someone faster), show idle and refetch.
      this.state.query = null;
      this.view.renderIdle();
    } catch (error) {
      if (error instanceof ApiError && error.status !== 0) {
        this.view.showError(error.message);
      } else {
        this.state.connected = false;
        this.view.setConnected(false);
      }
    } finally {
      this.state.answerInFlight = false;
      this.view.setBusy(false);
      void this.poll();
    }
  }
}
