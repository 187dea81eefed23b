/**
 * Typed client for the label service JSON API.
 *
 * All payloads carry a version field; anything but version 1 is
 * rejected here so the UI never renders a shape it does not know.
 */

export const PAYLOAD_VERSION = 1;

export type Polarity = "pos" | "neg";

/** The single open label request, as served by GET /api/query. */
export interface QueryPayload {
  v: number;
  doc_id: number;
  words: string[];
  predicted: Polarity;
  score: number | null;
  priors: { pos: number; neg: number };
  vocab_size: number;
  kappa: number | null;
}

/** Run progress, as served by GET /api/status. */
export interface StatusPayload {
  v: number;
  position: number;
  stream_length: number;
  seed_size: number;
  spend_percent: number;
  kappa: number | null;
  vocab_size: number;
  done: boolean;
}

export type SubmitResult = "accepted" | "conflict";

/** A response the service itself refused (4xx other than conflict). */
export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** What the controller needs from the service; LabelApi is the real one. */
export interface LabelClient {
  pendingQuery(): Promise<QueryPayload | null>;
  status(): Promise<StatusPayload>;
  submit(docId: number, label: Polarity): Promise<SubmitResult>;
}

function checkVersion(payload: { v?: unknown }, endpoint: string): void {
  if (payload.v !== PAYLOAD_VERSION) {
    throw new ApiError(`${endpoint}: unsupported payload version ${payload.v}`, 0);
  }
}

export class LabelApi implements LabelClient {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly base: string = "",
    fetchFn?: FetchLike,
  ) {
    // Default goes through globalThis so the browser's fetch keeps its
    // required receiver; a bare `fetch` reference loses it.
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  /** Fetch the open query, or null when the learner is between queries. */
  async pendingQuery(): Promise<QueryPayload | null> {
    const response = await this.fetchFn(`${this.base}/api/query`, {
      cache: "no-store",
    });
    if (response.status === 204) {
      return null;
    }
    if (!response.ok) {
      throw new ApiError(`query poll failed (${response.status})`, response.status);
    }
    const payload = (await response.json()) as QueryPayload;
    checkVersion(payload, "/api/query");
    return payload;
  }

  async status(): Promise<StatusPayload> {
    const response = await this.fetchFn(`${this.base}/api/status`, {
      cache: "no-store",
    });
    if (!response.ok) {
      throw new ApiError(`status poll failed (${response.status})`, response.status);
    }
    const payload = (await response.json()) as StatusPayload;
    checkVersion(payload, "/api/status");
    return payload;
  }

  /**
   * Answer a query. A conflict means somebody else (or an earlier
   * double-send) answered first; the caller should refetch, not retry.
   */
  async submit(docId: number, label: Polarity): Promise<SubmitResult> {
    const response = await this.fetchFn(`${this.base}/api/label`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ doc_id: docId, label }),
    });
    if (response.status === 409) {
      return "conflict";
    }
    if (!response.ok) {
      let message = `label rejected (${response.status})`;
      try {
        const body = (await response.json()) as { error?: string; detail?: string };
        if (body.detail ?? body.error) {
          message = `label rejected: ${body.detail ?? body.error}`;
        }
      } catch {
        // non-JSON error body, keep the status-code message
      }
      throw new ApiError(message, response.status);
    }
    return "accepted";
  }
}
