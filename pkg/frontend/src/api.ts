/** Typed API client with one in-flight request per view.
 *
 * A newer request from the same view aborts its predecessor, so stale
 * responses can never draw over fresh ones.
 */

import type { ApiErrorBody } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiErrorBody,
  ) {
    super(body.message);
  }
}

export function buildQuery(params: Record<string, string | number | undefined>): string {
  const parts: string[] = [];
  for (const [key, value] of Object.entries(params)) {
    if (value === undefined || value === "") continue;
    parts.push(`${encodeURIComponent(key)}=${encodeURIComponent(String(value))}`);
  }
  return parts.length ? `?${parts.join("&")}` : "";
}

export class ApiClient {
  private inflight = new Map<string, AbortController>();

  constructor(private readonly base: string = "") {}

  /** GET a JSON payload; a later call with the same view key cancels this one. */
  async get<T>(view: string, path: string, params: Record<string, string | number | undefined> = {}): Promise<T> {
    this.inflight.get(view)?.abort();
    const controller = new AbortController();
    this.inflight.set(view, controller);
    try {
      const response = await fetch(this.base + path + buildQuery(params), {
        signal: controller.signal,
      });
      const body = await response.json();
      if (!response.ok) {
        throw new ApiError(response.status, body as ApiErrorBody);
      }
      return body as T;
    } finally {
      if (this.inflight.get(view) === controller) this.inflight.delete(view);
    }
  }
}
