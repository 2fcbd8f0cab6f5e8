/**
 * Thin fetch client for the curation API.
 *
 * Every non-2xx response carries a JSON body shaped {status, code, message};
 * it is rethrown as an ApiError so views can branch on the code (stale-run
 * conflicts get special handling). A transport failure, where fetch itself
 * rejects, becomes an ApiError with status 0 so callers have one error type
 * to deal with.
 */

import type {
  ApiErrorBody,
  DecisionRequest,
  DecisionResponse,
  RunInfo,
  SetDetail,
  SetListing,
  Stats,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
  }
}

declare global {
  interface Window {
    /** Optional override when the UI is not served behind the API origin. */
    REGDEDUP_API_BASE?: string;
  }
}

function apiBase(): string {
  return window.REGDEDUP_API_BASE ?? "";
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let res: Response;
  try {
    res = await fetch(apiBase() + path, init);
  } catch (err) {
    throw new ApiError(0, "unreachable", `could not reach the API (${String(err)})`);
  }
  if (!res.ok) {
    let body: Partial<ApiErrorBody> = {};
    try {
      body = (await res.json()) as Partial<ApiErrorBody>;
    } catch {
      // non-JSON error page, fall back to the HTTP status line
    }
    throw new ApiError(res.status, body.code ?? "unknown", body.message ?? res.statusText);
  }
  return (await res.json()) as T;
}

export function fetchRun(): Promise<RunInfo> {
  return request("/api/run");
}

export function fetchSets(params: URLSearchParams): Promise<SetListing> {
  const qs = params.toString();
  return request(qs ? `/api/sets?${qs}` : "/api/sets");
}

export function fetchSet(id: string): Promise<SetDetail> {
  return request(`/api/sets/${encodeURIComponent(id)}`);
}

export function fetchStats(): Promise<Stats> {
  return request("/api/stats");
}

export function submitDecision(setId: string, body: DecisionRequest): Promise<DecisionResponse> {
  return request(`/api/sets/${encodeURIComponent(setId)}/decision`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
}
