/**
 * View state lives in the URL, nowhere else.
 *
 * Every filter, the page number and the currently open set are read back out
 * of location.search, so any screen can be bookmarked or pasted to a
 * colleague and a fresh tab lands on exactly the same view.
 */

import type { Provenance, SetKind, SetStatus } from "./types.js";

export interface QueueQuery {
  status: SetStatus | "any";
  kind: SetKind | "any";
  provenance: Provenance | "any";
  minSize: number | null;
  q: string;
  page: number;
  pageSize: number;
}

export type Route =
  | { view: "queue"; query: QueueQuery }
  | { view: "detail"; setId: string };

export const DEFAULT_PAGE_SIZE = 50;

const STATUSES: ReadonlySet<string> = new Set([
  "auto",
  "needs-review",
  "accepted",
  "rejected",
  "amended",
]);

const PROVENANCES: ReadonlySet<string> = new Set([
  "claims-only",
  "extended",
  "merged",
  "dedup-only",
  "problematic",
]);

/** A bare URL opens the queue on whatever still needs a curator's eyes. */
export function defaultQuery(): QueueQuery {
  return {
    status: "needs-review",
    kind: "any",
    provenance: "any",
    minSize: null,
    q: "",
    page: 1,
    pageSize: DEFAULT_PAGE_SIZE,
  };
}

export function parseRoute(search: string): Route {
  const params = new URLSearchParams(search);
  const setId = params.get("set");
  if (setId) {
    return { view: "detail", setId };
  }
  return { view: "queue", query: parseQueueQuery(params) };
}

function positiveInt(raw: string | null): number | null {
  if (raw === null) return null;
  const value = Number(raw);
  return Number.isInteger(value) && value >= 1 ? value : null;
}

function parseQueueQuery(params: URLSearchParams): QueueQuery {
  const query = defaultQuery();
  const status = params.get("status");
  if (status === "any" || (status !== null && STATUSES.has(status))) {
    query.status = status as QueueQuery["status"];
  }
  const kind = params.get("kind");
  if (kind === "any" || kind === "set" || kind === "problematic") {
    query.kind = kind;
  }
  const provenance = params.get("provenance");
  if (provenance === "any" || (provenance !== null && PROVENANCES.has(provenance))) {
    query.provenance = provenance as QueueQuery["provenance"];
  }
  query.minSize = positiveInt(params.get("minSize"));
  query.q = params.get("q") ?? "";
  query.page = positiveInt(params.get("page")) ?? 1;
  query.pageSize = positiveInt(params.get("pageSize")) ?? DEFAULT_PAGE_SIZE;
  return query;
}

/** Serialize a queue query back into a search string, dropping defaults. */
export function queryToSearch(query: QueueQuery): string {
  const params = new URLSearchParams();
  if (query.status !== "needs-review") params.set("status", query.status);
  if (query.kind !== "any") params.set("kind", query.kind);
  if (query.provenance !== "any") params.set("provenance", query.provenance);
  if (query.minSize !== null) params.set("minSize", String(query.minSize));
  if (query.q) params.set("q", query.q);
  if (query.page > 1) params.set("page", String(query.page));
  if (query.pageSize !== DEFAULT_PAGE_SIZE) params.set("pageSize", String(query.pageSize));
  const qs = params.toString();
  return qs ? `?${qs}` : "";
}

/**
 * Translate a queue query into GET /api/sets parameters. The "any" choices
 * simply leave the server-side filter out; filtering never happens on the
 * client.
 */
export function queryToApiParams(query: QueueQuery): URLSearchParams {
  const params = new URLSearchParams();
  if (query.status !== "any") params.set("status", query.status);
  if (query.kind !== "any") params.set("kind", query.kind);
  if (query.provenance !== "any") params.set("provenance", query.provenance);
  if (query.minSize !== null) params.set("minSize", String(query.minSize));
  if (query.q) params.set("q", query.q);
  params.set("page", String(query.page));
  params.set("pageSize", String(query.pageSize));
  return params;
}

export function detailSearch(setId: string): string {
  const params = new URLSearchParams({ set: setId });
  return `?${params.toString()}`;
}
