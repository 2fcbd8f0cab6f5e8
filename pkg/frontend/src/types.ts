/**
 * Wire types for the curation API.
 *
 * Field names follow the JSON payloads verbatim; nothing here is invented
 * client-side. Optional decision fields are genuinely optional on the wire
 * (the server drops them when they were not supplied).
 */

export type Registry = "fairsharing" | "re3data" | "opendoar" | "roar";

export type Provenance =
  | "claims-only"
  | "extended"
  | "merged"
  | "dedup-only"
  | "problematic";

export type SetStatus = "auto" | "needs-review" | "accepted" | "rejected" | "amended";

export type SetKind = "set" | "problematic";

export type DecisionAction = "accept" | "reject" | "amend";

/** Member document as it appears in queue listings (no claims there). */
export interface MemberSummary {
  id: string;
  registry: Registry;
  name: string | null;
  url: string | null;
  /** True when the profile is referenced by the set but absent from the run. */
  missing: boolean;
}

export interface MemberDetail extends MemberSummary {
  claims: string[];
}

export interface SetSummary {
  id: string;
  kind: SetKind;
  provenance: Provenance;
  status: SetStatus;
  reason: string | null;
  note: string | null;
  members: MemberSummary[];
}

export interface Decision {
  seq: number;
  setId: string;
  action: DecisionAction;
  runId: string;
  decidedAt: string;
  decidedBy?: string;
  note?: string;
  /** Amended membership, present only when action is "amend". */
  members?: string[];
}

/** Merge-stage provenance entry. Shapes vary by event, so keys are optional. */
export interface HistoryEvent {
  event: string;
  sets?: string[];
  clusters?: string[];
  cluster?: string;
  added?: string[];
}

export interface SetDetail extends SetSummary {
  runId: string;
  members: MemberDetail[];
  history: HistoryEvent[];
  decision: Decision | null;
}

export interface SetListing {
  runId: string;
  items: SetSummary[];
  total: number;
  page: number;
  pageSize: number;
}

export interface RunInfo {
  runId: string;
  stages: Record<string, boolean>;
}

export interface SizeBucket {
  count: number;
  share: number;
  combinations: Record<string, number>;
}

export interface Stats {
  runId: string;
  sets: number;
  problematic: number;
  pendingReview: number;
  byStatus: Record<string, number>;
  byProvenance: Record<string, number>;
  composition: {
    total: number;
    bySize: Record<string, SizeBucket>;
  };
}

export interface DecisionRequest {
  action: DecisionAction;
  runId: string;
  decidedBy: string;
  note?: string;
  members?: string[];
}

export interface DecisionResponse {
  decision: Decision;
  set: SetDetail;
}

export interface ApiErrorBody {
  status: number;
  code: "not_found" | "validation" | "conflict" | "stage_order";
  message: string;
}
