/**
 * Application wiring: routing, data fetching and the decision flow.
 *
 * The render cycle is deliberately dumb. Navigation writes the new state
 * into the URL and re-renders from scratch; there is no client-side cache of
 * sets beyond the document currently on screen. The numbers in the top bar
 * are the only piece of optimistic state, and they are restored whenever a
 * decision fails.
 */

import { ApiError, fetchRun, fetchSet, fetchSets, fetchStats, submitDecision } from "./api.js";
import { attachBannerListeners, renderErrorBanner } from "./banner.js";
import { attachDetailListeners, renderSetDetail, type DetailOptions } from "./detail.js";
import { showStaleRunDialog } from "./dialog.js";
import { escapeHtml } from "./html.js";
import { attachQueueListeners, renderQueueView } from "./queue.js";
import {
  detailSearch,
  parseRoute,
  queryToApiParams,
  queryToSearch,
  type QueueQuery,
} from "./state.js";
import type { DecisionRequest, SetDetail, SetStatus } from "./types.js";

interface AppState {
  runId: string | null;
  pendingReview: number | null;
}

const state: AppState = { runId: null, pendingReview: null };

let popstateHooked = false;

function viewEl(): HTMLElement {
  return document.getElementById("view")!;
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0 ? err.message : `${err.message} (${err.code})`;
  }
  return String(err);
}

function updateTopbar(): void {
  const runChip = document.getElementById("run-chip");
  if (runChip) {
    runChip.hidden = state.runId === null;
    runChip.textContent = state.runId ? `run ${state.runId}` : "";
  }
  const pendingChip = document.getElementById("pending-chip");
  if (pendingChip) {
    pendingChip.hidden = state.pendingReview === null;
    pendingChip.textContent =
      state.pendingReview === null ? "" : `${state.pendingReview} pending review`;
  }
}

export function navigate(search: string): void {
  history.pushState({}, "", location.pathname + search);
  void render();
}

async function renderQueue(query: QueueQuery): Promise<void> {
  const view = viewEl();
  view.innerHTML = `<p class="loading">Loading queue...</p>`;
  let listing;
  try {
    listing = await fetchSets(queryToApiParams(query));
  } catch (err) {
    view.innerHTML = renderErrorBanner(describeError(err));
    attachBannerListeners(view, () => void renderQueue(query));
    return;
  }
  state.runId = listing.runId;
  try {
    state.pendingReview = (await fetchStats()).pendingReview;
  } catch {
    // stats are decoration for the queue; a pre-merge run simply hides them
    state.pendingReview = null;
  }
  updateTopbar();
  view.innerHTML = renderQueueView(listing, query);
  attachQueueListeners(view, query, {
    onOpenSet: (setId) => navigate(detailSearch(setId)),
    onQueryChange: (next) => navigate(queryToSearch(next)),
  });
}

function paintDetail(detail: SetDetail, opts: DetailOptions = {}): void {
  const view = viewEl();
  view.innerHTML = renderSetDetail(detail, opts);
  attachDetailListeners(view, detail, {
    onBack: () => navigate(""),
    onReopen: () => paintDetail(detail, { reopen: true }),
    onDecide: (request) => void decide(detail, request),
  });
}

function statusFor(action: DecisionRequest["action"]): SetStatus {
  if (action === "accept") return "accepted";
  if (action === "reject") return "rejected";
  return "amended";
}

async function decide(detail: SetDetail, request: DecisionRequest): Promise<void> {
  const wasPending = detail.status === "needs-review";

  // Optimistic paint: show the decided state right away, remember the undo.
  if (wasPending && state.pendingReview !== null) {
    state.pendingReview -= 1;
    updateTopbar();
  }
  const preview: SetDetail = {
    ...detail,
    status: statusFor(request.action),
    decision: {
      seq: 0,
      setId: detail.id,
      action: request.action,
      runId: request.runId,
      decidedAt: new Date().toISOString(),
      decidedBy: request.decidedBy,
      note: request.note,
      members: request.members,
    },
  };
  paintDetail(preview, { saving: true });

  try {
    const result = await submitDecision(detail.id, request);
    paintDetail(result.set);
  } catch (err) {
    if (wasPending && state.pendingReview !== null) {
      state.pendingReview += 1;
      updateTopbar();
    }
    paintDetail(detail);
    if (err instanceof ApiError && err.code === "conflict") {
      showStaleRunDialog(err.message);
      return;
    }
    const errorBox = viewEl().querySelector<HTMLElement>("#decision-error");
    if (errorBox) {
      errorBox.textContent = describeError(err);
      errorBox.hidden = false;
    }
  }
}

async function renderDetail(setId: string): Promise<void> {
  const view = viewEl();
  view.innerHTML = `<p class="loading">Loading ${escapeHtml(setId)}...</p>`;
  let detail: SetDetail;
  try {
    detail = await fetchSet(setId);
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      view.innerHTML = `
        <p class="empty-state">${escapeHtml(err.message)}</p>
        <a href="?" id="back-link">Back to queue</a>`;
      view.querySelector("#back-link")?.addEventListener("click", (event) => {
        event.preventDefault();
        navigate("");
      });
      return;
    }
    view.innerHTML = renderErrorBanner(describeError(err));
    attachBannerListeners(view, () => void renderDetail(setId));
    return;
  }
  state.runId = detail.runId;
  updateTopbar();
  paintDetail(detail);
}

async function render(): Promise<void> {
  const route = parseRoute(location.search);
  if (route.view === "detail") {
    await renderDetail(route.setId);
  } else {
    await renderQueue(route.query);
  }
}

function renderShell(root: HTMLElement): void {
  root.innerHTML = `
    <header class="topbar">
      <h1><a href="?" id="home-link">regdedup review</a></h1>
      <span class="chip" id="run-chip" hidden></span>
      <span class="chip" id="pending-chip" hidden></span>
    </header>
    <main id="view"></main>`;
  root.querySelector("#home-link")?.addEventListener("click", (event) => {
    event.preventDefault();
    navigate("");
  });
}

/** Boot the app into #app, reading the initial route from the URL. */
export async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  state.runId = null;
  state.pendingReview = null;
  renderShell(root);
  if (!popstateHooked) {
    window.addEventListener("popstate", () => void render());
    popstateHooked = true;
  }
  try {
    state.runId = (await fetchRun()).runId;
  } catch {
    // the first real fetch will surface the problem with a retry banner
  }
  updateTopbar();
  await render();
}
