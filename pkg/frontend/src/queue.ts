/**
 * Queue view: the filterable, pageable list of duplicate sets.
 *
 * The filters mirror the server-side query parameters one to one. Submitting
 * the form never filters rows locally; it produces a new QueueQuery and the
 * caller refetches. That keeps the URL, the table and the API in agreement.
 */

import { escapeHtml, provenanceBadge, statusBadge } from "./html.js";
import { detailSearch, type QueueQuery } from "./state.js";
import type { SetListing, SetSummary } from "./types.js";

export interface QueueHandlers {
  onOpenSet(setId: string): void;
  onQueryChange(query: QueueQuery): void;
}

const STATUS_CHOICES = ["needs-review", "any", "auto", "accepted", "rejected", "amended"];
const KIND_CHOICES = ["any", "set", "problematic"];
const PROVENANCE_CHOICES = [
  "any",
  "claims-only",
  "extended",
  "merged",
  "dedup-only",
  "problematic",
];

function options(choices: string[], selected: string): string {
  return choices
    .map((choice) => {
      const sel = choice === selected ? " selected" : "";
      return `<option value="${choice}"${sel}>${choice}</option>`;
    })
    .join("");
}

function memberPreview(set: SetSummary): string {
  const names = set.members.map((m) => m.name ?? m.id);
  const shown = names.slice(0, 3);
  const extra = names.length - shown.length;
  const suffix = extra > 0 ? ` and ${extra} more` : "";
  return escapeHtml(shown.join(", ") + suffix);
}

function renderRow(set: SetSummary): string {
  return `
    <tr class="queue-row" data-set-id="${escapeHtml(set.id)}">
      <td><a class="set-link" href="${escapeHtml(detailSearch(set.id))}">${escapeHtml(set.id)}</a></td>
      <td>${escapeHtml(set.kind)}</td>
      <td>${provenanceBadge(set.provenance)}</td>
      <td>${statusBadge(set.status)}</td>
      <td class="num">${set.members.length}</td>
      <td class="preview">${memberPreview(set)}</td>
    </tr>`;
}

function renderFilters(query: QueueQuery): string {
  return `
    <form id="queue-filters" class="filters">
      <label>Status
        <select name="status">${options(STATUS_CHOICES, query.status)}</select>
      </label>
      <label>Kind
        <select name="kind">${options(KIND_CHOICES, query.kind)}</select>
      </label>
      <label>Provenance
        <select name="provenance">${options(PROVENANCE_CHOICES, query.provenance)}</select>
      </label>
      <label>Min size
        <input name="minSize" type="number" min="1" value="${query.minSize ?? ""}">
      </label>
      <label>Search
        <input name="q" type="search" value="${escapeHtml(query.q)}" placeholder="id or name">
      </label>
      <button type="submit">Apply</button>
    </form>`;
}

function renderPager(listing: SetListing): string {
  const pages = Math.max(1, Math.ceil(listing.total / listing.pageSize));
  const prevDisabled = listing.page <= 1 ? " disabled" : "";
  const nextDisabled = listing.page >= pages ? " disabled" : "";
  return `
    <nav class="pager">
      <button type="button" id="prev-page"${prevDisabled}>Previous</button>
      <span id="page-indicator">page ${listing.page} of ${pages}</span>
      <button type="button" id="next-page"${nextDisabled}>Next</button>
    </nav>`;
}

export function renderQueueView(listing: SetListing, query: QueueQuery): string {
  const body =
    listing.total === 0
      ? `<p class="empty-state" id="queue-empty">Nothing to review. No sets match the current filter.</p>`
      : `
    <div class="table-wrap">
      <table class="queue-table">
        <thead>
          <tr><th>Set</th><th>Kind</th><th>Provenance</th><th>Status</th><th>Size</th><th>Members</th></tr>
        </thead>
        <tbody>
          ${listing.items.map(renderRow).join("")}
        </tbody>
      </table>
    </div>
    ${renderPager(listing)}`;
  return `
    <section class="queue-view">
      ${renderFilters(query)}
      <p class="queue-count">${listing.total} set${listing.total === 1 ? "" : "s"} match</p>
      ${body}
    </section>`;
}

export function attachQueueListeners(
  root: HTMLElement,
  query: QueueQuery,
  handlers: QueueHandlers,
): void {
  const form = root.querySelector<HTMLFormElement>("#queue-filters");
  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    const field = <T extends HTMLElement>(name: string) =>
      form.querySelector<T>(`[name="${name}"]`)!;
    const minSizeRaw = field<HTMLInputElement>("minSize").value.trim();
    const minSize = minSizeRaw === "" ? null : Number(minSizeRaw);
    handlers.onQueryChange({
      ...query,
      status: field<HTMLSelectElement>("status").value as QueueQuery["status"],
      kind: field<HTMLSelectElement>("kind").value as QueueQuery["kind"],
      provenance: field<HTMLSelectElement>("provenance").value as QueueQuery["provenance"],
      minSize: Number.isInteger(minSize) && (minSize as number) >= 1 ? minSize : null,
      q: field<HTMLInputElement>("q").value.trim(),
      page: 1,
    });
  });

  for (const link of root.querySelectorAll<HTMLAnchorElement>(".set-link")) {
    link.addEventListener("click", (event) => {
      event.preventDefault();
      const row = link.closest<HTMLElement>("[data-set-id]");
      if (row?.dataset.setId) handlers.onOpenSet(row.dataset.setId);
    });
  }

  root.querySelector("#prev-page")?.addEventListener("click", () => {
    handlers.onQueryChange({ ...query, page: Math.max(1, query.page - 1) });
  });
  root.querySelector("#next-page")?.addEventListener("click", () => {
    handlers.onQueryChange({ ...query, page: query.page + 1 });
  });
}
