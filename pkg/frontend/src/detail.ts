/**
 * Set detail view.
 *
 * Members are laid out as a side-by-side comparison grid, one column per
 * profile, with the display name and homepage link visible up front. Nothing
 * is folded behind hover or extra clicks; a curator judging a merge needs to
 * see all candidates at once.
 *
 * The decision form collects exactly what POST /api/sets/{id}/decision
 * expects. An amended membership is whatever boxes the curator left checked,
 * sent verbatim; the client never computes set membership on its own.
 */

import { escapeHtml, formatTimestamp, provenanceBadge, statusBadge } from "./html.js";
import type {
  DecisionRequest,
  HistoryEvent,
  MemberDetail,
  SetDetail,
} from "./types.js";

export interface DetailHandlers {
  onBack(): void;
  onDecide(request: DecisionRequest): void;
  onReopen(): void;
}

export interface DetailOptions {
  /** Render the optimistic "saving" state, with the form gone. */
  saving?: boolean;
  /** Show the form again even though a decision exists. */
  reopen?: boolean;
}

function renderMemberColumn(member: MemberDetail): string {
  const missingClass = member.missing ? " member-missing" : "";
  const name = member.missing
    ? `<span class="placeholder">profile not in this run</span>`
    : escapeHtml(member.name ?? "(unnamed)");
  const link = member.url
    ? `<a class="member-url" href="${escapeHtml(member.url)}" target="_blank" rel="noopener noreferrer">${escapeHtml(member.url)}</a>`
    : `<span class="member-url placeholder">no homepage on record</span>`;
  const claims =
    member.claims.length > 0
      ? member.claims.map((c) => `<code class="claim">${escapeHtml(c)}</code>`).join(" ")
      : `<span class="placeholder">none</span>`;
  return `
    <section class="member-col${missingClass}" data-member-id="${escapeHtml(member.id)}">
      <h3 class="member-name">${name}</h3>
      ${link}
      <dl class="member-facts">
        <dt>Registry</dt><dd>${escapeHtml(member.registry)}</dd>
        <dt>Record</dt><dd><code>${escapeHtml(member.id)}</code></dd>
        <dt>Claims</dt><dd>${claims}</dd>
      </dl>
    </section>`;
}

function describeEvent(event: HistoryEvent): string {
  if (event.event === "merged" && event.sets) {
    const via = event.clusters?.length ? ` via ${event.clusters.join(", ")}` : "";
    return `merged from ${event.sets.join(" + ")}${via}`;
  }
  if (event.event === "extended") {
    const added = event.added?.length ? `, added ${event.added.join(", ")}` : "";
    const via = event.cluster ?? event.clusters?.join(", ") ?? "";
    return `extended${via ? ` via ${via}` : ""}${added}`;
  }
  if (event.event === "promoted") {
    const via = event.cluster ?? event.clusters?.join(", ") ?? "";
    return `promoted${via ? ` from ${via}` : ""}`;
  }
  return JSON.stringify(event);
}

function renderHistory(detail: SetDetail): string {
  if (detail.history.length === 0) return "";
  const items = detail.history
    .map((event) => `<li class="history-event">${escapeHtml(describeEvent(event))}</li>`)
    .join("");
  return `
    <section class="history">
      <h3>Merge history</h3>
      <ul>${items}</ul>
    </section>`;
}

function renderDecisionTrail(detail: SetDetail, saving: boolean): string {
  const decision = detail.decision!;
  const by = decision.decidedBy ? ` by ${escapeHtml(decision.decidedBy)}` : "";
  const note = decision.note
    ? `<p class="decision-note">${escapeHtml(decision.note)}</p>`
    : "";
  const members =
    decision.action === "amend" && decision.members
      ? `<p class="decision-members">kept: ${decision.members
          .map((m) => `<code>${escapeHtml(m)}</code>`)
          .join(", ")}</p>`
      : "";
  const marker = saving
    ? `<p class="saving" id="decision-saving">Saving decision...</p>`
    : `<button type="button" id="reopen-decision">Change decision</button>`;
  return `
    <section class="decision-trail" id="decision-trail">
      <h3>Decision</h3>
      <p><strong class="decision-action">${escapeHtml(decision.action)}</strong>${by}
        <span class="decision-at">${escapeHtml(formatTimestamp(decision.decidedAt))}</span></p>
      ${note}
      ${members}
      ${marker}
    </section>`;
}

function renderDecisionForm(detail: SetDetail): string {
  const checkboxes = detail.members
    .map(
      (m) => `
      <label class="member-check">
        <input type="checkbox" name="member" value="${escapeHtml(m.id)}" checked>
        <code>${escapeHtml(m.id)}</code> ${escapeHtml(m.name ?? "")}
      </label>`,
    )
    .join("");
  return `
    <section class="decision-panel">
      <h3>Decision</h3>
      <form id="decision-form" novalidate>
        <fieldset class="actions">
          <label><input type="radio" name="action" value="accept" checked> Accept</label>
          <label><input type="radio" name="action" value="reject"> Reject</label>
          <label><input type="radio" name="action" value="amend"> Amend membership</label>
        </fieldset>
        <fieldset id="amend-members" disabled>
          <legend>Keep these members</legend>
          ${checkboxes}
        </fieldset>
        <label class="field">Reviewer
          <input name="decidedBy" required placeholder="who is deciding">
        </label>
        <label class="field">Note
          <textarea name="note" rows="2"></textarea>
        </label>
        <button type="submit" id="submit-decision">Submit decision</button>
        <p id="decision-error" class="form-error" hidden></p>
      </form>
    </section>`;
}

export function renderSetDetail(detail: SetDetail, opts: DetailOptions = {}): string {
  const reason = detail.reason
    ? `<span class="badge reason">${escapeHtml(detail.reason)}</span>`
    : "";
  const note = detail.note ? `<p class="set-note">${escapeHtml(detail.note)}</p>` : "";
  const showTrail = detail.decision !== null && !opts.reopen;
  const decisionSection = showTrail
    ? renderDecisionTrail(detail, opts.saving ?? false)
    : renderDecisionForm(detail);
  return `
    <section class="detail-view" data-set-id="${escapeHtml(detail.id)}">
      <a href="?" id="back-link">Back to queue</a>
      <header class="detail-header">
        <h2>${escapeHtml(detail.id)}</h2>
        ${provenanceBadge(detail.provenance)}
        ${statusBadge(detail.status)}
        ${reason}
        <span class="kind">${escapeHtml(detail.kind)}</span>
      </header>
      ${note}
      <div class="grid-wrap">
        <div class="compare-grid" style="--cols: ${detail.members.length}">
          ${detail.members.map(renderMemberColumn).join("")}
        </div>
      </div>
      ${renderHistory(detail)}
      ${decisionSection}
    </section>`;
}

export function attachDetailListeners(
  root: HTMLElement,
  detail: SetDetail,
  handlers: DetailHandlers,
): void {
  root.querySelector("#back-link")?.addEventListener("click", (event) => {
    event.preventDefault();
    handlers.onBack();
  });

  root.querySelector("#reopen-decision")?.addEventListener("click", () => {
    handlers.onReopen();
  });

  const form = root.querySelector<HTMLFormElement>("#decision-form");
  if (!form) return;

  const amendFieldset = form.querySelector<HTMLFieldSetElement>("#amend-members")!;
  for (const radio of form.querySelectorAll<HTMLInputElement>('input[name="action"]')) {
    radio.addEventListener("change", () => {
      amendFieldset.disabled = radio.value !== "amend" || !radio.checked;
    });
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const errorBox = form.querySelector<HTMLElement>("#decision-error")!;
    errorBox.hidden = true;

    const action = form.querySelector<HTMLInputElement>('input[name="action"]:checked')!
      .value as DecisionRequest["action"];
    const decidedBy = form.querySelector<HTMLInputElement>('input[name="decidedBy"]')!.value.trim();
    const note = form.querySelector<HTMLTextAreaElement>('textarea[name="note"]')!.value.trim();

    if (!decidedBy) {
      errorBox.textContent = "Enter a reviewer name before submitting.";
      errorBox.hidden = false;
      return;
    }

    const request: DecisionRequest = { action, runId: detail.runId, decidedBy };
    if (note) request.note = note;
    if (action === "amend") {
      const kept = [
        ...form.querySelectorAll<HTMLInputElement>('input[name="member"]:checked'),
      ].map((box) => box.value);
      if (kept.length === 0) {
        errorBox.textContent = "An amended set must keep at least one member.";
        errorBox.hidden = false;
        return;
      }
      request.members = kept;
    }
    handlers.onDecide(request);
  });
}
