/**
 * Stale-run dialog.
 *
 * When the server answers a decision with a 409 conflict, the run directory
 * holds a different run than the one this page loaded. Nothing on the page
 * can be trusted at that point, so the dialog blocks the whole UI and offers
 * a reload as the only way forward.
 */

import { escapeHtml } from "./html.js";

export function showStaleRunDialog(message: string): void {
  if (document.getElementById("stale-run-dialog")) return;
  const overlay = document.createElement("div");
  overlay.id = "stale-run-dialog";
  overlay.className = "modal-overlay";
  overlay.innerHTML = `
    <div class="modal" role="alertdialog" aria-modal="true" aria-labelledby="stale-run-title">
      <h2 id="stale-run-title">This run has changed</h2>
      <p>${escapeHtml(message)}</p>
      <p>The pipeline was re-run after this page loaded, so the sets shown here
      no longer match the data on disk. Reload the page to continue reviewing
      the current run.</p>
      <button type="button" id="stale-reload-btn">Reload</button>
    </div>`;
  overlay
    .querySelector("#stale-reload-btn")!
    .addEventListener("click", () => location.reload());
  document.body.append(overlay);
}
