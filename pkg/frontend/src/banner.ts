/**
 * Failure banner. A queue that silently shows nothing is indistinguishable
 * from an empty queue, so every failed fetch renders one of these instead.
 */

import { escapeHtml } from "./html.js";

export function renderErrorBanner(message: string): string {
  return `
    <div class="error-banner" role="alert">
      <p class="error-message">${escapeHtml(message)}</p>
      <button type="button" id="retry-btn">Retry</button>
    </div>`;
}

export function attachBannerListeners(root: HTMLElement, onRetry: () => void): void {
  root.querySelector("#retry-btn")?.addEventListener("click", onRetry);
}
