/** Small string-templating helpers shared by the views. */

export function escapeHtml(value: unknown): string {
  return String(value ?? "")
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function provenanceBadge(provenance: string): string {
  const safe = escapeHtml(provenance);
  return `<span class="badge prov-${safe}">${safe}</span>`;
}

export function statusBadge(status: string): string {
  const safe = escapeHtml(status);
  return `<span class="badge status-${safe}">${safe}</span>`;
}

/** ISO timestamps from the API read fine with minimal reshaping. */
export function formatTimestamp(iso: string): string {
  return iso.replace("T", " ").replace("+00:00", " UTC");
}
