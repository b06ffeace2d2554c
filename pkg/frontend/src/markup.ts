// Assistant message rendering: double-asterisk segments become bold, raw
// HTML never reaches the page, and malformed markers fall back to literal
// text instead of crashing.

const BOLD_SEGMENT = /\*\*([^*]+)\*\*/g;

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderAssistantHtml(text: string): string {
  if (!text) return "";
  const escaped = escapeHtml(text);
  const bolded = escaped.replace(BOLD_SEGMENT, "<strong>$1</strong>");
  return bolded.split("\n").join("<br>");
}

export function renderParticipantHtml(text: string): string {
  return escapeHtml(text).split("\n").join("<br>");
}
