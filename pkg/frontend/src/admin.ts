// Minimal admin view: the analytics report as plain tables.

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

interface QuestionDistribution {
  counts: Record<string, number>;
  percentages: Record<string, number>;
  at_least: Record<string, number>;
}

export interface ReportDocument {
  n: number;
  distributions: {
    questions: Record<string, QuestionDistribution>;
    preference: { counts: Record<string, number>; percentages: Record<string, number> };
  } | null;
  stats_table?: string;
  word_frequencies: Record<string, [string, number][]>;
}

function distributionTable(name: string, question: QuestionDistribution): string {
  const rows = Object.keys(question.counts)
    .map(
      (level) =>
        `<tr><td>${escapeHtml(level)}</td><td>${question.counts[level]}</td>` +
        `<td>${question.percentages[level].toFixed(1)}%</td>` +
        `<td>${question.at_least[level].toFixed(1)}%</td></tr>`,
    )
    .join("");
  return (
    `<h3>${escapeHtml(name)}</h3>` +
    `<table><thead><tr><th>Level</th><th>Count</th><th>Share</th><th>At least</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

export function renderReportHtml(report: ReportDocument): string {
  const pieces: string[] = [`<p>Responses: ${report.n}</p>`];
  if (report.distributions) {
    for (const [name, question] of Object.entries(report.distributions.questions)) {
      pieces.push(distributionTable(name, question));
    }
    const preferenceRows = Object.entries(report.distributions.preference.percentages)
      .map(
        ([option, share]) =>
          `<tr><td>${escapeHtml(option)}</td><td>${share.toFixed(1)}%</td></tr>`,
      )
      .join("");
    pieces.push(
      `<h3>preference</h3><table><tbody>${preferenceRows}</tbody></table>`,
    );
  }
  if (report.stats_table) {
    pieces.push(`<h3>sentiment</h3><pre>${escapeHtml(report.stats_table)}</pre>`);
  }
  for (const side of ["positive", "negative"]) {
    const entries = report.word_frequencies?.[side] ?? [];
    const items = entries
      .slice(0, 15)
      .map(([token, count]) => `<li>${escapeHtml(token)} (${count})</li>`)
      .join("");
    pieces.push(`<h3>${side} words</h3><ol>${items}</ol>`);
  }
  return pieces.join("\n");
}
