// Admin page glue: token entry, report fetch, tabular rendering.

import { ApiClient } from "./api.js";
import { renderReportHtml, type ReportDocument } from "./admin.js";

const form = document.getElementById("token-form") as HTMLFormElement | null;
const output = document.getElementById("report");
const client = new ApiClient("");

form?.addEventListener("submit", async (event) => {
  event.preventDefault();
  if (!output) return;
  const token = (new FormData(form).get("token") ?? "").toString();
  output.textContent = "loading…";
  try {
    const report = (await client.adminReport(token)) as unknown as ReportDocument;
    output.innerHTML = renderReportHtml(report);
  } catch (error) {
    output.textContent =
      error instanceof Error ? error.message : "could not load the report";
  }
});
