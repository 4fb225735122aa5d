// Results dashboard: per-source judgment percentages plus the pairwise
// statistics block, rendered 1:1 from the /api/results payload.

import type { ResultsTable } from "./api.js";

const SOURCE_ORDER = ["random", "real", "beam_n", "beam_3"] as const;

const SOURCE_LABELS: Record<string, string> = {
  random: "Shuffled order",
  real: "Recorded session",
  beam_n: "Model (uncapped)",
  beam_3: "Model (3-object chunks)",
};

function fmtPct(value: number | null): string {
  return value === null ? "–" : `${value}%`;
}

export function renderDashboard(doc: Document, results: ResultsTable): HTMLElement {
  const section = doc.createElement("section");
  section.className = "dashboard";

  const heading = doc.createElement("h2");
  heading.textContent = "Results";
  section.appendChild(heading);

  if (results.total_judgments === 0) {
    const empty = doc.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No judgments yet.";
    section.appendChild(empty);
    return section;
  }

  const table = doc.createElement("table");
  table.className = "results-table";
  const head = doc.createElement("tr");
  for (const title of ["Sequence type", "Judged person-made", "Judged computer-made", "n"]) {
    const th = doc.createElement("th");
    th.textContent = title;
    head.appendChild(th);
  }
  table.appendChild(head);
  for (const source of SOURCE_ORDER) {
    const row = results.rows[source];
    if (!row) continue;
    const tr = doc.createElement("tr");
    tr.dataset.source = source;
    const cells = [
      SOURCE_LABELS[source] ?? source,
      fmtPct(row.judged_human_pct),
      fmtPct(row.judged_computer_pct),
      String(row.n),
    ];
    for (const text of cells) {
      const td = doc.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  section.appendChild(table);

  if (results.pair) {
    const block = doc.createElement("div");
    block.className = "pair-stats";
    const [a, b] = results.pair.sources;
    if (results.pair.available) {
      const { boschloo_p, cohens_h, power } = results.pair;
      block.textContent =
        `${SOURCE_LABELS[a] ?? a} vs ${SOURCE_LABELS[b] ?? b}: ` +
        `exact test p = ${boschloo_p?.toFixed(4)}, ` +
        `effect size h = ${cohens_h?.toFixed(3)}, ` +
        `power = ${power == null ? "–" : power.toFixed(3)}`;
      block.dataset.boschlooP = String(boschloo_p);
      block.dataset.cohensH = String(cohens_h);
      block.dataset.power = String(power ?? "");
    } else {
      block.textContent = `${SOURCE_LABELS[a] ?? a} vs ${SOURCE_LABELS[b] ?? b}: ${
        results.pair.reason ?? "not available"
      }`;
    }
    section.appendChild(block);
  }
  return section;
}
