/** Weighted significance view: five weight sliders (integer percent,
 * rebalanced on commit so they always sum to 100), the score chart, and the
 * ranked hotspot table with per-commit issue drill-down.
 *
 * Scores are never computed client-side: every number on screen comes from
 * the significance endpoint and is stored verbatim in data attributes. */

import { ApiClient, ApiError, SignificanceOut } from "./api.js";
import { renderMetricChart } from "./charts.js";
import {
  CATEGORIES,
  Category,
  SliderValues,
  defaultSliders,
  rebalance,
  sliderSum,
  toWeights,
} from "./state.js";

export interface WeightedView {
  element: HTMLElement;
  /** current committed sliders (always sum to 100) */
  sliders(): SliderValues;
  /** latest payload rendered, for tests and inspection */
  lastResponse(): SignificanceOut | null;
  refresh(): Promise<void>;
}

export function renderWeightedView(api: ApiClient, runId: string): WeightedView {
  let sliders = defaultSliders();
  let lastResponse: SignificanceOut | null = null;
  let inflight: AbortController | null = null;

  const root = document.createElement("div");
  root.className = "weighted";
  root.innerHTML = `
    <div class="weight-editor"></div>
    <div class="weight-error" role="alert" hidden></div>
    <div class="sig-chart"></div>
    <table class="hotspots">
      <thead>
        <tr><th>#</th><th>commit</th><th>when</th><th>score</th><th>top contribution</th></tr>
      </thead>
      <tbody></tbody>
    </table>
    <div class="issue-panel" hidden>
      <h3 class="issue-title"></h3>
      <ul class="issue-list"></ul>
    </div>
  `;

  const editor = root.querySelector<HTMLDivElement>(".weight-editor")!;
  const errorBox = root.querySelector<HTMLDivElement>(".weight-error")!;
  const chartBox = root.querySelector<HTMLDivElement>(".sig-chart")!;
  const tableBody = root.querySelector<HTMLTableSectionElement>(".hotspots tbody")!;
  const issuePanel = root.querySelector<HTMLDivElement>(".issue-panel")!;

  const sliderInputs = new Map<Category, HTMLInputElement>();
  const sliderLabels = new Map<Category, HTMLElement>();

  for (const category of CATEGORIES) {
    const row = document.createElement("label");
    row.className = "weight-row";
    const caption = document.createElement("span");
    caption.textContent = category;
    const value = document.createElement("span");
    value.className = "weight-value";
    const input = document.createElement("input");
    input.type = "range";
    input.min = "0";
    input.max = "100";
    input.step = "1";
    input.dataset.category = category;
    input.addEventListener("change", () => {
      sliders = rebalance(sliders, category, Number(input.value));
      syncSliders();
      void refresh();
    });
    row.append(caption, input, value);
    editor.appendChild(row);
    sliderInputs.set(category, input);
    sliderLabels.set(category, value);
  }

  const syncSliders = () => {
    for (const category of CATEGORIES) {
      sliderInputs.get(category)!.value = String(sliders[category]);
      sliderLabels.get(category)!.textContent = `${sliders[category]}%`;
    }
    editor.dataset.sum = String(sliderSum(sliders));
  };

  const renderResponse = (response: SignificanceOut) => {
    lastResponse = response;
    chartBox.innerHTML = "";
    const timestamps = response.commits.map((c) => c.committed_at);
    const chart = renderMetricChart({
      name: "significance",
      timestamps,
      values: response.scores,
      color: "#c0392b",
    });
    // raw payload numbers, exactly as received
    chart.element.dataset.scores = JSON.stringify(response.scores);
    chartBox.appendChild(chart.element);

    tableBody.innerHTML = "";
    response.hotspots.forEach((hotspot, rank) => {
      const row = document.createElement("tr");
      row.className = "hotspot-row";
      row.dataset.commit = hotspot.commit_id;
      row.dataset.score = String(hotspot.score);
      const topCategory = Object.entries(hotspot.contributions).sort(
        (a, b) => Math.abs(b[1]) - Math.abs(a[1]),
      )[0];
      row.innerHTML = `
        <td>${rank + 1}</td>
        <td class="mono">${hotspot.commit_id.slice(0, 10)}</td>
        <td>${new Date(hotspot.committed_at * 1000).toISOString()}</td>
        <td class="mono score-cell">${hotspot.score}</td>
        <td>${topCategory ? `${topCategory[0]} ${topCategory[1].toFixed(3)}` : ""}</td>
      `;
      row.addEventListener("click", () => void showIssues(hotspot.commit_id));
      tableBody.appendChild(row);
    });
  };

  const showIssues = async (commitId: string) => {
    const body = await api.issues(runId, commitId);
    issuePanel.hidden = false;
    issuePanel.querySelector(".issue-title")!.textContent =
      `Issues at ${commitId.slice(0, 10)}`;
    const list = issuePanel.querySelector(".issue-list")!;
    list.innerHTML = "";
    for (const issue of body.issues) {
      const item = document.createElement("li");
      item.textContent =
        `[${issue.severity}] ${issue.rule_id} ${issue.file}:${issue.line} ${issue.message}`;
      list.appendChild(item);
    }
  };

  const refresh = async (renormalize = false): Promise<void> => {
    errorBox.hidden = true;
    inflight?.abort(); // latest-wins: only one significance request in flight
    inflight = new AbortController();
    try {
      const response = await api.significance(
        runId,
        { weights: toWeights(sliders), renormalize, top_n: 10 },
        inflight.signal,
      );
      renderResponse(response);
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") return;
      if (err instanceof ApiError && err.code === "MissingCategoryError") {
        errorBox.innerHTML = "";
        errorBox.append(`${err.code}: ${err.message} `);
        const retry = document.createElement("button");
        retry.textContent = "Renormalize and retry";
        retry.addEventListener("click", () => void refresh(true));
        errorBox.appendChild(retry);
        errorBox.hidden = false;
        return;
      }
      errorBox.textContent = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
      errorBox.hidden = false;
    }
  };

  syncSliders();
  return {
    element: root,
    sliders: () => ({ ...sliders }),
    lastResponse: () => lastResponse,
    refresh,
  };
}
