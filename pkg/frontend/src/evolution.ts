/** Code Evolution view: stacked per-metric time-series charts with one
 * linked cursor; failed snapshots appear as gaps, never interpolated. */

import { ApiClient } from "./api.js";
import { ChartHandle, linkCharts, renderMetricChart } from "./charts.js";
import { LinkedCursorState, setHover } from "./state.js";

export const DEFAULT_METRICS = [
  "bugs",
  "vulnerabilities",
  "code_smells",
  "ncloc",
  "complexity",
  "duplicated_line_density",
  "coverage",
];

export async function renderEvolutionView(
  api: ApiClient,
  runId: string,
  state: LinkedCursorState,
): Promise<HTMLElement> {
  const root = document.createElement("div");
  root.className = "evolution";

  const picker = document.createElement("div");
  picker.className = "metric-picker";
  root.appendChild(picker);

  const chartsBox = document.createElement("div");
  chartsBox.className = "charts";
  root.appendChild(chartsBox);

  const series = await api.series(runId, DEFAULT_METRICS);
  const timestamps = series.commits.map((c) => c.committed_at);

  if (state.visibleMetrics.size === 0) {
    for (const name of DEFAULT_METRICS) state.visibleMetrics.add(name);
  }

  const rebuild = () => {
    chartsBox.innerHTML = "";
    const charts: ChartHandle[] = [];
    const broadcastRef: { fn: (ts: number | null) => void } = { fn: () => {} };
    for (const name of DEFAULT_METRICS) {
      if (!state.visibleMetrics.has(name)) continue;
      const chart = renderMetricChart({
        name,
        timestamps,
        values: series.metrics[name],
        onHover: (ts) => {
          const next = setHover(state, ts, timestamps);
          state.hoveredTimestamp = next.hoveredTimestamp;
          broadcastRef.fn(state.hoveredTimestamp);
        },
      });
      charts.push(chart);
      chartsBox.appendChild(chart.element);
    }
    broadcastRef.fn = linkCharts(charts);
    if (state.hoveredTimestamp !== null) {
      broadcastRef.fn(state.hoveredTimestamp);
    }
  };

  for (const name of DEFAULT_METRICS) {
    const label = document.createElement("label");
    label.className = "metric-toggle";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = state.visibleMetrics.has(name);
    box.addEventListener("change", () => {
      if (box.checked) {
        state.visibleMetrics.add(name);
      } else {
        state.visibleMetrics.delete(name);
      }
      rebuild();
    });
    label.appendChild(box);
    label.appendChild(document.createTextNode(` ${name}`));
    picker.appendChild(label);
  }

  rebuild();
  return root;
}
