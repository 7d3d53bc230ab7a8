/** Single-page bootstrap: run list, wizard, and the two analysis views. */

import { ApiClient, RunSummary } from "./api.js";
import { renderEvolutionView } from "./evolution.js";
import { initialCursorState } from "./state.js";
import { renderWeightedView } from "./weighted.js";
import { renderWizard } from "./wizard.js";

const api = new ApiClient();
const cursorState = initialCursorState();

const app = document.getElementById("app")!;
const nav = document.getElementById("nav")!;

type View = "runs" | "new" | "evolution" | "weighted";

let currentRun: string | null = null;

function navButton(label: string, view: View): HTMLButtonElement {
  const button = document.createElement("button");
  button.textContent = label;
  button.addEventListener("click", () => void show(view));
  return button;
}

nav.append(
  navButton("Runs", "runs"),
  navButton("New run", "new"),
  navButton("Code Evolution", "evolution"),
  navButton("Weighted Significance", "weighted"),
);

async function show(view: View): Promise<void> {
  app.innerHTML = "";
  if (view === "runs") {
    app.appendChild(await renderRunList());
    return;
  }
  if (view === "new") {
    app.appendChild(
      renderWizard(api, {
        onComplete(runId) {
          currentRun = runId;
          cursorState.selectedRun = runId;
          void show("evolution");
        },
      }),
    );
    return;
  }
  if (!currentRun) {
    const hint = document.createElement("p");
    hint.textContent = "Pick a run first (Runs tab).";
    app.appendChild(hint);
    return;
  }
  if (view === "evolution") {
    app.appendChild(await renderEvolutionView(api, currentRun, cursorState));
  } else {
    const weighted = renderWeightedView(api, currentRun);
    app.appendChild(weighted.element);
    await weighted.refresh();
  }
}

async function renderRunList(): Promise<HTMLElement> {
  const box = document.createElement("div");
  box.className = "run-list";
  let runs: RunSummary[];
  try {
    runs = await api.listRuns();
  } catch (err) {
    box.textContent = String(err);
    return box;
  }
  if (!runs.length) {
    box.textContent = "No runs yet. Start one from the New run tab.";
    return box;
  }
  const table = document.createElement("table");
  table.innerHTML =
    "<thead><tr><th>run</th><th>repo</th><th>branch</th><th>phase</th><th>progress</th></tr></thead>";
  const body = document.createElement("tbody");
  for (const run of runs) {
    const row = document.createElement("tr");
    row.innerHTML = `
      <td class="mono">${run.run_id}</td>
      <td>${run.repo}</td>
      <td>${run.branch}</td>
      <td>${run.phase}</td>
      <td>${run.done}+${run.failed}/${run.total}</td>
    `;
    row.addEventListener("click", () => {
      currentRun = run.run_id;
      cursorState.selectedRun = run.run_id;
      void show("evolution");
    });
    body.appendChild(row);
  }
  table.appendChild(body);
  box.appendChild(table);
  return box;
}

void show("runs");
