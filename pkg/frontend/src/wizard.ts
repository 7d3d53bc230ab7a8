/** Run-configuration wizard: connect, pick filters, start a run, watch it.
 * Progress polls GET /api/runs/{id} every second and backs off (up to 10 s)
 * while nothing changes. */

import { ApiClient, ApiError, RunConfigRequest } from "./api.js";

const POLL_BASE_MS = 1000;
const POLL_MAX_MS = 10000;
const POLL_BACKOFF = 1.5;

export interface WizardCallbacks {
  onComplete(runId: string): void;
}

export function renderWizard(
  api: ApiClient,
  callbacks: WizardCallbacks,
): HTMLElement {
  const root = document.createElement("div");
  root.className = "wizard";
  root.innerHTML = `
    <h2>New analysis run</h2>
    <form class="wizard-form">
      <label>Repository path or URL
        <input name="repo" required placeholder="/path/to/repo or https://...">
      </label>
      <label>Branch
        <input name="branch" required placeholder="main">
      </label>
      <label>Since (ISO date, optional)
        <input name="since" type="date">
      </label>
      <label>Until (ISO date, optional)
        <input name="until" type="date">
      </label>
      <label>Max snapshots (optional)
        <input name="max_snapshots" type="number" min="2">
      </label>
      <div class="authors-block">
        <button type="button" class="load-authors">Load authors</button>
        <select name="authors" multiple size="4" class="author-select"></select>
      </div>
      <button type="submit" class="start" disabled>Start analysis</button>
      <div class="form-error" role="alert" hidden></div>
    </form>
    <div class="progress" hidden>
      <h3>Progress</h3>
      <progress max="1" value="0"></progress>
      <div class="progress-text"></div>
    </div>
  `;

  const form = root.querySelector<HTMLFormElement>(".wizard-form")!;
  const repoInput = form.elements.namedItem("repo") as HTMLInputElement;
  const branchInput = form.elements.namedItem("branch") as HTMLInputElement;
  const submit = form.querySelector<HTMLButtonElement>(".start")!;
  const errorBox = form.querySelector<HTMLDivElement>(".form-error")!;
  const authorSelect = form.querySelector<HTMLSelectElement>(".author-select")!;

  const refreshSubmit = () => {
    submit.disabled = !(repoInput.value.trim() && branchInput.value.trim());
  };
  repoInput.addEventListener("input", refreshSubmit);
  branchInput.addEventListener("input", refreshSubmit);

  form.querySelector<HTMLButtonElement>(".load-authors")!.addEventListener(
    "click",
    async () => {
      errorBox.hidden = true;
      try {
        const preview = await api.enumerate(repoInput.value.trim(), branchInput.value.trim());
        authorSelect.innerHTML = "";
        for (const author of preview.authors) {
          const option = document.createElement("option");
          option.value = author.email;
          option.textContent = `${author.name} <${author.email}>`;
          authorSelect.appendChild(option);
        }
      } catch (err) {
        showError(errorBox, err);
      }
    },
  );

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    errorBox.hidden = true;
    const data = new FormData(form);
    const config: RunConfigRequest = {
      repo: String(data.get("repo")).trim(),
      branch: String(data.get("branch")).trim(),
    };
    const since = String(data.get("since") ?? "");
    const until = String(data.get("until") ?? "");
    if (since) config.since = Math.floor(Date.parse(`${since}T00:00:00Z`) / 1000);
    if (until) config.until = Math.floor(Date.parse(`${until}T23:59:59Z`) / 1000);
    const maxSnapshots = String(data.get("max_snapshots") ?? "");
    if (maxSnapshots) config.max_snapshots = Number(maxSnapshots);
    const selected = Array.from(authorSelect.selectedOptions).map((o) => o.value);
    if (selected.length) config.authors = selected;

    try {
      const created = await api.startRun(config);
      pollProgress(api, root, created.run_id, callbacks);
    } catch (err) {
      showError(errorBox, err); // form state stays as typed
    }
  });

  return root;
}

function showError(box: HTMLElement, err: unknown): void {
  if (err instanceof ApiError) {
    box.textContent = `${err.code}: ${err.message}`;
  } else {
    box.textContent = String(err);
  }
  box.hidden = false;
}

function pollProgress(
  api: ApiClient,
  root: HTMLElement,
  runId: string,
  callbacks: WizardCallbacks,
): void {
  const panel = root.querySelector<HTMLDivElement>(".progress")!;
  const bar = panel.querySelector("progress")!;
  const text = panel.querySelector<HTMLDivElement>(".progress-text")!;
  panel.hidden = false;

  let interval = POLL_BASE_MS;
  let lastDone = -1;

  const tick = async () => {
    let detail;
    try {
      detail = await api.runDetail(runId);
    } catch (err) {
      text.textContent = String(err);
      return;
    }
    const { done, failed, total, phase } = detail.progress;
    bar.max = Math.max(total, 1);
    bar.value = done + failed;
    text.textContent = `${phase}: ${done} done, ${failed} failed of ${total}`;
    if (detail.error) {
      text.textContent = `failed: ${detail.error}`;
      return;
    }
    if (phase === "complete") {
      callbacks.onComplete(runId);
      return;
    }
    if (done + failed === lastDone) {
      interval = Math.min(interval * POLL_BACKOFF, POLL_MAX_MS); // idle backoff
    } else {
      interval = POLL_BASE_MS;
      lastDone = done + failed;
    }
    window.setTimeout(tick, interval);
  };
  window.setTimeout(tick, interval);
}
