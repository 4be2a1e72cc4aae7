// UI wiring: one textarea, one key selector, one ranked table.
//
// The view is a faithful rendering of the last successful RankResponse:
// rows are never reordered, filtered, or renamed client-side.  A
// monotonically increasing request token makes sure a slow response can
// never overwrite a newer one.

import { ApiError, RankResponse, fetchKeys, rankMenu } from "./api.js";

export type Status = "idle" | "loading" | "error";

export interface UiState {
  selectedKey: string | null;
  keys: string[];
  lastResponse: RankResponse | null;
  status: Status;
  errorMessage: string | null;
}

export interface App {
  state: UiState;
  menuInput: HTMLTextAreaElement;
  keySelect: HTMLSelectElement;
  submitButton: HTMLButtonElement;
  resultsBody: HTMLTableSectionElement;
  errorBanner: HTMLDivElement;
  retryButton: HTMLButtonElement;
  loadKeys(): Promise<void>;
  submit(): Promise<void>;
}

export function createApp(root: HTMLElement, baseUrl: string): App {
  root.innerHTML = `
    <h1>dishrank</h1>
    <p class="tagline">Paste a menu, pick a nutritional search key, get the dishes ranked.</p>
    <div class="error-banner" id="error-banner" hidden>
      <span id="error-text"></span>
      <button id="retry-keys" type="button" hidden>retry</button>
    </div>
    <label for="menu-input">Menu (one dish per line, # for comments)</label>
    <textarea id="menu-input" rows="10" spellcheck="false"
      placeholder="green tea&#10;fried chicken&#10;caesar salad"></textarea>
    <div class="controls">
      <label for="key-select">Search key</label>
      <select id="key-select" disabled></select>
      <button id="submit" type="button" disabled>Rank dishes</button>
      <span id="status" role="status"></span>
    </div>
    <table class="results" id="results" hidden>
      <thead><tr><th>rank</th><th>dish</th><th>score</th><th></th></tr></thead>
      <tbody id="results-body"></tbody>
    </table>
  `;

  const app: App = {
    state: { selectedKey: null, keys: [], lastResponse: null, status: "idle", errorMessage: null },
    menuInput: root.querySelector("#menu-input") as HTMLTextAreaElement,
    keySelect: root.querySelector("#key-select") as HTMLSelectElement,
    submitButton: root.querySelector("#submit") as HTMLButtonElement,
    resultsBody: root.querySelector("#results-body") as HTMLTableSectionElement,
    errorBanner: root.querySelector("#error-banner") as HTMLDivElement,
    retryButton: root.querySelector("#retry-keys") as HTMLButtonElement,
    loadKeys,
    submit,
  };
  const resultsTable = root.querySelector("#results") as HTMLTableElement;
  const statusLabel = root.querySelector("#status") as HTMLSpanElement;
  const errorText = root.querySelector("#error-text") as HTMLSpanElement;
  let requestToken = 0;

  function menuIsEmpty(): boolean {
    return app.menuInput.value.trim().length === 0;
  }

  function refreshControls(): void {
    app.submitButton.disabled =
      menuIsEmpty() || app.state.selectedKey === null || app.state.status === "loading";
    statusLabel.textContent = app.state.status === "loading" ? "ranking…" : "";
  }

  function showError(message: string, withRetry = false): void {
    app.state.status = "error";
    app.state.errorMessage = message;
    errorText.textContent = message;
    app.errorBanner.hidden = false;
    app.retryButton.hidden = !withRetry;
  }

  function clearError(): void {
    app.state.errorMessage = null;
    app.errorBanner.hidden = true;
    app.retryButton.hidden = true;
  }

  function render(response: RankResponse): void {
    app.state.lastResponse = response;
    const scores = response.results.map((entry) => entry.score);
    const top = Math.max(...scores);
    const bottom = Math.min(...scores);
    const span = top - bottom || 1;
    app.resultsBody.replaceChildren(
      ...response.results.map((entry) => {
        const row = document.createElement("tr");
        const bar = Math.round(((entry.score - bottom) / span) * 100);
        row.innerHTML =
          `<td>${entry.rank}</td>` +
          `<td class="dish"></td>` +
          `<td class="score">${entry.score.toFixed(4)}</td>` +
          `<td class="bar-cell"><div class="bar" style="width:${bar}%"></div></td>`;
        (row.querySelector(".dish") as HTMLTableCellElement).textContent = entry.dish;
        return row;
      })
    );
    resultsTable.hidden = false;
  }

  async function loadKeys(): Promise<void> {
    clearError();
    try {
      const keys = await fetchKeys(baseUrl);
      app.state.keys = keys;
      app.keySelect.replaceChildren(
        ...keys.map((key) => {
          const option = document.createElement("option");
          option.value = key;
          option.textContent = key;
          return option;
        })
      );
      app.state.selectedKey = keys[0];
      app.keySelect.value = keys[0];
      app.keySelect.disabled = false;
      app.state.status = "idle";
    } catch (err) {
      showError(`cannot reach the ranking service: ${(err as Error).message}`, true);
    }
    refreshControls();
  }

  async function submit(): Promise<void> {
    if (menuIsEmpty() || app.state.selectedKey === null) return;
    const token = ++requestToken;
    app.state.status = "loading";
    clearError();
    refreshControls();
    try {
      const response = await rankMenu(baseUrl, app.menuInput.value, app.state.selectedKey);
      if (token !== requestToken) return; // a newer request superseded this one
      app.state.status = "idle";
      render(response);
    } catch (err) {
      if (token !== requestToken) return;
      // keep the previous ranking on screen; the failure is recoverable
      const detail = err instanceof ApiError ? err.message : `network error: ${(err as Error).message}`;
      showError(detail);
    }
    refreshControls();
  }

  app.menuInput.addEventListener("input", refreshControls);
  app.keySelect.addEventListener("change", () => {
    app.state.selectedKey = app.keySelect.value;
    // switching keys re-queries with the menu text untouched
    if (!menuIsEmpty() && app.state.lastResponse !== null) void submit();
  });
  app.submitButton.addEventListener("click", () => void submit());
  app.retryButton.addEventListener("click", () => void loadKeys());

  refreshControls();
  return app;
}
