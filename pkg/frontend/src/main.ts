import { ApiClient, ApiError } from "./api.js";
import { debounce } from "./debounce.js";
import { LatestWins } from "./state.js";
import {
  renderAnomalies,
  renderBanner,
  renderExplain,
  renderNotFound,
  renderParseError,
  renderParsedEcho,
  renderResults,
} from "./views.js";

const DEBOUNCE_MS = 300;
const PAGE_SIZE = 20;

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function start(): void {
  const api = new ApiClient("");
  const searchGate = new LatestWins();
  const anomalyGate = new LatestWins();
  const explainGate = new LatestWins();

  const queryInput = byId<HTMLInputElement>("query");
  const modeSelect = byId<HTMLSelectElement>("mode");
  const echo = byId<HTMLElement>("echo");
  const results = byId<HTMLElement>("results");
  const explainPanel = byId<HTMLElement>("explain-panel");
  const anomalyPanel = byId<HTMLElement>("anomalies");
  const anomalyK = byId<HTMLInputElement>("anomaly-k");

  const runSearch = async () => {
    const text = queryInput.value;
    if (text.trim() === "") {
      echo.textContent = "";
      results.textContent = "";
      return;
    }
    const mode = modeSelect.value === "strict" ? "strict" : "ranked";
    try {
      const response = await searchGate.run((signal) => api.search(text, PAGE_SIZE, mode, signal));
      if (response === null) return; // superseded
      renderParsedEcho(echo, response.parsed);
      renderResults(results, response, api, (imageId) => void showExplain(imageId, text));
    } catch (err) {
      echo.textContent = "";
      if (err instanceof ApiError && err.kind === "parse_error") {
        renderParseError(results, text, err.message, err.position ?? 0);
      } else if (err instanceof ApiError && err.kind === "query_too_large") {
        renderParseError(results, text, err.message, 0);
      } else {
        renderBanner(results, err instanceof Error ? err.message : String(err), () => void runSearch());
      }
    }
  };

  const showExplain = async (imageId: string, queryText: string) => {
    try {
      const payload = await explainGate.run(async (signal) => {
        const result = await api.explain(imageId, queryText, signal);
        const graph = await api.imageGraph(imageId, signal);
        return { result, graph };
      });
      if (payload === null) return;
      renderExplain(explainPanel, payload.result, payload.graph);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        renderNotFound(explainPanel, imageId);
      } else {
        renderBanner(explainPanel, err instanceof Error ? err.message : String(err), () => void showExplain(imageId, queryText));
      }
    }
  };

  const runAnomalies = async () => {
    const k = Math.max(1, Number(anomalyK.value) || PAGE_SIZE);
    try {
      const response = await anomalyGate.run((signal) => api.anomalies(k, signal));
      if (response === null) return;
      renderAnomalies(anomalyPanel, response.reports);
    } catch (err) {
      renderBanner(anomalyPanel, err instanceof Error ? err.message : String(err), () => void runAnomalies());
    }
  };

  const debouncedSearch = debounce(() => void runSearch(), DEBOUNCE_MS);
  queryInput.addEventListener("input", debouncedSearch);
  modeSelect.addEventListener("change", () => void runSearch());
  anomalyK.addEventListener("change", () => void runAnomalies());
  byId<HTMLButtonElement>("refresh-anomalies").addEventListener("click", () => void runAnomalies());

  void runAnomalies();
}

// wire up only in a real page, never during import from tests
if (typeof document !== "undefined" && document.getElementById("query")) {
  start();
}
