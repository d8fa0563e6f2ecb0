import { schematicCanvas } from "./schematic.js";
import type {
  ConstraintJson,
  MatchResultJson,
  QueryGraphJson,
  SceneGraphJson,
  SearchResponseJson,
  TypicalityReportJson,
} from "./types.js";

/** What result cards need to show a thumbnail without owning the client. */
export interface ThumbnailSource {
  imageFileUrl(imageId: string): string;
  imageGraph(imageId: string): Promise<SceneGraphJson>;
}

function el(doc: Document, tag: string, className: string, text?: string): HTMLElement {
  const node = doc.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function clear(container: HTMLElement): void {
  container.textContent = "";
}

// every number shown comes straight off the wire; this only formats
function fmt(value: unknown): string {
  if (typeof value === "number") {
    return Number.isInteger(value) ? String(value) : value.toFixed(3);
  }
  if (Array.isArray(value)) return value.map(fmt).join("/");
  return String(value);
}

function badge(doc: Document, c: ConstraintJson, ok: boolean): HTMLElement {
  const node = el(doc, "span", ok ? "badge ok" : "badge bad", `${c.description} ${ok ? "✓" : "✗"}`);
  node.title = c.detail ?? c.kind;
  return node;
}

function evidenceLine(doc: Document, c: ConstraintJson, ok: boolean): HTMLElement {
  const row = el(doc, "li", ok ? "constraint ok" : "constraint bad");
  row.appendChild(badge(doc, c, ok));
  if (c.evidence) {
    const pairs = Object.entries(c.evidence)
      .map(([key, value]) => `${key}=${fmt(value)}`)
      .join("  ");
    row.appendChild(el(doc, "span", "evidence", pairs));
  }
  return row;
}

/** Header over the result list: the query verbatim plus its parsed shape. */
export function renderParsedEcho(container: HTMLElement, parsed: QueryGraphJson): void {
  const doc = container.ownerDocument;
  clear(container);
  container.appendChild(el(doc, "span", "echo-query", parsed.raw_text));
  const shape = parsed.nodes
    .map((n) => [n.color, n.shape, n.size_word, n.label].filter(Boolean).join(" "))
    .join(", ");
  container.appendChild(el(doc, "span", "echo-shape", `→ ${shape || "(empty)"}`));
  for (const e of parsed.edges) {
    const from = parsed.nodes[e.from_node];
    const to = parsed.nodes[e.to_node];
    container.appendChild(
      el(doc, "span", "echo-edge", `${from?.label} ${e.predicate} ${to?.label}`),
    );
  }
}

function thumbnail(doc: Document, result: MatchResultJson, source: ThumbnailSource): HTMLElement {
  const holder = el(doc, "div", "thumb");
  const img = doc.createElement("img");
  img.src = source.imageFileUrl(result.image_id);
  img.alt = result.image_id;
  // no file on disk: fall back to the schematic box layout
  img.addEventListener("error", () => {
    void source
      .imageGraph(result.image_id)
      .then((graph) => {
        clear(holder);
        const bound = new Set(Object.values(result.binding));
        const canvas = schematicCanvas(doc, graph, 240, 160, bound);
        holder.appendChild(canvas ?? el(doc, "div", "thumb-fallback", graph.objects.map((o) => o.label).join(", ")));
      })
      .catch(() => {
        clear(holder);
        holder.appendChild(el(doc, "div", "thumb-fallback", result.image_id));
      });
  });
  holder.appendChild(img);
  return holder;
}

export function renderResults(
  container: HTMLElement,
  response: SearchResponseJson,
  source: ThumbnailSource,
  onSelect: (imageId: string) => void,
): void {
  const doc = container.ownerDocument;
  clear(container);
  if (response.results.length === 0) {
    container.appendChild(el(doc, "div", "empty-state", "no matches"));
    return;
  }
  for (const result of response.results) {
    const card = el(doc, "article", "card");
    card.dataset.imageId = result.image_id;
    card.appendChild(thumbnail(doc, result, source));

    const body = el(doc, "div", "card-body");
    const head = el(doc, "header", "card-head");
    head.appendChild(el(doc, "span", "image-id", result.image_id));
    head.appendChild(el(doc, "span", "score", `score ${result.score.toFixed(3)}`));
    body.appendChild(head);

    const badges = el(doc, "div", "badges");
    for (const c of result.satisfied) badges.appendChild(badge(doc, c, true));
    for (const c of result.violated) badges.appendChild(badge(doc, c, false));
    body.appendChild(badges);
    card.appendChild(body);

    card.addEventListener("click", () => onSelect(result.image_id));
    container.appendChild(card);
  }
}

/** Inline parse failure: the query echoed with a caret under the bad spot. */
export function renderParseError(
  container: HTMLElement,
  queryText: string,
  message: string,
  position: number,
): void {
  const doc = container.ownerDocument;
  clear(container);
  const box = el(doc, "div", "parse-error");
  const caretAt = Math.max(0, Math.min(position, queryText.length));
  const pre = el(doc, "pre", "caret-line");
  pre.textContent = `${queryText}\n${" ".repeat(caretAt)}^`;
  box.appendChild(pre);
  box.appendChild(el(doc, "div", "error-message", message));
  container.appendChild(box);
}

export function renderBanner(container: HTMLElement, message: string, onRetry: () => void): void {
  const doc = container.ownerDocument;
  clear(container);
  const banner = el(doc, "div", "banner");
  banner.appendChild(el(doc, "span", "banner-message", message));
  const retry = el(doc, "button", "retry", "retry");
  retry.addEventListener("click", onRetry);
  banner.appendChild(retry);
  container.appendChild(banner);
}

export function renderNotFound(container: HTMLElement, imageId: string): void {
  const doc = container.ownerDocument;
  clear(container);
  container.appendChild(el(doc, "div", "not-found", `no image "${imageId}" in this index`));
}

export function renderAnomalies(container: HTMLElement, reports: TypicalityReportJson[]): void {
  const doc = container.ownerDocument;
  clear(container);
  if (reports.length === 0) {
    container.appendChild(el(doc, "div", "empty-state", "nothing unusual in this corpus"));
    return;
  }
  const list = el(doc, "ol", "anomaly-list");
  for (const report of reports) {
    const row = el(doc, "li", report.anomalous ? "anomaly flagged" : "anomaly");
    const head = el(doc, "header", "anomaly-head");
    head.appendChild(el(doc, "span", "image-id", report.image_id));
    head.appendChild(el(doc, "span", "uniqueness", `uniqueness ${report.uniqueness.toFixed(3)}`));
    row.appendChild(head);
    for (const t of report.anomalous_triples) {
      row.appendChild(
        el(
          doc,
          "div",
          "triple",
          `${t.subject_label} ${t.predicate} ${t.object_label}, p≈${t.probability.toFixed(3)}`,
        ),
      );
    }
    list.appendChild(row);
  }
  container.appendChild(list);
}

/** Evidence panel for one image: constraint verdicts over the schematic. */
export function renderExplain(
  container: HTMLElement,
  result: MatchResultJson,
  graph: SceneGraphJson,
): void {
  const doc = container.ownerDocument;
  clear(container);
  const panel = el(doc, "div", "explain");
  const head = el(doc, "header", "explain-head");
  head.appendChild(el(doc, "span", "image-id", result.image_id));
  head.appendChild(el(doc, "span", "score", `score ${result.score.toFixed(3)}`));
  panel.appendChild(head);

  const bound = new Set(Object.values(result.binding));
  const canvas = schematicCanvas(doc, graph, 360, 240, bound);
  if (canvas) panel.appendChild(canvas);

  const list = el(doc, "ul", "constraints");
  for (const c of result.satisfied) list.appendChild(evidenceLine(doc, c, true));
  for (const c of result.violated) list.appendChild(evidenceLine(doc, c, false));
  panel.appendChild(list);
  container.appendChild(panel);
}
