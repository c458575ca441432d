// DOM materialization of the view model and the document panel. Numbers are
// rendered with String(...) straight off the parsed JSON; bar widths are
// presentation geometry only.

import type { Catalog, TopicFile } from "./types";
import type { ViewModel, VisibleTopic } from "./view";

export interface TreeHandlers {
  onToggle: (id: string) => void;
  onSelect: (id: string) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderTopic(topic: VisibleTopic, handlers: TreeHandlers): HTMLLIElement {
  const item = el("li", "topic");
  item.dataset.id = topic.id;

  const row = el("div", "topic-row");
  if (topic.highlighted) row.classList.add("highlight");
  if (topic.selected) row.classList.add("selected");

  const toggle = el("button", "toggle", topic.hasChildren ? (topic.expanded ? "▾" : "▸") : "·");
  toggle.disabled = !topic.hasChildren;
  toggle.addEventListener("click", (event) => {
    event.stopPropagation();
    handlers.onToggle(topic.id);
  });
  row.appendChild(toggle);

  const label = el("span", "words", topic.words.join(" "));
  row.appendChild(label);
  row.appendChild(el("span", "size", String(topic.size)));
  row.addEventListener("click", () => handlers.onSelect(topic.id));
  item.appendChild(row);

  if (topic.children.length) {
    const list = el("ul", "children");
    for (const child of topic.children) list.appendChild(renderTopic(child, handlers));
    item.appendChild(list);
  }
  return item;
}

export function renderTree(
  container: HTMLElement,
  model: ViewModel,
  handlers: TreeHandlers,
): void {
  container.textContent = "";
  const list = el("ul", "tree");
  for (const root of model.roots) list.appendChild(renderTopic(root, handlers));
  container.appendChild(list);
}

export type PanelContent =
  | { kind: "empty" }
  | { kind: "loading"; id: string }
  | { kind: "error"; id: string; message: string }
  | { kind: "topic"; body: TopicFile };

export function renderPanel(
  container: HTMLElement,
  content: PanelContent,
  catalog: Catalog,
): void {
  container.textContent = "";
  if (content.kind === "empty") return;
  if (content.kind === "loading") {
    container.appendChild(el("p", "panel-loading", `Loading ${content.id}…`));
    return;
  }
  if (content.kind === "error") {
    container.appendChild(
      el("p", "panel-error", `Could not load ${content.id}: ${content.message}`),
    );
    return;
  }

  const body = content.body;
  container.appendChild(el("h2", "panel-title", body.id));
  const trendLine = body.trend_degenerate
    ? "trend: n/a (all or no documents are members)"
    : `trend: ${String(body.trend)}`;
  container.appendChild(el("p", "trend", trendLine));

  if (!body.documents.length) {
    container.appendChild(el("p", "no-documents", "no documents"));
    return;
  }

  const docs = el("ol", "documents");
  for (const member of body.documents) {
    const entry = catalog.file.documents[member.id];
    const title = entry ? entry.title : member.id;
    const year = entry ? String(entry.year) : "?";
    const row = el("li", "document");
    row.appendChild(el("span", "doc-title", title));
    row.appendChild(el("span", "doc-year", year));
    row.appendChild(el("span", "doc-posterior", String(member.posterior)));
    docs.appendChild(row);
  }
  container.appendChild(docs);

  const table = el("table", "yearly");
  const head = el("tr");
  head.appendChild(el("th", undefined, "year"));
  head.appendChild(el("th", undefined, "documents"));
  table.appendChild(head);
  for (const [year, count] of Object.entries(body.yearly_counts)) {
    const row = el("tr");
    row.appendChild(el("td", "year", year));
    row.appendChild(el("td", "count", String(count)));
    table.appendChild(row);
  }
  container.appendChild(table);

  const chart = el("div", "proportions");
  const values = Object.values(body.yearly_proportions);
  const peak = values.length ? Math.max(...values) : 0;
  for (const [year, value] of Object.entries(body.yearly_proportions)) {
    const line = el("div", "bar-line");
    line.appendChild(el("span", "bar-year", year));
    const bar = el("div", "bar");
    bar.style.width = peak > 0 ? `${(value / peak) * 100}%` : "0%";
    line.appendChild(bar);
    line.appendChild(el("span", "bar-value", String(value)));
    chart.appendChild(line);
  }
  container.appendChild(chart);
}

export function renderBanner(container: HTMLElement, message: string | null): void {
  container.textContent = "";
  if (message === null) return;
  container.appendChild(el("div", "banner-error", message));
}
