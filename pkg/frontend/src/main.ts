// Application wiring: load the catalog, keep ViewState in the URL hash, and
// re-render on every transition. Per-topic files are fetched on click with
// stale responses discarded, so fast clicking cannot show the wrong panel.

import { CatalogFormatError, DataLayer, type FetchJson } from "./data";
import {
  clampRange,
  decodeHash,
  defaultState,
  encodeHash,
  toggleExpanded,
  withQuery,
  withSelection,
  type ViewState,
} from "./state";
import { buildView } from "./view";
import { renderBanner, renderPanel, renderTree, type PanelContent } from "./dom";
import type { Catalog } from "./types";

const httpJson = async (url: string): Promise<unknown> => {
  const response = await fetch(url);
  if (!response.ok) throw new Error(`${response.status} ${response.statusText}`);
  return response.json();
};

export async function start(
  root: Document = document,
  fetchJson: FetchJson = httpJson,
): Promise<void> {
  const banner = root.getElementById("banner") as HTMLElement;
  const tree = root.getElementById("tree") as HTMLElement;
  const panel = root.getElementById("panel") as HTMLElement;
  const search = root.getElementById("search") as HTMLInputElement;
  const loInput = root.getElementById("level-lo") as HTMLInputElement;
  const hiInput = root.getElementById("level-hi") as HTMLInputElement;

  const data = new DataLayer(fetchJson, "catalog");
  let catalog: Catalog;
  try {
    catalog = await data.loadCatalog();
  } catch (error) {
    const reason =
      error instanceof CatalogFormatError
        ? `Malformed catalog: ${error.message}`
        : `Could not load catalog.json: ${String(error)}`;
    renderBanner(banner, reason);
    return;
  }
  renderBanner(banner, null);

  let state: ViewState = decodeHash(location.hash, catalog);
  let panelContent: PanelContent = { kind: "empty" };

  const render = () => {
    renderTree(tree, buildView(catalog, state), {
      onToggle: (id) => transition(toggleExpanded(state, id)),
      onSelect: (id) => select(id),
    });
    renderPanel(panel, panelContent, catalog);
    search.value = state.query;
    loInput.value = String(state.lo);
    hiInput.value = String(state.hi);
  };

  const transition = (next: ViewState) => {
    state = clampRange(next, catalog);
    history.replaceState(null, "", encodeHash(state));
    render();
  };

  const select = (id: string) => {
    transition(withSelection(state, id));
    panelContent = { kind: "loading", id };
    render();
    void data.selectTopic(id).then(
      (body) => {
        if (body === null) return; // a newer click won
        panelContent = { kind: "topic", body };
        render();
      },
      (error: unknown) => {
        panelContent = { kind: "error", id, message: String(error) };
        render();
      },
    );
  };

  search.addEventListener("input", () => transition(withQuery(state, search.value)));
  loInput.addEventListener("change", () =>
    transition({ ...state, lo: Number(loInput.value) }),
  );
  hiInput.addEventListener("change", () =>
    transition({ ...state, hi: Number(hiInput.value) }),
  );
  window.addEventListener("hashchange", () => {
    state = decodeHash(location.hash, catalog);
    render();
  });

  const restored = state.selected;
  render();
  if (restored) select(restored);
}

if (typeof window !== "undefined" && document.getElementById("tree")) {
  void start();
}
