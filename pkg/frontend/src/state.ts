// ViewState and its URL-hash encoding. State is immutable; every transition
// returns a fresh object so the view stays a pure function of (catalog, state).

import type { Catalog } from "./types";

export interface ViewState {
  expanded: ReadonlySet<string>;
  lo: number;
  hi: number;
  query: string;
  selected: string | null;
}

/** Top two levels visible: full level range, top-level topics expanded. */
export function defaultState(catalog: Catalog): ViewState {
  const top = catalog.file.topics.map((t) => t.id);
  return {
    expanded: new Set(top),
    lo: 1,
    hi: catalog.maxLevel,
    query: "",
    selected: null,
  };
}

export function clampRange(state: ViewState, catalog: Catalog): ViewState {
  let lo = Math.round(state.lo);
  let hi = Math.round(state.hi);
  if (!Number.isFinite(lo)) lo = 1;
  if (!Number.isFinite(hi)) hi = catalog.maxLevel;
  lo = Math.min(Math.max(lo, 1), catalog.maxLevel);
  hi = Math.min(Math.max(hi, lo), catalog.maxLevel);
  if (lo === state.lo && hi === state.hi) return state;
  return { ...state, lo, hi };
}

export function toggleExpanded(state: ViewState, id: string): ViewState {
  const expanded = new Set(state.expanded);
  if (expanded.has(id)) {
    expanded.delete(id);
  } else {
    expanded.add(id);
  }
  return { ...state, expanded };
}

export function withQuery(state: ViewState, query: string): ViewState {
  return { ...state, query };
}

export function withSelection(state: ViewState, selected: string | null): ViewState {
  return { ...state, selected };
}

export function collapseAll(state: ViewState): ViewState {
  return { ...state, expanded: new Set() };
}

export function encodeHash(state: ViewState): string {
  const params = new URLSearchParams();
  params.set("lo", String(state.lo));
  params.set("hi", String(state.hi));
  if (state.query) params.set("q", state.query);
  if (state.selected) params.set("sel", state.selected);
  // always present so a collapsed-everything view survives the round trip
  params.set("open", [...state.expanded].sort().join(","));
  return "#" + params.toString();
}

export function decodeHash(hash: string, catalog: Catalog): ViewState {
  const base = defaultState(catalog);
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  if (!raw) return base;
  const params = new URLSearchParams(raw);
  const expanded = params.has("open")
    ? new Set(
        (params.get("open") ?? "")
          .split(",")
          .filter((id) => catalog.byId.has(id)),
      )
    : base.expanded;
  const selected = params.get("sel");
  const state: ViewState = {
    expanded,
    lo: Number(params.get("lo") ?? base.lo),
    hi: Number(params.get("hi") ?? base.hi),
    query: params.get("q") ?? "",
    selected: selected && catalog.byId.has(selected) ? selected : null,
  };
  return clampRange(state, catalog);
}
