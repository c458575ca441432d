// Pure render model. buildView(catalog, state) returns plain data describing
// what the tree shows; the DOM layer just materializes it. Same inputs, same
// output, so replaying a state sequence reproduces the same structure.

import type { Catalog, TopicNode } from "./types";
import type { ViewState } from "./state";

export interface VisibleTopic {
  id: string;
  level: number;
  size: number;
  words: string[];
  expanded: boolean;
  hasChildren: boolean;
  highlighted: boolean;
  selected: boolean;
  children: VisibleTopic[];
}

export interface ViewModel {
  roots: VisibleTopic[];
  highlights: ReadonlySet<string>;
}

/**
 * Topic ids whose word list matches the query, case-insensitive, against
 * both the raw token (word_vector) and the display form (word-vector).
 * An empty or blank query matches nothing.
 */
export function searchMatches(catalog: Catalog, query: string): Set<string> {
  const needle = query.trim().toLowerCase();
  const matches = new Set<string>();
  if (!needle) return matches;
  for (const [id, node] of catalog.byId) {
    const hit = node.words.some(
      (w) =>
        w.token.toLowerCase().includes(needle) ||
        w.display.toLowerCase().includes(needle),
    );
    if (hit) matches.add(id);
  }
  return matches;
}

export function ancestorsOf(catalog: Catalog, id: string): string[] {
  const chain: string[] = [];
  let here = catalog.parentOf.get(id) ?? null;
  while (here !== null) {
    chain.push(here);
    here = catalog.parentOf.get(here) ?? null;
  }
  return chain;
}

/** Expansion set in effect: the stored set plus ancestors of search matches. */
export function effectiveExpansion(
  catalog: Catalog,
  state: ViewState,
  matches: ReadonlySet<string>,
): Set<string> {
  const expanded = new Set(state.expanded);
  for (const id of matches) {
    for (const ancestor of ancestorsOf(catalog, id)) expanded.add(ancestor);
  }
  return expanded;
}

function collectAtLevel(nodes: TopicNode[], level: number, out: TopicNode[]): void {
  for (const node of nodes) {
    if (node.level === level) {
      out.push(node);
    } else if (node.level > level) {
      collectAtLevel(node.children, level, out);
    }
  }
}

export function buildView(catalog: Catalog, state: ViewState): ViewModel {
  const matches = searchMatches(catalog, state.query);
  const expanded = effectiveExpansion(catalog, state, matches);

  const build = (node: TopicNode): VisibleTopic => {
    const isOpen = expanded.has(node.id);
    const children =
      isOpen && node.level - 1 >= state.lo
        ? node.children.map(build)
        : [];
    return {
      id: node.id,
      level: node.level,
      size: node.size,
      words: node.words.map((w) => w.display),
      expanded: isOpen,
      hasChildren: node.children.length > 0 && node.level - 1 >= state.lo,
      highlighted: matches.has(node.id),
      selected: state.selected === node.id,
      children,
    };
  };

  const roots: TopicNode[] = [];
  collectAtLevel(catalog.file.topics, state.hi, roots);
  return { roots: roots.map(build), highlights: matches };
}

/** Preorder flattening, handy for tests and keyboard navigation. */
export function flatten(model: ViewModel): VisibleTopic[] {
  const out: VisibleTopic[] = [];
  const walk = (node: VisibleTopic) => {
    out.push(node);
    node.children.forEach(walk);
  };
  model.roots.forEach(walk);
  return out;
}
