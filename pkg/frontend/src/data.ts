// Data layer: fetch, validate, index. Values from the JSON files are passed
// through untouched; nothing here rounds, scales, or recomputes a number the
// pipeline already produced.

import type { Catalog, CatalogFile, TopicFile, TopicNode } from "./types";

export class CatalogFormatError extends Error {}

export type FetchJson = (url: string) => Promise<unknown>;

const FORMAT = "topictree-catalog";
const VERSION = 1;

function fail(path: string, expected: string): never {
  throw new CatalogFormatError(`${path}: expected ${expected}`);
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function checkString(value: unknown, path: string): string {
  if (typeof value !== "string") fail(path, "a string");
  return value;
}

function checkNumber(value: unknown, path: string): number {
  if (typeof value !== "number" || Number.isNaN(value)) fail(path, "a number");
  return value;
}

function checkBoolean(value: unknown, path: string): boolean {
  if (typeof value !== "boolean") fail(path, "a boolean");
  return value;
}

function checkTopicNode(value: unknown, path: string): TopicNode {
  if (!isRecord(value)) fail(path, "a topic object");
  const words = value.words;
  if (!Array.isArray(words)) fail(`${path}.words`, "an array");
  words.forEach((word, i) => {
    if (!isRecord(word)) fail(`${path}.words[${i}]`, "a word object");
    checkString(word.token, `${path}.words[${i}].token`);
    checkString(word.display, `${path}.words[${i}].display`);
    checkNumber(word.mi, `${path}.words[${i}].mi`);
  });
  const children = value.children;
  if (!Array.isArray(children)) fail(`${path}.children`, "an array");
  return {
    id: checkString(value.id, `${path}.id`),
    level: checkNumber(value.level, `${path}.level`),
    size: checkNumber(value.size, `${path}.size`),
    n_docs: checkNumber(value.n_docs, `${path}.n_docs`),
    trend: checkNumber(value.trend, `${path}.trend`),
    trend_degenerate: checkBoolean(value.trend_degenerate, `${path}.trend_degenerate`),
    proportion_trend: checkNumber(value.proportion_trend, `${path}.proportion_trend`),
    words: words as TopicNode["words"],
    children: children.map((child, i) => checkTopicNode(child, `${path}.children[${i}]`)),
  };
}

export function parseCatalog(payload: unknown): CatalogFile {
  if (!isRecord(payload)) fail("catalog", "an object");
  if (payload.format !== FORMAT) fail("format", `"${FORMAT}"`);
  if (payload.version !== VERSION) fail("version", String(VERSION));
  const metadata = payload.metadata;
  if (!isRecord(metadata)) fail("metadata", "an object");
  checkString(metadata.corpus_name, "metadata.corpus_name");
  checkNumber(metadata.n_docs, "metadata.n_docs");
  checkNumber(metadata.vocab_size, "metadata.vocab_size");
  checkString(metadata.created, "metadata.created");
  if (!isRecord(metadata.config)) fail("metadata.config", "an object");
  if (!isRecord(payload.levels)) fail("levels", "an object");
  if (!Array.isArray(payload.topics)) fail("topics", "an array");
  const topics = payload.topics.map((topic, i) => checkTopicNode(topic, `topics[${i}]`));
  const documents = payload.documents;
  if (!isRecord(documents)) fail("documents", "an object");
  for (const [id, entry] of Object.entries(documents)) {
    if (!isRecord(entry)) fail(`documents.${id}`, "an object");
    checkString(entry.title, `documents.${id}.title`);
    checkNumber(entry.year, `documents.${id}.year`);
  }
  return {
    format: FORMAT,
    version: VERSION,
    metadata: metadata as CatalogFile["metadata"],
    levels: payload.levels as CatalogFile["levels"],
    topics,
    documents: documents as CatalogFile["documents"],
  };
}

export function parseTopicFile(payload: unknown, id: string): TopicFile {
  if (!isRecord(payload)) fail(`topic ${id}`, "an object");
  if (payload.id !== id) fail(`topic ${id}.id`, `"${id}"`);
  if (!Array.isArray(payload.documents)) fail(`topic ${id}.documents`, "an array");
  payload.documents.forEach((member, i) => {
    if (!isRecord(member)) fail(`topic ${id}.documents[${i}]`, "an object");
    checkString(member.id, `topic ${id}.documents[${i}].id`);
    checkNumber(member.posterior, `topic ${id}.documents[${i}].posterior`);
  });
  if (!isRecord(payload.yearly_counts)) fail(`topic ${id}.yearly_counts`, "an object");
  if (!isRecord(payload.yearly_proportions)) fail(`topic ${id}.yearly_proportions`, "an object");
  checkNumber(payload.trend, `topic ${id}.trend`);
  checkBoolean(payload.trend_degenerate, `topic ${id}.trend_degenerate`);
  checkNumber(payload.proportion_trend, `topic ${id}.proportion_trend`);
  return payload as unknown as TopicFile;
}

export function indexCatalog(file: CatalogFile): Catalog {
  const byId = new Map<string, TopicNode>();
  const parentOf = new Map<string, string | null>();
  let maxLevel = 0;
  const visit = (node: TopicNode, parent: string | null) => {
    if (byId.has(node.id)) fail(`topics.${node.id}`, "a unique topic id");
    byId.set(node.id, node);
    parentOf.set(node.id, parent);
    maxLevel = Math.max(maxLevel, node.level);
    for (const child of node.children) visit(child, node.id);
  };
  for (const root of file.topics) visit(root, null);
  if (maxLevel < 1) fail("topics", "at least one topic");
  return { file, byId, parentOf, maxLevel };
}

/**
 * Fetches catalog files. Per-topic files are fetched lazily, at most once
 * each; selectTopic() discards stale responses so the latest request wins.
 */
export class DataLayer {
  private readonly fetchJson: FetchJson;
  private readonly baseUrl: string;
  private readonly topicCache = new Map<string, Promise<TopicFile>>();
  private requestSerial = 0;

  constructor(fetchJson: FetchJson, baseUrl = ".") {
    this.fetchJson = fetchJson;
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  async loadCatalog(): Promise<Catalog> {
    const payload = await this.fetchJson(`${this.baseUrl}/catalog.json`);
    return indexCatalog(parseCatalog(payload));
  }

  topic(id: string): Promise<TopicFile> {
    let pending = this.topicCache.get(id);
    if (!pending) {
      pending = this.fetchJson(`${this.baseUrl}/topics/${id}.json`).then((payload) =>
        parseTopicFile(payload, id),
      );
      // a failed fetch must stay retryable on the next click
      pending.catch(() => this.topicCache.delete(id));
      this.topicCache.set(id, pending);
    }
    return pending;
  }

  /**
   * Resolves with the topic file, or null when a newer selectTopic call was
   * made before this one finished.
   */
  async selectTopic(id: string): Promise<TopicFile | null> {
    const serial = ++this.requestSerial;
    const body = await this.topic(id);
    return serial === this.requestSerial ? body : null;
  }
}
