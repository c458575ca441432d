// Shapes of catalog.json and topics/<id>.json as emitted by the pipeline.
// Field meanings are documented in docs/schema.md at the repository root.

export interface TopicWord {
  token: string;
  display: string;
  mi: number;
}

export interface TopicNode {
  id: string;
  level: number;
  size: number;
  n_docs: number;
  trend: number;
  trend_degenerate: boolean;
  proportion_trend: number;
  words: TopicWord[];
  children: TopicNode[];
}

export interface DocumentEntry {
  title: string;
  year: number;
}

export interface CatalogFile {
  format: string;
  version: number;
  metadata: {
    corpus_name: string;
    n_docs: number;
    vocab_size: number;
    created: string;
    seed: number;
    config: Record<string, unknown>;
  };
  levels: Record<string, number>;
  topics: TopicNode[];
  documents: Record<string, DocumentEntry>;
}

export interface TopicMember {
  id: string;
  posterior: number;
}

export interface TopicFile {
  id: string;
  documents: TopicMember[];
  yearly_counts: Record<string, number>;
  yearly_proportions: Record<string, number>;
  trend: number;
  trend_degenerate: boolean;
  proportion_trend: number;
}

/** catalog.json plus the lookup structure the view needs. */
export interface Catalog {
  file: CatalogFile;
  byId: Map<string, TopicNode>;
  parentOf: Map<string, string | null>;
  maxLevel: number;
}
