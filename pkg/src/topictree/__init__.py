"""Hierarchical topic detection for document collections.

The pipeline turns raw text into a browsable topic catalog in three stages:
prepare (tokenize, select an n-gram vocabulary, binarize), learn (fit a
latent tree model level by level), and extract (characterize each latent as
a topic, assign documents, estimate trends, export JSON).
"""

from .catalog import (
    Catalog,
    PipelineError,
    build_catalog,
    display_token,
    export_catalog,
    load_catalog,
    run_pipeline,
)
from .corpus import CorpusError, Document, load_corpus, load_stopwords, normalize_text
from .hlta import Island, LearnConfig, build_islands, hard_assign, learn, link_islands, unidimensionality_test
from .ltm import LatentTreeModel, ModelFormatError, mutual_information
from .topics import TopicNode, TrendResult, assign_documents, build_topics, extract_hierarchy, trend
from .vocab import BinaryDataset, Vocabulary, binarize, compute_stats, filter_high_df, find_ngrams, tfidf

__version__ = "0.1.0"

__all__ = [
    "BinaryDataset",
    "Catalog",
    "CorpusError",
    "Document",
    "Island",
    "LatentTreeModel",
    "LearnConfig",
    "ModelFormatError",
    "PipelineError",
    "TopicNode",
    "TrendResult",
    "__version__",
    "assign_documents",
    "binarize",
    "build_catalog",
    "build_islands",
    "build_topics",
    "compute_stats",
    "display_token",
    "export_catalog",
    "extract_hierarchy",
    "filter_high_df",
    "find_ngrams",
    "hard_assign",
    "learn",
    "link_islands",
    "load_catalog",
    "load_corpus",
    "load_stopwords",
    "mutual_information",
    "normalize_text",
    "run_pipeline",
    "tfidf",
    "trend",
    "unidimensionality_test",
]
