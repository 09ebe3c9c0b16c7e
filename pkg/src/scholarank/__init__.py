"""Time-weighted PageRank with venue/author ensembles for ranking scholarly articles."""

from .ensembles import EnsembleWeights, fuse, rank_articles, scale_to_common_mean
from .evaluation import JudgedPair, pairwise_accuracy, run_ablation
from .graph import ArticleRecord, Dataset, build_citation_graph, build_venue_graph, ingest_dataset
from .linking import LinkingThresholds, jaro_similarity, link_venue, normalize_venue_name
from .ranking import RankingParams, RankingVector, classical_pagerank, impact_weight, time_weighted_pagerank

__version__ = "0.1.0"

__all__ = [
    "ArticleRecord", "Dataset", "EnsembleWeights", "JudgedPair", "LinkingThresholds",
    "RankingParams", "RankingVector", "build_citation_graph", "build_venue_graph",
    "classical_pagerank", "fuse", "impact_weight", "ingest_dataset", "jaro_similarity",
    "link_venue", "normalize_venue_name", "pairwise_accuracy", "rank_articles",
    "run_ablation", "scale_to_common_mean", "time_weighted_pagerank",
]
