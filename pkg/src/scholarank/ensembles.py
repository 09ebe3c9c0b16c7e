"""Per-entity ensembles and their weighted fusion into one article ranking."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .graph import ArticleTable, CitationGraph, Dataset, VenueGraph, build_citation_graph, build_venue_graph
from .ranking import (
    RankingParams,
    RankingVector,
    classical_pagerank,
    edge_weights,
    time_weighted_pagerank,
)

METHODS = ("pr", "wpr", "ewpr", "ewpr-all")
_PROVENANCE = {"pr": "pagerank", "wpr": "citation"}


@dataclass(frozen=True)
class EnsembleWeights:
    alpha: float = 1.2
    beta: float = 0.3
    gamma: float = 0.3

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            if not getattr(self, name) >= 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass(eq=False)
class ScaledRanking:
    ids: list[str]
    scores: np.ndarray
    target_mean: float
    provenance: str = "citation"


def citation_ensemble(
    graph: CitationGraph, params: RankingParams | None = None, *, threads: int = 1
) -> RankingVector:
    params = params or RankingParams()
    return time_weighted_pagerank(
        graph, edge_weights(graph, params.decay), params, threads=threads, provenance="citation"
    )


def venue_ensemble(
    venue_graph: VenueGraph,
    articles: ArticleTable,
    params: RankingParams | None = None,
    *,
    threads: int = 1,
) -> RankingVector:
    """Rank venues on their aggregated weights, then give each article its venue's score.

    Citations between articles of the same venue are left out of the
    iteration. Articles without a venue receive the lowest venue score.
    """
    params = params or RankingParams()
    cross = venue_graph.without_self_loops()
    venue_scores = time_weighted_pagerank(
        cross, cross.weight, params, threads=threads, provenance="venue"
    ).scores
    floor = float(venue_scores.min()) if len(venue_scores) else 1.0 - params.damping
    scores = [
        venue_scores[venue_graph.index[a.venue_id]] if a.venue_id in venue_graph.index else floor
        for a in articles.values()
    ]
    return RankingVector(list(articles), np.array(scores, dtype=np.float64), "venue")


def _two_level_average(
    citation_ranking: RankingVector, articles: ArticleTable, attr: str, provenance: str
) -> RankingVector:
    score_of = citation_ranking.as_dict()
    members: dict[str, list[float]] = {}
    for aid, rec in articles.items():
        for ent in getattr(rec, attr):
            members.setdefault(ent, []).append(score_of[aid])
    entity_mean = {ent: sum(vals) / len(vals) for ent, vals in members.items()}

    out = np.empty(len(articles), dtype=np.float64)
    missing = []
    for i, rec in enumerate(articles.values()):
        ents = getattr(rec, attr)
        if ents:
            out[i] = sum(entity_mean[e] for e in ents) / len(ents)
        else:
            missing.append(i)
    if missing:
        scored = np.delete(out, missing)
        # nobody carries this entity type: fall back to a constant ensemble
        floor = scored.min() if len(scored) else citation_ranking.scores.min()
        out[missing] = floor
    return RankingVector(list(articles), out, provenance)


def author_ensemble(citation_ranking: RankingVector, articles: ArticleTable) -> RankingVector:
    """Score = mean over the article's authors of each author's mean citation score."""
    return _two_level_average(citation_ranking, articles, "author_ids", "author")


def affiliation_ensemble(citation_ranking: RankingVector, articles: ArticleTable) -> RankingVector:
    return _two_level_average(citation_ranking, articles, "affiliation_ids", "affiliation")


def scale_to_common_mean(
    rankings: list[RankingVector], target_mean: float = 1.0
) -> list[ScaledRanking]:
    out = []
    for r in rankings:
        if len(r.scores) == 0:
            raise ValueError(f"cannot scale empty {r.provenance} ranking")
        mean = float(np.mean(r.scores))
        if not mean > 0:
            raise ValueError(f"cannot scale {r.provenance} ranking with mean {mean}")
        out.append(ScaledRanking(r.ids, r.scores * (target_mean / mean), target_mean, r.provenance))
    return out


def fuse(
    citation: ScaledRanking,
    venue: ScaledRanking,
    author: ScaledRanking,
    weights: EnsembleWeights | None = None,
    affiliation: ScaledRanking | None = None,
) -> RankingVector:
    """Weighted average of the scaled ensembles (citation weight fixed at 1)."""
    weights = weights or EnsembleWeights()
    parts = [(citation, 1.0), (venue, weights.alpha), (author, weights.beta)]
    if affiliation is not None:
        parts.append((affiliation, weights.gamma))
    for r, _ in parts[1:]:
        if r.ids != citation.ids:
            raise ValueError(f"{r.provenance} ranking covers a different article set")
    num = sum(w * r.scores for r, w in parts)
    total = sum(w for _, w in parts)
    stacked = np.vstack([r.scores for r, _ in parts])
    # rounding can push a convex combination one ulp outside its hull
    fused = np.clip(num / total, stacked.min(axis=0), stacked.max(axis=0))
    return RankingVector(list(citation.ids), fused, "fused")


@dataclass
class RankResult:
    method: str
    final: RankingVector
    ensembles: dict[str, RankingVector] = field(default_factory=dict)


def rank_articles(
    dataset: Dataset,
    method: str = "ewpr",
    params: RankingParams | None = None,
    weights: EnsembleWeights | None = None,
    *,
    threads: int = 1,
    target_mean: float = 1.0,
) -> RankResult:
    """Run one of ``pr``, ``wpr``, ``ewpr``, ``ewpr-all`` over a dataset."""
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    params = params or RankingParams()
    if not dataset.articles:
        return RankResult(method, RankingVector([], [], _PROVENANCE.get(method, "fused")))
    graph = build_citation_graph(dataset.articles, dataset.references)
    if method == "pr":
        return RankResult(method, classical_pagerank(graph, params, threads=threads))

    w = edge_weights(graph, params.decay)
    citation = time_weighted_pagerank(graph, w, params, threads=threads, provenance="citation")
    if method == "wpr":
        return RankResult(method, citation, {"citation": citation})

    venue_graph = build_venue_graph(graph, dataset.articles, w)
    ens = {
        "citation": citation,
        "venue": venue_ensemble(venue_graph, dataset.articles, params, threads=threads),
        "author": author_ensemble(citation, dataset.articles),
    }
    if method == "ewpr-all":
        ens["affiliation"] = affiliation_ensemble(citation, dataset.articles)
    scaled = scale_to_common_mean(list(ens.values()), target_mean)
    final = fuse(*scaled[:3], weights, scaled[3] if len(scaled) > 3 else None)
    return RankResult(method, final, ens)
