"""Seeded synthetic scholarly corpus with a planted importance order.

Each article's latent importance mixes the quality of its venue and of its
authors with article-level noise. Citations are drawn towards important
articles with an attention curve that rises for about two years after
publication and then fades, so older articles keep collecting citations long
after their peak. Judged pairs are sampled uniformly and ordered by the
planted importance.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .evaluation import JudgedPair, write_pairs
from .graph import ArticleRecord, Dataset, write_dataset
from .linking import ExternalRecord

_WORDS = (
    "data learning graph systems network web mining retrieval vision language "
    "security theory databases robotics software hardware parallel distributed "
    "semantic knowledge signal image speech quantum biology medicine economics "
    "optimization statistics logic algorithms architecture cloud mobile sensor"
).split()


@dataclass
class CorpusConfig:
    n_articles: int = 5000
    n_venues: int = 50
    n_authors: int = 2000
    n_pairs: int = 1000
    n_fos: int = 300
    first_year: int = 1990
    last_year: int = 2015
    refs_per_article: float = 10.0
    venue_share: float = 0.7
    author_share: float = 0.5
    noise: float = 0.4
    citation_strength: float = 1.0
    missing_venue_rate: float = 0.1
    external_rate: float = 0.5


@dataclass
class SyntheticCorpus:
    dataset: Dataset
    pairs: list[JudgedPair]
    importance: dict[str, float]
    true_venue: dict[str, str]
    external: list[ExternalRecord] = field(default_factory=list)


def _aging(age: np.ndarray) -> np.ndarray:
    # peaks two years after publication, long tail afterwards
    return np.where(age >= 1, age * np.exp(-age / 2.0) + 0.05, 0.0)


def generate_corpus(seed: int, config: CorpusConfig | None = None) -> SyntheticCorpus:
    cfg = config or CorpusConfig()
    rng = np.random.default_rng(seed)
    n = cfg.n_articles

    venue_q = rng.normal(size=cfg.n_venues)
    author_q = rng.normal(size=cfg.n_authors)
    venue_ids = [f"V{i:03d}" for i in range(cfg.n_venues)]
    venue_names = {}
    for i, vid in enumerate(venue_ids):
        words = rng.choice(_WORDS, size=3, replace=False)
        venue_names[vid] = f"{words[0].title()} {words[1].title()} and {words[2].title()} {i}"
    venue_topics = [rng.choice(cfg.n_fos, size=6, replace=False) for _ in range(cfg.n_venues)]

    span = np.arange(cfg.first_year, cfg.last_year + 1)
    year_p = np.exp(0.08 * (span - cfg.first_year))
    years = np.sort(rng.choice(span, size=n, p=year_p / year_p.sum()))
    venue_of = rng.integers(cfg.n_venues, size=n)
    n_auth = rng.integers(1, 5, size=n)
    authors_of = [rng.choice(cfg.n_authors, size=k, replace=False) for k in n_auth]
    importance = (
        cfg.venue_share * venue_q[venue_of]
        + cfg.author_share * np.array([author_q[a].mean() for a in authors_of])
        + cfg.noise * rng.normal(size=n)
    )

    ids = [f"P{i:05d}" for i in range(n)]
    attract = np.exp(cfg.citation_strength * importance)
    references: list[tuple[str, str]] = []
    for i in range(n):
        earlier = np.searchsorted(years, years[i], side="left")
        if earlier == 0:
            continue
        p = attract[:earlier] * _aging((years[i] - years[:earlier]).astype(np.float64))
        k = min(int(rng.poisson(cfg.refs_per_article)), earlier)
        if k == 0 or p.sum() <= 0:
            continue
        cited = rng.choice(earlier, size=k, replace=False, p=p / p.sum())
        references.extend((ids[i], ids[j]) for j in sorted(cited.tolist()))

    articles = {}
    true_venue = {}
    external = []
    for i, aid in enumerate(ids):
        topics = venue_topics[venue_of[i]]
        fos = sorted(rng.choice(topics, size=int(rng.integers(2, 4)), replace=False).tolist())
        words = rng.choice(_WORDS, size=3)
        title = f"On {words[0]} {words[1]} for {words[2]} number {i}"
        vid = venue_ids[venue_of[i]]
        true_venue[aid] = vid
        missing = rng.random() < cfg.missing_venue_rate
        articles[aid] = ArticleRecord(
            aid,
            int(years[i]),
            None if missing else vid,
            title,
            tuple(f"A{a:04d}" for a in authors_of[i]),
            (f"F{authors_of[i][0] % 40:02d}",),
            tuple(f"S{f:03d}" for f in fos),
        )
        # a few records also cover articles that already have a venue
        if rng.random() < (cfg.external_rate if missing else 0.05):
            edition = int(rng.integers(1, 30))
            suffix = {1: "st", 2: "nd", 3: "rd"}.get(edition if edition < 20 else edition % 10, "th")
            name = venue_names[vid]
            if rng.random() < 0.3:
                # typo-level damage: drop two characters, abbreviate "and"
                cut = sorted(rng.choice(len(name), size=2, replace=False).tolist())
                name = (name[: cut[0]] + name[cut[0] + 1 : cut[1]] + name[cut[1] + 1 :]).replace(" and ", " & ")
            raw = f"{edition}{suffix} International Conference on {name}, {int(years[i])}"
            external.append(
                ExternalRecord(title.upper(), int(years[i]), raw, tuple(f"S{f:03d}" for f in fos))
            )

    pairs = []
    while len(pairs) < cfg.n_pairs:
        a, b = rng.choice(n, size=2, replace=False)
        if importance[a] == importance[b]:
            continue
        if importance[a] < importance[b]:
            a, b = b, a
        pairs.append(JudgedPair(ids[a], ids[b]))

    return SyntheticCorpus(
        Dataset(articles, references, venue_names),
        pairs,
        dict(zip(ids, importance.tolist())),
        true_venue,
        external,
    )


def write_corpus(corpus: SyntheticCorpus, directory: str | os.PathLike) -> None:
    """Write the dataset TSVs plus ``pairs.tsv`` and ``external.tsv``."""
    directory = Path(directory)
    write_dataset(corpus.dataset, directory)
    with open(directory / "pairs.tsv", "w", encoding="utf-8", newline="") as fh:
        write_pairs(corpus.pairs, fh)
    with open(directory / "external.tsv", "w", encoding="utf-8", newline="") as fh:
        for r in corpus.external:
            fh.write(f"{r.title}\t{r.year}\t{r.raw_venue}\t{','.join(r.fos_ids)}\n")
