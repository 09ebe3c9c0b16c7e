"""Article table ingestion and the derived citation / venue graphs.

Input is a directory of tab-separated UTF-8 files with fixed column order and
no header (lines starting with ``#`` are ignored)::

    papers.tsv              article_id  year  venue_id  title
    references.tsv          citing_id   cited_id
    paper_authors.tsv       article_id  author_id
    paper_affiliations.tsv  article_id  affiliation_id
    paper_fos.tsv           article_id  fos_id
    venues.tsv              venue_id    name

Only ``papers.tsv`` is required. ``venue_id`` and ``title`` may be empty and
trailing empty columns may be omitted.
"""

from __future__ import annotations

import datetime
import logging
import os
from collections import Counter
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DataError

logger = logging.getLogger(__name__)

PAPERS = "papers.tsv"
REFERENCES = "references.tsv"
AUTHORS = "paper_authors.tsv"
AFFILIATIONS = "paper_affiliations.tsv"
FOS = "paper_fos.tsv"
VENUES = "venues.tsv"


@dataclass(frozen=True)
class ArticleRecord:
    article_id: str
    year: int
    venue_id: str | None = None
    title: str = ""
    author_ids: tuple[str, ...] = ()
    affiliation_ids: tuple[str, ...] = ()
    fos_ids: tuple[str, ...] = ()


# Insertion order is the canonical node order for every derived structure.
ArticleTable = dict[str, ArticleRecord]


@dataclass
class Dataset:
    articles: ArticleTable
    references: list[tuple[str, str]] = field(default_factory=list)
    venue_names: dict[str, str] = field(default_factory=dict)


@dataclass
class IngestOptions:
    min_year: int = 1800
    max_year: int = field(default_factory=lambda: datetime.date.today().year)
    strict: bool = False


@dataclass
class IngestReport:
    records_read: int = 0
    records_kept: int = 0
    records_rejected: int = 0
    records_deduplicated: int = 0
    multi_venue: int = 0
    missing_venue: int = 0
    missing_references: int = 0
    references_read: int = 0
    references_unresolved: int = 0
    references_self_loops: int = 0
    references_duplicated: int = 0
    links_read: int = 0
    links_orphaned: int = 0
    links_duplicated: int = 0
    venues_read: int = 0

    def is_consistent(self) -> bool:
        return self.records_read == (
            self.records_kept + self.records_rejected + self.records_deduplicated
        )

    def as_text(self) -> str:
        """``key<TAB>value`` lines in declaration order."""
        return "".join(f"{f.name}\t{getattr(self, f.name)}\n" for f in fields(self))


def _rows(path: Path, min_cols: int, max_cols: int) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(line_number, columns)``; wrong column counts are fatal."""
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if not min_cols <= len(cols) <= max_cols:
                raise DataError(
                    f"{path}:{lineno}: expected {min_cols}-{max_cols} tab-separated "
                    f"columns, found {len(cols)}"
                )
            cols = [c.strip() for c in cols]
            cols.extend([""] * (max_cols - len(cols)))
            yield lineno, cols


def _dedupe(items: Iterable[str]) -> tuple[tuple[str, ...], int]:
    seen: dict[str, None] = {}
    total = 0
    for item in items:
        total += 1
        seen.setdefault(item, None)
    return tuple(seen), total - len(seen)


def ingest_dataset(
    directory: str | os.PathLike, options: IngestOptions | None = None
) -> tuple[Dataset, IngestReport]:
    """Read a dataset directory into an article table plus reference list.

    Rows whose values fail validation (non-integer or out-of-range year,
    empty id) are skipped and counted, or raise :class:`DataError` under
    ``options.strict``. Rows with the wrong number of columns always raise.
    Duplicate article ids keep the first row.
    """
    options = options or IngestOptions()
    directory = Path(directory)
    report = IngestReport()
    papers_path = directory / PAPERS
    if not papers_path.is_file():
        raise FileNotFoundError(f"missing required file {papers_path}")

    def reject(where: str, why: str) -> None:
        if options.strict:
            raise DataError(f"{where}: {why}")
        logger.warning("%s: %s (skipped)", where, why)
        report.records_rejected += 1

    base: dict[str, tuple[int, str | None, str]] = {}
    for lineno, (aid, year_s, venue, title) in _rows(papers_path, 2, 4):
        report.records_read += 1
        where = f"{papers_path}:{lineno}"
        if not aid:
            reject(where, "empty article_id")
            continue
        try:
            year = int(year_s)
        except ValueError:
            reject(where, f"bad year {year_s!r}")
            continue
        if not options.min_year <= year <= options.max_year:
            reject(where, f"year {year} outside [{options.min_year}, {options.max_year}]")
            continue
        if aid in base:
            report.records_deduplicated += 1
            if (venue or None) != base[aid][1]:
                report.multi_venue += 1
            continue
        base[aid] = (year, venue or None, title)
    report.records_kept = len(base)

    def read_links(name: str) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        path = directory / name
        if not path.is_file():
            return out
        for lineno, (aid, other) in _rows(path, 2, 2):
            report.links_read += 1
            if aid not in base or not other:
                report.links_orphaned += 1
                continue
            out.setdefault(aid, []).append(other)
        return out

    authors = read_links(AUTHORS)
    affiliations = read_links(AFFILIATIONS)
    fos = read_links(FOS)

    articles: ArticleTable = {}
    for aid, (year, venue, title) in base.items():
        a_ids, d1 = _dedupe(authors.get(aid, ()))
        f_ids, d2 = _dedupe(affiliations.get(aid, ()))
        s_ids, d3 = _dedupe(fos.get(aid, ()))
        report.links_duplicated += d1 + d2 + d3
        articles[aid] = ArticleRecord(aid, year, venue, title, a_ids, f_ids, s_ids)
        if venue is None:
            report.missing_venue += 1

    references: list[tuple[str, str]] = []
    ref_path = directory / REFERENCES
    if ref_path.is_file():
        seen: set[tuple[str, str]] = set()
        for lineno, (u, v) in _rows(ref_path, 2, 2):
            report.references_read += 1
            if u not in articles or v not in articles:
                report.references_unresolved += 1
            elif u == v:
                report.references_self_loops += 1
            elif (u, v) in seen:
                report.references_duplicated += 1
            else:
                seen.add((u, v))
                references.append((u, v))
    citing = {u for u, _ in references}
    report.missing_references = sum(1 for aid in articles if aid not in citing)

    venue_names: dict[str, str] = {}
    venue_path = directory / VENUES
    if venue_path.is_file():
        for lineno, (vid, name) in _rows(venue_path, 2, 2):
            report.venues_read += 1
            if vid and vid not in venue_names:
                venue_names[vid] = name

    return Dataset(articles, references, venue_names), report


def write_dataset(dataset: Dataset, directory: str | os.PathLike) -> None:
    """Write ``dataset`` in the same layout :func:`ingest_dataset` reads."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    def dump(name: str, rows: Iterable[Sequence[str]]) -> None:
        with open(directory / name, "w", encoding="utf-8", newline="") as fh:
            for row in rows:
                fh.write("\t".join(row) + "\n")

    arts = dataset.articles.values()
    dump(PAPERS, ((a.article_id, str(a.year), a.venue_id or "", a.title) for a in arts))
    dump(AUTHORS, ((a.article_id, x) for a in arts for x in a.author_ids))
    dump(AFFILIATIONS, ((a.article_id, x) for a in arts for x in a.affiliation_ids))
    dump(FOS, ((a.article_id, x) for a in arts for x in a.fos_ids))
    dump(REFERENCES, dataset.references)
    dump(VENUES, sorted(dataset.venue_names.items()))


@dataclass(frozen=True, eq=False)
class CitationGraph:
    """Immutable directed graph; an edge ``u -> v`` means ``u`` cites ``v``.

    Edges are stored once, sorted by ``(src, dst)`` node index; ``in_order``
    lists edge ids sorted by ``(dst, src)`` so both adjacencies share one
    weight array.
    """

    ids: list[str]
    index: dict[str, int]
    src: np.ndarray
    dst: np.ndarray
    out_ptr: np.ndarray
    in_ptr: np.ndarray
    in_order: np.ndarray
    year_of: np.ndarray
    peak_of: np.ndarray
    citation_year_hist: list[dict[int, int]]
    dropped: dict[str, int]

    @property
    def n_nodes(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def out_edges(self, node: int) -> np.ndarray:
        return self.dst[self.out_ptr[node] : self.out_ptr[node + 1]]

    def in_edges(self, node: int) -> np.ndarray:
        return self.src[self.in_order[self.in_ptr[node] : self.in_ptr[node + 1]]]

    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_ptr)

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_ptr)


def _peaks(hist: list[dict[int, int]], years: np.ndarray) -> np.ndarray:
    peaks = years.copy()
    for i, h in enumerate(hist):
        if h:
            # max count, earliest year among ties
            peaks[i] = min(h.items(), key=lambda kv: (-kv[1], kv[0]))[0]
    return peaks


def build_citation_graph(
    articles: ArticleTable, references: Iterable[tuple[str, str]]
) -> CitationGraph:
    ids = list(articles)
    index = {aid: i for i, aid in enumerate(ids)}
    n = len(ids)
    dropped = Counter(unresolved=0, self_loops=0, duplicates=0)
    pairs: set[tuple[int, int]] = set()
    for u, v in references:
        iu, iv = index.get(u), index.get(v)
        if iu is None or iv is None:
            dropped["unresolved"] += 1
        elif iu == iv:
            dropped["self_loops"] += 1
        elif (iu, iv) in pairs:
            dropped["duplicates"] += 1
        else:
            pairs.add((iu, iv))

    edges = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
    src, dst = edges[:, 0].copy(), edges[:, 1].copy()
    out_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=out_ptr[1:])
    in_order = np.lexsort((src, dst))
    in_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(dst, minlength=n), out=in_ptr[1:])

    year_of = np.array([articles[aid].year for aid in ids], dtype=np.int64)
    hist: list[dict[int, int]] = [{} for _ in range(n)]
    for u, v in zip(src.tolist(), dst.tolist()):
        y = int(year_of[u])
        hist[v][y] = hist[v].get(y, 0) + 1

    return CitationGraph(
        ids=ids,
        index=index,
        src=src,
        dst=dst,
        out_ptr=out_ptr,
        in_ptr=in_ptr,
        in_order=in_order,
        year_of=year_of,
        peak_of=_peaks(hist, year_of),
        citation_year_hist=hist,
        dropped=dict(dropped),
    )


def compute_peak_times(graph: CitationGraph) -> np.ndarray:
    """Year of maximal citation count per node (earliest on ties, own year if uncited)."""
    return _peaks(graph.citation_year_hist, graph.year_of)


@dataclass(frozen=True, eq=False)
class VenueGraph:
    """Venue-level graph whose edge weights sum article-level impact weights.

    Edges are sorted by ``(src, dst)``; diagonal entries (citations inside one
    venue) are kept so total weight is conserved.
    """

    ids: list[str]
    index: dict[str, int]
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def total_weight(self) -> float:
        total = 0.0
        for w in self.weight.tolist():
            total += w
        return total

    def without_self_loops(self) -> VenueGraph:
        keep = self.src != self.dst
        return VenueGraph(self.ids, self.index, self.src[keep], self.dst[keep], self.weight[keep])


def build_venue_graph(
    graph: CitationGraph, articles: ArticleTable, weights: np.ndarray
) -> VenueGraph:
    """Aggregate per-citation ``weights`` (aligned with ``graph`` edges) by venue pair.

    Each venue pair accumulates its article-level weights in citation-edge
    order, so results are reproducible bit for bit.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (graph.n_edges,):
        raise ValueError("weights must align with graph edges")
    venues = sorted({a.venue_id for a in articles.values() if a.venue_id is not None})
    vindex = {v: i for i, v in enumerate(venues)}
    node_venue = np.array(
        [vindex.get(articles[aid].venue_id, -1) for aid in graph.ids], dtype=np.int64
    ).reshape(-1)
    nv = len(venues)
    if graph.n_edges == 0 or nv == 0:
        empty = np.zeros(0, dtype=np.int64)
        return VenueGraph(venues, vindex, empty, empty.copy(), np.zeros(0))
    s = node_venue[graph.src]
    t = node_venue[graph.dst]
    ok = (s >= 0) & (t >= 0) & (weights > 0)
    codes = s[ok] * nv + t[ok]
    uniq, inverse = np.unique(codes, return_inverse=True)
    summed = np.bincount(inverse, weights=weights[ok], minlength=len(uniq))
    return VenueGraph(venues, vindex, uniq // nv, uniq % nv, summed)
