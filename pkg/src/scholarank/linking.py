"""Filling missing venues from external bibliographic records.

External venue names are normalised, merged, and linked to known venues in
two tiers: a near-exact name match (Jaro >= ``lam``) wins outright; failing
that, venues sharing enough fields of study (topic similarity >= ``theta``)
are compared by name with the looser ``phi``.
"""

from __future__ import annotations

import logging
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import IO, Collection, Iterable, Sequence

from .errors import ConfigError, DataError
from .graph import ArticleTable

logger = logging.getLogger(__name__)

DEFAULT_STOP_WORDS = frozenset({"on", "the", "of", "in", "for", "and", "a", "an", "to", "at"})
DEFAULT_COMMON_WORDS = frozenset(
    {"conference", "international", "proceedings", "workshop", "annual", "symposium"}
)

_NON_ALNUM = re.compile(r"[^0-9a-z]+")
_YEAR = re.compile(r"^\d{4}$")
_ORDINAL = re.compile(r"^\d+(st|nd|rd|th)$")

NAME_ONLY = "name_only"
TOPIC_THEN_NAME = "topic_then_name"
UNMATCHED = "unmatched"


def normalize_venue_name(
    raw: str,
    stop_words: Collection[str] = DEFAULT_STOP_WORDS,
    common_words: Collection[str] = DEFAULT_COMMON_WORDS,
) -> str:
    """Lowercase, strip punctuation, years, ordinals, stop words and boilerplate words."""
    tokens = _NON_ALNUM.sub(" ", raw.lower()).split()
    kept = [
        tok
        for tok in tokens
        if tok not in stop_words
        and tok not in common_words
        and not _YEAR.match(tok)
        and not _ORDINAL.match(tok)
    ]
    return " ".join(kept)


def normalize_title(raw: str) -> str:
    return " ".join(_NON_ALNUM.sub(" ", raw.lower()).split())


def jaro_similarity(a: str, b: str) -> float:
    if a == b:
        return 1.0
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0.0
    window = max(max(la, lb) // 2 - 1, 0)
    b_used = [False] * lb
    a_matched = []
    for i, ch in enumerate(a):
        for j in range(max(0, i - window), min(lb, i + window + 1)):
            if not b_used[j] and b[j] == ch:
                b_used[j] = True
                a_matched.append(ch)
                break
    m = len(a_matched)
    if m == 0:
        return 0.0
    b_matched = [ch for ch, used in zip(b, b_used) if used]
    half_transpositions = sum(x != y for x, y in zip(a_matched, b_matched)) / 2.0
    return (m / la + m / lb + (m - half_transpositions) / m) / 3.0


def topic_similarity(fs: Collection[str], ft: Collection[str]) -> float:
    """Shared fields of study over the geometric mean of set sizes; 0 if either is empty."""
    fs, ft = set(fs), set(ft)
    if not fs or not ft:
        return 0.0
    return len(fs & ft) / math.sqrt(len(fs) * len(ft))


def venue_fos_sets(articles: ArticleTable) -> dict[str, frozenset[str]]:
    sets: dict[str, set[str]] = {}
    for a in articles.values():
        if a.venue_id is not None:
            sets.setdefault(a.venue_id, set()).update(a.fos_ids)
    return {v: frozenset(s) for v, s in sets.items()}


@dataclass(frozen=True)
class LinkingThresholds:
    # lam above 1 disables the name-only tier
    lam: float = 0.95
    theta: float = 0.5
    phi: float = 0.7

    def __post_init__(self) -> None:
        if not self.lam >= 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")
        for name in ("theta", "phi"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if self.phi > self.lam:
            raise ConfigError(f"phi ({self.phi}) must not exceed lambda ({self.lam})")


@dataclass(frozen=True)
class LinkDecision:
    external_name: str
    matched_venue: str | None
    rule: str
    name_sim: float
    topic_sim: float | None = None


@dataclass(frozen=True)
class VenueEntry:
    venue_id: str
    name: str
    fos: frozenset[str]


def build_venue_index(
    venue_names: dict[str, str],
    fos_sets: dict[str, frozenset[str]],
    stop_words: Collection[str] = DEFAULT_STOP_WORDS,
    common_words: Collection[str] = DEFAULT_COMMON_WORDS,
) -> list[VenueEntry]:
    """Normalised internal venues sorted by id; venues whose name normalises to nothing are dropped."""
    entries = []
    for vid in sorted(venue_names):
        name = normalize_venue_name(venue_names[vid], stop_words, common_words)
        if name:
            entries.append(VenueEntry(vid, name, fos_sets.get(vid, frozenset())))
    return entries


def _best(scored: Iterable[tuple[float, VenueEntry]]) -> tuple[float, VenueEntry | None]:
    best_sim, best = -1.0, None
    for sim, entry in scored:
        if sim > best_sim or (sim == best_sim and best is not None and entry.venue_id < best.venue_id):
            best_sim, best = sim, entry
    return best_sim, best


def link_venue(
    external_name: str,
    external_fos: Collection[str],
    index: Sequence[VenueEntry],
    thresholds: LinkingThresholds | None = None,
) -> LinkDecision:
    th = thresholds or LinkingThresholds()
    if not external_name or not index:
        return LinkDecision(external_name, None, UNMATCHED, 0.0)
    sims = [(jaro_similarity(external_name, e.name), e) for e in index]
    best_sim, best = _best(sims)
    if best_sim >= th.lam:
        return LinkDecision(
            external_name, best.venue_id, NAME_ONLY, best_sim,
            topic_similarity(external_fos, best.fos),
        )
    candidates = []
    for sim, e in sims:
        ts = topic_similarity(external_fos, e.fos)
        if ts >= th.theta:
            candidates.append((sim, e, ts))
    if candidates:
        cand_sim, cand = _best((s, e) for s, e, _ in candidates)
        cand_ts = next(ts for s, e, ts in candidates if e is cand)
        if cand_sim >= th.phi:
            return LinkDecision(external_name, cand.venue_id, TOPIC_THEN_NAME, cand_sim, cand_ts)
        return LinkDecision(external_name, None, UNMATCHED, best_sim, cand_ts)
    return LinkDecision(external_name, None, UNMATCHED, best_sim)


@dataclass(frozen=True)
class ExternalRecord:
    title: str
    year: int
    raw_venue: str
    fos_ids: tuple[str, ...] = ()


def read_external_tsv(path: str | os.PathLike) -> tuple[list[ExternalRecord], int]:
    """Parse ``title, year, raw_venue_name, fos_ids`` rows; returns records and skipped count."""
    records, skipped = [], 0
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) not in (3, 4):
                raise DataError(f"{path}:{lineno}: expected 3-4 tab-separated columns, found {len(cols)}")
            cols.extend([""] * (4 - len(cols)))
            title, year_s, venue, fos = (c.strip() for c in cols)
            try:
                year = int(year_s)
            except ValueError:
                logger.warning("%s:%d: bad year %r (skipped)", path, lineno, year_s)
                skipped += 1
                continue
            fos_ids = tuple(dict.fromkeys(f.strip() for f in fos.split(",") if f.strip()))
            records.append(ExternalRecord(title, year, venue, fos_ids))
    return records, skipped


@dataclass
class LinkReport:
    external_names: int = 0
    empty_names: int = 0
    name_only: int = 0
    topic_then_name: int = 0
    unmatched: int = 0

    def as_text(self) -> str:
        return "".join(f"{f.name}\t{getattr(self, f.name)}\n" for f in fields(self))


def link_external_venues(
    records: Iterable[ExternalRecord],
    index: Sequence[VenueEntry],
    thresholds: LinkingThresholds | None = None,
    *,
    stop_words: Collection[str] = DEFAULT_STOP_WORDS,
    common_words: Collection[str] = DEFAULT_COMMON_WORDS,
    threads: int = 1,
) -> tuple[dict[str, LinkDecision], LinkReport]:
    """Merge records by normalised venue name and link each distinct name once.

    The FOS set of an external venue is the union over its records. Decisions
    are keyed and ordered by normalised name.
    """
    fos_by_name: dict[str, set[str]] = {}
    report = LinkReport()
    for r in records:
        name = normalize_venue_name(r.raw_venue, stop_words, common_words)
        if not name:
            report.empty_names += 1
            continue
        fos_by_name.setdefault(name, set()).update(r.fos_ids)
    names = sorted(fos_by_name)

    def work(name: str) -> LinkDecision:
        return link_venue(name, fos_by_name[name], index, thresholds)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            decided = list(pool.map(work, names))
    else:
        decided = [work(n) for n in names]
    report.external_names = len(names)
    for d in decided:
        setattr(report, d.rule, getattr(report, d.rule) + 1)
    return dict(zip(names, decided)), report


def write_audit(decisions: Iterable[LinkDecision], fh: IO[str]) -> None:
    fh.write("external_name\trule\tmatched_venue\tname_sim\ttopic_sim\n")
    for d in decisions:
        ts = "" if d.topic_sim is None else f"{d.topic_sim:.12g}"
        fh.write(f"{d.external_name}\t{d.rule}\t{d.matched_venue or ''}\t{d.name_sim:.12g}\t{ts}\n")


@dataclass
class EnrichmentReport:
    external_records: int = 0
    unmatched_records: int = 0
    ambiguous_records: int = 0
    already_had_venue: int = 0
    venue_not_linked: int = 0
    enriched: int = 0

    def as_text(self) -> str:
        return "".join(f"{f.name}\t{getattr(self, f.name)}\n" for f in fields(self))


def enrich_articles(
    articles: ArticleTable,
    records: Iterable[ExternalRecord],
    decisions: dict[str, LinkDecision],
    *,
    stop_words: Collection[str] = DEFAULT_STOP_WORDS,
    common_words: Collection[str] = DEFAULT_COMMON_WORDS,
) -> tuple[ArticleTable, EnrichmentReport]:
    """Fill ``venue_id`` for articles lacking one, matching records on (normalised title, year).

    Articles that already have a venue are never overwritten; a title/year key
    shared by several internal articles is treated as ambiguous and skipped.
    """
    by_key: dict[tuple[str, int], list[str]] = {}
    for aid, a in articles.items():
        key = normalize_title(a.title)
        if key:
            by_key.setdefault((key, a.year), []).append(aid)

    updated = dict(articles)
    report = EnrichmentReport()
    for r in records:
        report.external_records += 1
        hits = by_key.get((normalize_title(r.title), r.year), [])
        if not hits:
            report.unmatched_records += 1
            continue
        if len(hits) > 1:
            report.ambiguous_records += 1
            continue
        aid = hits[0]
        if updated[aid].venue_id is not None:
            report.already_had_venue += 1
            continue
        decision = decisions.get(normalize_venue_name(r.raw_venue, stop_words, common_words))
        if decision is None or decision.matched_venue is None:
            report.venue_not_linked += 1
            continue
        updated[aid] = replace(updated[aid], venue_id=decision.matched_venue)
        report.enriched += 1
    return updated, report
