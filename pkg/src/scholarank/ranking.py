"""Time-decayed impact weights and the weighted PageRank iteration.

The update rule is used in its literal, un-normalised form::

    PR(v) = (1 - d) + d * sum_{u -> v} w(u, v) * PR(u) / W(u)

with ``W(u)`` the total outgoing weight of ``u``. Note that ``d`` multiplies
the link term, so the default ``d = 0.15`` gives the link term a small share.
Nodes with ``W(u) == 0`` pass nothing on.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterable, Protocol

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, DataError

PROVENANCES = frozenset({"citation", "venue", "author", "affiliation", "fused", "pagerank"})


@dataclass(frozen=True)
class RankingParams:
    damping: float = 0.15
    decay: float = 2.5
    iterations: int = 30
    epsilon: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.damping <= 1.0:
            raise ConfigError(f"damping must lie in [0, 1], got {self.damping}")
        if not self.decay >= 0.0:
            raise ConfigError(f"decay must be >= 0, got {self.decay}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(eq=False)
class RankingVector:
    ids: list[str]
    scores: np.ndarray
    provenance: str
    iterations: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.scores.shape != (len(self.ids),):
            raise ValueError("scores and ids differ in length")
        if not (np.all(np.isfinite(self.scores)) and np.all(self.scores >= 0)):
            raise ValueError("scores must be finite and non-negative")

    def __len__(self) -> int:
        return len(self.ids)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.ids, self.scores.tolist()))

    def write_tsv(self, fh: IO[str]) -> None:
        for aid, s in zip(self.ids, self.scores.tolist()):
            fh.write(f"{aid}\t{s:.12g}\n")

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            self.write_tsv(fh)


def read_ranking_tsv(path: str | os.PathLike) -> dict[str, float]:
    scores: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 'entity_id<TAB>score'")
            scores[parts[0]] = float(parts[1])
    return scores


def impact_weight(citing_year: int, peak_year: int, decay: float) -> float:
    """Weight of a citation made in ``citing_year`` to an article peaking in ``peak_year``.

    Citations before the peak weigh 1; from the peak on the weight decays as
    ``1 / ln(e + years_since_peak) ** decay``.
    """
    if decay < 0:
        raise ValueError("decay must be >= 0")
    if citing_year < peak_year:
        return 1.0
    return 1.0 / math.log(math.e + (citing_year - peak_year)) ** decay


class _Graph(Protocol):
    ids: list[str]
    src: np.ndarray
    dst: np.ndarray

    @property
    def n_nodes(self) -> int: ...


def edge_weights(graph, decay: float) -> np.ndarray:
    """Impact weight of every edge of a :class:`~scholarank.graph.CitationGraph`, in edge order."""
    delta = graph.year_of[graph.src] - graph.peak_of[graph.dst]
    uniq, inverse = np.unique(delta, return_inverse=True)
    table = np.array([impact_weight(int(d), 0, decay) for d in uniq], dtype=np.float64)
    return table[inverse].reshape(-1) if len(delta) else np.zeros(0)


def _in_matrix(n: int, src: np.ndarray, dst: np.ndarray, coef: np.ndarray) -> sp.csr_matrix:
    # rows are targets; within a row, sources in ascending order
    order = np.lexsort((src, dst))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(dst, minlength=n), out=indptr[1:])
    return sp.csr_matrix((coef[order], src[order], indptr), shape=(n, n))


def _power_iterate(
    n: int,
    src: np.ndarray,
    dst: np.ndarray,
    coef: np.ndarray,
    params: RankingParams,
    threads: int,
) -> tuple[np.ndarray, int]:
    matrix = _in_matrix(n, src, dst, coef)
    d = params.damping
    x = np.ones(n, dtype=np.float64)
    if threads > 1 and n > 1:
        bounds = np.linspace(0, n, min(threads, n) + 1).astype(np.int64)
        blocks = [(a, b, matrix[a:b]) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        pool = ThreadPoolExecutor(max_workers=threads)
    else:
        blocks, pool = [], None
    try:
        done = 0
        for done in range(1, params.iterations + 1):
            if pool is None:
                link = matrix @ x
            else:
                link = np.empty(n)
                cur = x

                def run(block, cur=cur):
                    a, b, m = block
                    link[a:b] = m @ cur

                list(pool.map(run, blocks))
            new = (1.0 - d) + d * link
            if params.epsilon is not None and np.max(np.abs(new - x), initial=0.0) <= params.epsilon:
                x = new
                break
            x = new
    finally:
        if pool is not None:
            pool.shutdown()
    return x, done


def time_weighted_pagerank(
    graph: _Graph,
    weights: Iterable[float],
    params: RankingParams | None = None,
    *,
    threads: int = 1,
    provenance: str = "citation",
) -> RankingVector:
    """Run the weighted update for ``params.iterations`` synchronous rounds from all-ones.

    ``weights`` is aligned with ``graph.src`` / ``graph.dst``. Per-node sums
    are taken in ascending source order, so the result does not depend on
    ``threads``.
    """
    params = params or RankingParams()
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.shape != graph.src.shape:
        raise ValueError("weights must align with graph edges")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("edge weights must be finite and non-negative")
    n = graph.n_nodes
    out_total = np.bincount(graph.src, weights=w, minlength=n) if len(w) else np.zeros(n)
    denom = out_total[graph.src]
    coef = np.divide(w, denom, out=np.zeros_like(w), where=denom > 0)
    scores, done = _power_iterate(n, graph.src, graph.dst, coef, params, threads)
    return RankingVector(list(graph.ids), scores, provenance, done)


def classical_pagerank(
    graph: _Graph, params: RankingParams | None = None, *, threads: int = 1
) -> RankingVector:
    """Same update with every citation counted equally (``1 / out_degree``)."""
    params = params or RankingParams()
    n = graph.n_nodes
    outdeg = np.bincount(graph.src, minlength=n)
    coef = 1.0 / outdeg[graph.src] if len(graph.src) else np.zeros(0)
    scores, done = _power_iterate(n, graph.src, graph.dst, coef, params, threads)
    return RankingVector(list(graph.ids), scores, "pagerank", done)
