"""Pairwise accuracy against judged article pairs, and the method comparison."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

from .ensembles import METHODS, EnsembleWeights, rank_articles
from .errors import ConfigError, DataError
from .graph import Dataset
from .ranking import RankingParams, RankingVector

TIE_CREDIT = {"half": 0.5, "zero": 0.0, "full": 1.0}


@dataclass(frozen=True)
class JudgedPair:
    better: str
    worse: str


@dataclass(frozen=True)
class AccuracyReport:
    accuracy: float
    agreed: int
    ties: int
    evaluated: int
    excluded: int


def read_pairs(path: str | os.PathLike) -> list[JudgedPair]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise DataError(f"{path}:{lineno}: expected 'better_id<TAB>worse_id'")
            pairs.append(JudgedPair(cols[0].strip(), cols[1].strip()))
    return pairs


def write_pairs(pairs: Iterable[JudgedPair], fh: IO[str]) -> None:
    for p in pairs:
        fh.write(f"{p.better}\t{p.worse}\n")


def pairwise_accuracy(
    ranking: Mapping[str, float] | RankingVector,
    pairs: Iterable[JudgedPair],
    tie_policy: str = "half",
) -> AccuracyReport:
    """Fraction of pairs ranked in the judged order.

    Pairs naming an unknown article, or the same article twice, are excluded
    and counted. Score ties earn the credit given by ``tie_policy``.
    """
    if tie_policy not in TIE_CREDIT:
        raise ConfigError(f"unknown tie policy {tie_policy!r}; choose from {sorted(TIE_CREDIT)}")
    scores = ranking.as_dict() if isinstance(ranking, RankingVector) else ranking
    agreed = ties = evaluated = excluded = 0
    for p in pairs:
        if p.better == p.worse or p.better not in scores or p.worse not in scores:
            excluded += 1
            continue
        evaluated += 1
        b, w = scores[p.better], scores[p.worse]
        if b > w:
            agreed += 1
        elif b == w:
            ties += 1
    if evaluated == 0:
        raise DataError(f"no evaluable pairs ({excluded} excluded)")
    accuracy = (agreed + TIE_CREDIT[tie_policy] * ties) / evaluated
    return AccuracyReport(accuracy, agreed, ties, evaluated, excluded)


@dataclass(frozen=True)
class AblationRow:
    method: str
    accuracy: float
    pairs_evaluated: int
    pairs_excluded: int


def run_ablation(
    dataset: Dataset,
    pairs: Sequence[JudgedPair],
    methods: Sequence[str] = METHODS,
    params: RankingParams | None = None,
    weights: EnsembleWeights | None = None,
    *,
    tie_policy: str = "half",
    threads: int = 1,
) -> list[AblationRow]:
    """Score every method with the same parameters and pair set."""
    rows = []
    for method in methods:
        result = rank_articles(dataset, method, params, weights, threads=threads)
        rep = pairwise_accuracy(result.final, pairs, tie_policy)
        rows.append(AblationRow(method, rep.accuracy, rep.evaluated, rep.excluded))
    return rows


def write_ablation(rows: Iterable[AblationRow], fh: IO[str]) -> None:
    fh.write("method\taccuracy\tpairs_evaluated\tpairs_excluded\n")
    for r in rows:
        fh.write(f"{r.method}\t{r.accuracy:.12g}\t{r.pairs_evaluated}\t{r.pairs_excluded}\n")
