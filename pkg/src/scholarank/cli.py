"""Command line entry point: ``scholarank {ingest,link,rank,eval,synth}``.

Exit status: 0 success, 2 configuration/usage error, 3 I/O or staging
error, 4 data error.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import shutil
import sys
from pathlib import Path
from typing import Iterator, Sequence

from .config import PipelineConfig, load_config
from .ensembles import METHODS, rank_articles
from .errors import ConfigError, DataError, StagingError
from .evaluation import (
    AblationRow,
    pairwise_accuracy,
    read_pairs,
    run_ablation,
    write_ablation,
)
from .graph import PAPERS, Dataset, ingest_dataset, write_dataset
from .linking import (
    build_venue_index,
    enrich_articles,
    link_external_venues,
    read_external_tsv,
    venue_fos_sets,
    write_audit,
)
from .ranking import read_ranking_tsv

logger = logging.getLogger("scholarank")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_DATA = 0, 2, 3, 4
STAGING_ENV = "SCHOLARANK_STAGING"
LOCK_NAME = ".lock"


def _stage_dir(args: argparse.Namespace) -> Path:
    return Path(args.stage or os.environ.get(STAGING_ENV) or "stage")


@contextlib.contextmanager
def stage_lock(stage: Path) -> Iterator[None]:
    """Hold an exclusive lock file inside ``stage`` for the duration of a mutation."""
    stage.mkdir(parents=True, exist_ok=True)
    lock = stage / LOCK_NAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise StagingError(f"staging directory {stage} is locked ({lock} exists)") from None
    try:
        os.write(fd, f"{os.getpid()}\n".encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


def _load_stage(stage: Path, cfg: PipelineConfig) -> Dataset:
    if not (stage / PAPERS).is_file():
        raise StagingError(f"{stage} holds no staged dataset; run `scholarank ingest` first")
    dataset, _ = ingest_dataset(stage, cfg.ingest)
    return dataset


def _require_file(path: Path) -> Path:
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return path


def _apply_links(dataset: Dataset, external: Path, cfg: PipelineConfig, threads: int):
    records, skipped = read_external_tsv(external)
    index = build_venue_index(
        dataset.venue_names, venue_fos_sets(dataset.articles), cfg.stop_words, cfg.common_words
    )
    decisions, link_report = link_external_venues(
        records, index, cfg.thresholds,
        stop_words=cfg.stop_words, common_words=cfg.common_words, threads=threads,
    )
    articles, enrich_report = enrich_articles(
        dataset.articles, records, decisions,
        stop_words=cfg.stop_words, common_words=cfg.common_words,
    )
    if skipped:
        logger.warning("%d external record(s) skipped", skipped)
    enriched = Dataset(articles, dataset.references, dataset.venue_names)
    return enriched, decisions, link_report, enrich_report


def cmd_ingest(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    source = Path(args.input)
    if not source.is_dir():
        raise FileNotFoundError(f"input directory not found: {source}")
    stage = _stage_dir(args)
    if (stage / PAPERS).exists() and not args.force:
        raise StagingError(f"{stage} already holds a staged dataset; pass --force to overwrite")
    dataset, report = ingest_dataset(source, cfg.ingest)
    with stage_lock(stage):
        if args.force:
            shutil.rmtree(stage / "rankings", ignore_errors=True)
        write_dataset(dataset, stage)
        (stage / "ingest_report.tsv").write_text(report.as_text(), encoding="utf-8")
    sys.stdout.write(report.as_text())
    return EXIT_OK


def cmd_link(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    stage = _stage_dir(args)
    external = _require_file(Path(args.external))
    with stage_lock(stage):
        dataset = _load_stage(stage, cfg)
        enriched, decisions, link_report, enrich_report = _apply_links(
            dataset, external, cfg, args.threads
        )
        write_dataset(enriched, stage)
        with open(stage / "link_audit.tsv", "w", encoding="utf-8", newline="") as fh:
            write_audit(decisions.values(), fh)
        text = link_report.as_text() + enrich_report.as_text()
        (stage / "link_report.tsv").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_rank(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    stage = _stage_dir(args)
    out = Path(args.out) if args.out else stage / "rankings"
    if cfg.enable_enrichment:
        _require_file(cfg.external)
    dataset = _load_stage(stage, cfg)
    if cfg.enable_enrichment:
        dataset, *_ = _apply_links(dataset, cfg.external, cfg, args.threads)
    method = cfg.effective_method()
    result = rank_articles(
        dataset, method, cfg.ranking, cfg.weights,
        threads=args.threads, target_mean=cfg.target_mean,
    )
    out.mkdir(parents=True, exist_ok=True)
    written = [out / f"{method}.tsv"]
    result.final.save(written[0])
    if cfg.emit_ensembles:
        for name, ranking in result.ensembles.items():
            path = out / f"{method}.{name}.tsv"
            ranking.save(path)
            written.append(path)
    for path in written:
        print(path)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    pairs = read_pairs(_require_file(Path(args.pairs)))
    if args.ablation:
        dataset = _load_stage(_stage_dir(args), cfg)
        methods = args.methods or list(METHODS)
        rows = run_ablation(
            dataset, pairs, methods, cfg.ranking, cfg.weights,
            tie_policy=cfg.tie_policy, threads=args.threads,
        )
    else:
        if not args.ranking:
            raise ConfigError("eval needs --ranking FILE or --ablation")
        ranking_path = _require_file(Path(args.ranking))
        rep = pairwise_accuracy(read_ranking_tsv(ranking_path), pairs, cfg.tie_policy)
        label = ranking_path.name.removesuffix(".tsv")
        rows = [AblationRow(label, rep.accuracy, rep.evaluated, rep.excluded)]
    write_ablation(rows, sys.stdout)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_ablation(rows, fh)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    from .synthetic import CorpusConfig, generate_corpus, write_corpus

    out = Path(args.out)
    if (out / PAPERS).exists() and not args.force:
        raise StagingError(f"{out} already holds a dataset; pass --force to overwrite")
    corpus = generate_corpus(
        args.seed,
        CorpusConfig(
            n_articles=args.articles, n_venues=args.venues,
            n_authors=args.authors, n_pairs=args.pairs,
        ),
    )
    write_corpus(corpus, out)
    print(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument(
        "--stage", help=f"staging directory (default: ${STAGING_ENV} or ./stage)"
    )
    common.add_argument("--threads", type=int, default=1, help="worker threads (default: 1)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="scholarank",
        description="Rank scholarly articles with time-weighted PageRank ensembles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="validate input TSVs into the staging directory")
    p.add_argument("input", help="directory holding papers.tsv and friends")
    p.add_argument("--force", action="store_true", help="overwrite an existing staged dataset")
    p.add_argument("--strict", action="store_true", default=None, help="fail on the first invalid row")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("link", parents=[common], help="fill missing venues from external records")
    p.add_argument("external", help="TSV: title, year, raw_venue_name, fos_ids")
    p.add_argument("--lambda", dest="lam", type=float, help="name-only Jaro threshold")
    p.add_argument("--theta", type=float, help="topic similarity threshold")
    p.add_argument("--phi", type=float, help="Jaro threshold among topic candidates")
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("rank", parents=[common], help="compute article rankings")
    p.add_argument("--method", choices=METHODS, help="ranking method (default: ewpr)")
    p.add_argument("--emit-ensembles", action="store_true", default=None)
    p.add_argument("--out", help="output directory (default: <stage>/rankings)")
    p.add_argument("--damping", type=float)
    p.add_argument("--decay", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("eval", parents=[common], help="pairwise accuracy of rankings")
    p.add_argument("pairs", help="TSV: better_id, worse_id")
    p.add_argument("--ranking", help="ranking TSV to score")
    p.add_argument("--ablation", action="store_true", help="score pr/wpr/ewpr/ewpr-all on the staged dataset")
    p.add_argument("--methods", nargs="+", choices=METHODS)
    p.add_argument("--tie-policy", choices=("half", "zero", "full"))
    p.add_argument("--out", help="also write the accuracy table here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic corpus with judged pairs")
    p.add_argument("out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--articles", type=int, default=5000)
    p.add_argument("--venues", type=int, default=50)
    p.add_argument("--authors", type=int, default=2000)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_synth)
    return parser


_OVERRIDES = (
    "damping", "decay", "iterations", "epsilon", "alpha", "beta", "gamma",
    "lam", "theta", "phi", "strict", "method", "emit_ensembles", "tie_policy",
)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        overrides = {k: getattr(args, k, None) for k in _OVERRIDES}
        cfg = load_config(args.config, **overrides)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"scholarank: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, ValueError) as exc:
        print(f"scholarank: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"scholarank: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
