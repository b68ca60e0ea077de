"""hrex command line.

Exit status: 0 clean, 1 per-sample errors occurred, 2 fatal config or IO error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .dataset import FieldMapping, convert_hyperred, load_samples
from .errors import HrexError
from .facts import serialize_fact
from .gateway import (
    DEFAULT_MODEL,
    ENV_API_BASE,
    ENV_API_KEY,
    CompletionParams,
    Gateway,
    HttpBackend,
    MockBackend,
    ReplayBackend,
    default_max_tokens,
)
from .ontology import default_ontology, load_ontology
from .pipeline import (
    EvalOptions,
    ExtractConfig,
    cmd_eval,
    cmd_extract,
    cmd_report,
    cmd_repro,
    format_prf_table,
    load_manifest,
    load_records,
)
from .prompts import default_exemplar, load_exemplar
from .similarity import get_backend

EXIT_OK, EXIT_SAMPLE_ERRORS, EXIT_FATAL = 0, 1, 2
UNLABELED_MAX_TOKENS = 1024


def _write_json(obj, path: str | None) -> None:
    text = json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _run_convert(args) -> int:
    mapping = FieldMapping.load(args.mapping) if args.mapping else FieldMapping()
    stats = convert_hyperred(args.input, mapping, args.out)
    _write_json(stats.to_dict(), None)
    return EXIT_OK


def _make_backend(args):
    if args.backend == "mock":
        return MockBackend(args.mock_text)
    if args.backend == "replay":
        fixtures = args.fixtures or args.cache
        if not fixtures:
            raise HrexError("replay backend needs --fixtures or --cache")
        return ReplayBackend(fixtures)
    return HttpBackend(os.environ.get(ENV_API_BASE), os.environ.get(ENV_API_KEY, ""))


def _max_tokens_for(dataset: str) -> int:
    lengths = [sum(len(serialize_fact(f)) + 1 for f in s.gold) for s in load_samples(dataset)]
    if not any(lengths):
        return UNLABELED_MAX_TOKENS
    return default_max_tokens(lengths)


def _run_extract(args) -> int:
    ontology = load_ontology(args.ontology) if args.ontology else default_ontology()
    exemplar = load_exemplar(args.exemplar) if args.exemplar else default_exemplar()
    max_tokens = args.max_tokens or _max_tokens_for(args.dataset)
    params = CompletionParams(args.model, args.temperature, max_tokens, args.timeout)
    gateway = Gateway(_make_backend(args), cache_dir=args.cache, max_in_flight=args.max_in_flight,
                      max_attempts=args.max_attempts)
    cfg = ExtractConfig(
        dataset=Path(args.dataset), out=Path(args.out), ontology=ontology, exemplar=exemplar,
        params=params, n_runs=args.runs, strict=args.strict, jobs=args.jobs, limit=args.limit,
        seed=args.seed, manifest=Path(args.manifest) if args.manifest else None,
    )
    return cmd_extract(cfg, gateway)


def _sim_factory(args):
    def factory(name: str):
        if name == "http":
            return get_backend("http", api_base=os.environ.get(ENV_API_BASE, ""),
                               api_key=os.environ.get(ENV_API_KEY, ""), model=args.embedding_model)
        return get_backend(name)

    return factory


def _run_eval(args) -> int:
    options = EvalOptions(metric=args.metric, sim=args.sim, ignore_case=args.ignore_case, align=args.align,
                          granularity=args.granularity, score_run=args.score_run)
    report = cmd_eval(args.gold, args.pred, options, _sim_factory(args))
    _write_json(report.to_dict(), args.out)
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    stream = sys.stderr if not args.out else sys.stdout
    print(f"{args.metric} match ({len(report.per_sample)} samples)", file=stream)
    for mode in ("micro", "macro"):
        print(f"\n{mode}:\n" + format_prf_table([(report.model, getattr(report, mode))]), file=stream)
    return EXIT_OK


def _run_repro(args) -> int:
    report = cmd_repro(args.pred)
    models = {r.get("params", {}).get("model", "?") for r in load_records(args.pred)}
    out = report.to_dict()
    out["model"] = ", ".join(sorted(models))
    out["provenance"] = load_manifest(args.pred).get("config", {})
    _write_json(out, args.out)
    stream = sys.stderr if not args.out else sys.stdout
    print(f"reproducibility over {len(report.per_sample)} samples, {report.n_runs} runs: "
          f"{100 * report.corpus_score:.2f}%", file=stream)
    return EXIT_OK


def _run_report(args) -> int:
    reports = [json.loads(Path(p).read_text(encoding="utf-8")) for p in args.reports]
    text = cmd_report(reports)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hrex", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hrex {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convert", help="convert a raw dataset to canonical fact JSONL")
    conv_sub = conv.add_subparsers(dest="format", required=True)
    hr = conv_sub.add_parser("hyperred", help="HyperRED JSON/JSONL release")
    hr.add_argument("--in", dest="input", required=True)
    hr.add_argument("--out", required=True)
    hr.add_argument("--mapping", help="JSON file overriding raw key names")
    hr.set_defaults(func=_run_convert)

    ex = sub.add_parser("extract", help="prompt the model for every sample and parse the output")
    ex.add_argument("--dataset", required=True)
    ex.add_argument("--ontology", help="ontology JSON (default: shipped HyperRED ontology)")
    ex.add_argument("--exemplar", help="exemplar JSON (default: shipped exemplar)")
    ex.add_argument("--backend", choices=("http", "replay", "mock"), default="http")
    ex.add_argument("--fixtures", help="replay fixture directory (default: --cache)")
    ex.add_argument("--mock-text", default="", help="constant completion for the mock backend")
    ex.add_argument("--model", default=DEFAULT_MODEL)
    ex.add_argument("--runs", type=int, default=1)
    ex.add_argument("--temperature", type=float, default=0.0)
    ex.add_argument("--max-tokens", type=int,
                    help="default: 4x the longest gold serialization in tokens (1024 for unlabeled input)")
    ex.add_argument("--timeout", type=float, default=60.0)
    ex.add_argument("--cache", help="response cache directory")
    ex.add_argument("--out", required=True)
    ex.add_argument("--manifest", help="run manifest path (default: <out>.manifest.json)")
    ex.add_argument("--jobs", type=int, default=1)
    ex.add_argument("--max-in-flight", type=int, default=4)
    ex.add_argument("--max-attempts", type=int, default=5)
    ex.add_argument("--limit", type=int, help="score a seeded random subset of this size")
    ex.add_argument("--seed", type=int, default=0)
    ex.add_argument("--strict", action="store_true", help="drop facts with unknown relations or qualifier keys")
    ex.set_defaults(func=_run_extract)

    ev = sub.add_parser("eval", help="score predictions against gold")
    ev.add_argument("--metric", default="exact", help="exact or soft")
    ev.add_argument("--sim", choices=("exact", "token_f1", "trigram", "http"), default="trigram")
    ev.add_argument("--gold", required=True)
    ev.add_argument("--pred", required=True, help="extraction records or canonical fact JSONL")
    ev.add_argument("--ignore-case", action="store_true")
    ev.add_argument("--align", choices=("greedy", "optimal"), default="greedy")
    ev.add_argument("--granularity", choices=("fact", "blob"), default="fact")
    ev.add_argument("--score-run", type=int, default=0)
    ev.add_argument("--embedding-model", default="text-embedding-3-small")
    ev.add_argument("--out", help="EvalReport JSON path (default: stdout)")
    ev.add_argument("--csv", help="also write per-sample CSV here")
    ev.set_defaults(func=_run_eval)

    rp = sub.add_parser("repro", help="reproducibility across repeated runs")
    rp.add_argument("--pred", required=True, help="extraction records with >= 2 runs")
    rp.add_argument("--out")
    rp.set_defaults(func=_run_repro)

    rep = sub.add_parser("report", help="markdown tables from eval/repro reports")
    rep.add_argument("reports", nargs="+")
    rep.add_argument("--out")
    rep.set_defaults(func=_run_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (HrexError, OSError, ValueError) as exc:
        print(f"hrex: error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
