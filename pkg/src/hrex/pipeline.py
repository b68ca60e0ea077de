"""Run orchestration behind the ``hrex`` subcommands."""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .dataset import SentenceSample, iter_jsonl, load_samples, sample_from_dict, sample_subset
from .errors import EmptyInput, GatewayError, HrexError, IdMismatch, MetricUnknown, SchemaViolation, TooFewRuns
from .evaluator import PRF, EvalReport, ReproReport, exact_match, reproducibility, soft_match
from .facts import HyperFact, fact_from_dict, fact_to_dict
from .gateway import CompletionParams, Gateway
from .ontology import Ontology, ontology_digest
from .parser import parse_completion
from .prompts import CoTExemplar, PromptSpec, build_prompt_spec, exemplar_digest, render

log = logging.getLogger(__name__)

METRICS = ("exact", "soft")


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# --- extract ------------------------------------------------------------------


@dataclass
class ExtractConfig:
    dataset: Path
    out: Path
    ontology: Ontology
    exemplar: CoTExemplar
    params: CompletionParams = field(default_factory=CompletionParams)
    n_runs: int = 1
    strict: bool = False
    jobs: int = 1
    limit: int | None = None
    seed: int = 0
    manifest: Path | None = None

    @property
    def manifest_path(self) -> Path:
        return self.manifest or manifest_path_for(self.out)


def manifest_path_for(records_path: str | Path) -> Path:
    p = Path(records_path)
    return p.with_name(p.name + ".manifest.json")


def extract_sample(sample: SentenceSample, spec: PromptSpec, gateway: Gateway, cfg: ExtractConfig) -> tuple[dict, float]:
    """Build one ExtractionRecord. Gateway failures become the record's ``error``."""
    prompt = render(spec, sample.text)
    record = {
        "id": sample.id,
        "text": sample.text,
        "prompt_hash": prompt.prompt_hash,
        "params": {
            "model": cfg.params.model,
            "temperature": cfg.params.temperature,
            "max_tokens": cfg.params.max_tokens,
            "n_runs": cfg.n_runs,
            "strict": cfg.strict,
        },
        "backend": gateway.backend.name,
        "runs": [],
        "error": None,
    }
    elapsed = 0.0
    try:
        results = gateway.complete_runs(prompt, cfg.params, cfg.n_runs)
    except GatewayError as exc:
        record["error"] = {"type": type(exc).__name__, "message": str(exc), "run_index": exc.run_index}
        return record, elapsed
    for i, res in enumerate(results):
        elapsed += res.latency
        outcome = parse_completion(res.raw_text, cfg.ontology, cfg.strict)
        record["runs"].append(
            {
                "run_index": i,
                "raw_text": res.raw_text,
                "facts": [fact_to_dict(f) for f in outcome.facts],
                "diagnostics": [d.to_dict() for d in outcome.diagnostics],
            }
        )
    return record, elapsed


def cmd_extract(cfg: ExtractConfig, gateway: Gateway) -> int:
    """Write one record per sample (dataset order) plus a run manifest.

    Returns 1 if any sample failed, else 0. Timing and timestamps live only in
    the manifest so record files are byte-stable across reruns.
    """
    started = _now()
    samples = load_samples(cfg.dataset)
    if cfg.limit is not None:
        samples = sample_subset(samples, cfg.limit, cfg.seed)
    spec = build_prompt_spec(cfg.ontology, cfg.exemplar)

    n_errors = 0
    latency_total = 0.0
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    with open(cfg.out, "w", encoding="utf-8", newline="\n") as out, ThreadPoolExecutor(max(1, cfg.jobs)) as pool:
        for record, elapsed in pool.map(lambda s: extract_sample(s, spec, gateway, cfg), samples):
            out.write(_dumps(record) + "\n")
            out.flush()
            latency_total += elapsed
            if record["error"] is not None:
                n_errors += 1
                log.warning("sample %s failed: %s", record["id"], record["error"]["message"])

    manifest = {
        "tool": "hrex",
        "tool_version": __version__,
        "config": run_config(cfg, gateway),
        "counts": {
            "samples": len(samples),
            "errors": n_errors,
            "backend_calls": gateway.backend_calls,
            "cache_hits": gateway.cache_hits,
        },
        "timing": {"started_at": started, "finished_at": _now(), "completion_seconds": round(latency_total, 6)},
    }
    cfg.manifest_path.write_text(json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
                                 encoding="utf-8")
    return 1 if n_errors else 0


def run_config(cfg: ExtractConfig, gateway: Gateway) -> dict:
    """Timestamp-free run description; enough to replay the run."""
    return {
        "ontology": {"name": cfg.ontology.name, "version": cfg.ontology.version,
                     "sha256": ontology_digest(cfg.ontology)},
        "exemplar_sha256": exemplar_digest(cfg.exemplar),
        "backend": gateway.backend.name,
        "params": {"model": cfg.params.model, "temperature": cfg.params.temperature,
                   "max_tokens": cfg.params.max_tokens, "n_runs": cfg.n_runs, "strict": cfg.strict},
        "dataset": {"path": str(cfg.dataset), "sha256": file_digest(cfg.dataset)},
        "subset": {"limit": cfg.limit, "seed": cfg.seed},
    }


# --- loading predictions ------------------------------------------------------


@dataclass
class Predictions:
    facts: dict[str, list[HyperFact]]
    model: str = "predictions"
    n_error_records: int = 0
    provenance: dict = field(default_factory=dict)


def load_records(path: str | Path) -> list[dict]:
    records = []
    for lineno, obj in iter_jsonl(path):
        if not isinstance(obj, dict) or "id" not in obj or "runs" not in obj:
            raise SchemaViolation(f"{path}:{lineno}", "not an extraction record")
        records.append(obj)
    return records


def load_manifest(records_path: str | Path) -> dict:
    path = manifest_path_for(records_path)
    if not path.exists():
        return {}
    return json.loads(path.read_text(encoding="utf-8"))


def load_predictions(path: str | Path, score_run: int = 0) -> Predictions:
    """Read extraction records or canonical fact JSONL as predictions."""
    rows = list(iter_jsonl(path))
    if rows and isinstance(rows[0][1], dict) and "runs" in rows[0][1]:
        preds = Predictions({})
        for lineno, obj in rows:
            if not isinstance(obj, dict) or "runs" not in obj:
                raise SchemaViolation(f"{path}:{lineno}", "mixed record and fact lines")
            runs = obj["runs"]
            if obj.get("error") is not None or score_run >= len(runs):
                preds.n_error_records += 1
                facts = []
            else:
                try:
                    facts = [fact_from_dict(f) for f in runs[score_run]["facts"]]
                except (KeyError, TypeError, ValueError) as exc:
                    raise SchemaViolation(f"{path}:{lineno}", f"bad fact: {exc}") from exc
            preds.facts[obj["id"]] = facts
            preds.model = obj.get("params", {}).get("model", preds.model)
        manifest = load_manifest(path)
        preds.provenance = manifest.get("config", {})
        return preds
    preds = Predictions({})
    for lineno, obj in rows:
        sample = sample_from_dict(obj, f"{path}:{lineno}")
        preds.facts[sample.id] = list(sample.gold)
    return preds


# --- eval ---------------------------------------------------------------------


@dataclass
class EvalOptions:
    metric: str = "exact"
    sim: str = "exact"
    ignore_case: bool = False
    align: str = "greedy"
    granularity: str = "fact"
    score_run: int = 0

    def params(self) -> dict:
        if self.metric == "exact":
            return {"ignore_case": self.ignore_case, "score_run": self.score_run, "dedup": True}
        return {"sim": self.sim, "align": self.align, "granularity": self.granularity,
                "score_run": self.score_run, "dedup": True}


def cmd_eval(gold_path: str | Path, pred_path: str | Path, options: EvalOptions,
             sim_factory: Callable[[str], Callable[[str, str], float]] | None = None) -> EvalReport:
    if options.metric not in METRICS:
        raise MetricUnknown(f"unknown metric {options.metric!r}; choose from {', '.join(METRICS)}")
    gold = {s.id: s for s in load_samples(gold_path)}
    preds = load_predictions(pred_path, options.score_run)
    if not preds.facts:
        raise EmptyInput(f"no predictions in {pred_path}")
    missing = [sid for sid in preds.facts if sid not in gold]
    if missing:
        raise IdMismatch(missing)

    if options.metric == "exact":
        def score(g, p) -> PRF:
            return exact_match(g, p, options.ignore_case)
    else:
        if sim_factory is None:
            from .similarity import get_backend as sim_factory
        sim = sim_factory(options.sim)

        def score(g, p) -> PRF:
            return soft_match(g, p, sim, options.align, options.granularity)

    per_sample = [(sid, score(list(gold[sid].gold), facts)) for sid, facts in preds.facts.items()]
    params = options.params()
    params["n_error_records"] = preds.n_error_records
    return EvalReport(options.metric, params, per_sample, model=preds.model, provenance=preds.provenance)


def format_prf_table(rows: Sequence[tuple[str, PRF]]) -> str:
    lines = ["| Model | Precision | Recall | F1 |", "|---|---|---|---|"]
    lines += [f"| {name} | {p.precision:.2f} | {p.recall:.2f} | {p.f1:.2f} |" for name, p in rows]
    return "\n".join(lines)


# --- repro --------------------------------------------------------------------


def cmd_repro(records_path: str | Path) -> ReproReport:
    runs: dict[str, list[str]] = {}
    for rec in load_records(records_path):
        if rec.get("error") is not None:
            continue
        runs[rec["id"]] = [r["raw_text"] for r in rec["runs"]]
    if not runs:
        raise TooFewRuns("no successful records with runs")
    return reproducibility(runs)


# --- report -------------------------------------------------------------------

_FAMILY_TITLES = {
    "exact": "Exact match (quintuples)",
    "soft": "Soft match (aligned fact similarity)",
    "repro": "Reproducibility (pairwise edit similarity)",
}


def cmd_report(reports: Sequence[dict]) -> str:
    """Markdown with one table per metric family and a provenance section.

    Reports of one family whose scoring params differ get separate tables and
    a note; they are never averaged together.
    """
    if not reports:
        raise EmptyInput("no reports given")
    out = ["# Extraction evaluation report", ""]
    families: dict[str, list[dict]] = {}
    for rep in reports:
        families.setdefault(rep.get("metric", "?"), []).append(rep)

    for metric in sorted(families, key=lambda m: (list(_FAMILY_TITLES).index(m) if m in _FAMILY_TITLES else 99, m)):
        group = families[metric]
        out += [f"## {_FAMILY_TITLES.get(metric, metric)}", ""]
        if metric == "repro":
            out += ["| Model | Runs | Score |", "|---|---|---|"]
            out += [f"| {r.get('model', '?')} | {r['n_runs']} | {100 * r['corpus_score']:.2f}% |" for r in group]
            out.append("")
            continue
        by_params: dict[str, list[dict]] = {}
        for rep in group:
            by_params.setdefault(_dumps(rep.get("params", {})), []).append(rep)
        if len(by_params) > 1:
            out += ["> Note: these reports were scored with different parameters and are shown in separate tables.", ""]
        for params_key, reps in by_params.items():
            out.append(f"Parameters: `{params_key}`")
            out.append("")
            for mode in ("micro", "macro"):
                rows = [(r.get("model", "?"), PRF(**r[mode])) for r in reps]
                out += [f"{mode.capitalize()} average:", "", format_prf_table(rows), ""]

    out += ["## Provenance", ""]
    for i, rep in enumerate(reports, start=1):
        prov = rep.get("provenance") or {}
        out.append(f"- report {i} ({rep.get('metric', '?')}, model {rep.get('model', '?')}): "
                   + (f"`{_dumps(prov)}`" if prov else "no run manifest"))
    out.append("")
    return "\n".join(out)
