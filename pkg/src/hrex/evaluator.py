"""Scoring: exact-match quintuples, soft alignment, and run-to-run reproducibility."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import EmptyInput, RunCountMismatch, SimilarityOutOfRange, TooFewRuns
from .facts import HyperFact, Quintuple, expand_quintuples, serialize_fact


@dataclass(frozen=True)
class PRF:
    """Precision/recall/F1 with the supports they were computed from.

    ``n_matched`` is an integer count for exact match and summed similarity
    mass for soft match.
    """

    precision: float
    recall: float
    f1: float
    n_pred: int
    n_gold: int
    n_matched: float

    @classmethod
    def from_counts(cls, n_matched: float, n_pred: int, n_gold: int) -> "PRF":
        if n_pred == 0 and n_gold == 0:
            return cls(1.0, 1.0, 1.0, 0, 0, n_matched)
        if n_pred == 0 or n_gold == 0:
            return cls(0.0, 0.0, 0.0, n_pred, n_gold, n_matched)
        p = n_matched / n_pred
        r = n_matched / n_gold
        return cls(p, r, f1_score(p, r), n_pred, n_gold, n_matched)

    def to_dict(self) -> dict:
        return asdict(self)


def f1_score(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


# --- exact match ------------------------------------------------------------


def quintuple_set(facts: Iterable[HyperFact], ignore_case: bool = False) -> set[Quintuple]:
    out = set()
    for fact in facts:
        for q in expand_quintuples(fact):
            if ignore_case:
                q = Quintuple(*(x.casefold() if x is not None else None for x in q))
            out.add(q)
    return out


def exact_match(gold: Sequence[HyperFact], pred: Sequence[HyperFact], ignore_case: bool = False) -> PRF:
    g = quintuple_set(gold, ignore_case)
    p = quintuple_set(pred, ignore_case)
    return PRF.from_counts(len(g & p), len(p), len(g))


# --- edit-distance reproducibility -----------------------------------------


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over Unicode scalar values."""
    if a == b:
        return 0
    return _kernels.edit_distance(_kernels.codepoints(a), _kernels.codepoints(b))


def normalized_similarity(a: str, b: str) -> float:
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


@dataclass(frozen=True)
class ReproReport:
    per_sample: tuple[tuple[str, float], ...]
    corpus_score: float
    n_runs: int

    def to_dict(self) -> dict:
        return {
            "metric": "repro",
            "n_runs": self.n_runs,
            "corpus_score": self.corpus_score,
            "per_sample": [{"id": sid, "score": s} for sid, s in self.per_sample],
        }


def reproducibility(runs_per_sample: Mapping[str, Sequence[str]]) -> ReproReport:
    """Mean pairwise normalized edit similarity of repeated outputs per sample,
    averaged over samples. ``math.fsum`` keeps results independent of order."""
    if not runs_per_sample:
        raise EmptyInput("no samples to score")
    counts = {len(runs) for runs in runs_per_sample.values()}
    if len(counts) > 1:
        raise RunCountMismatch(f"samples have differing run counts: {sorted(counts)}")
    n_runs = counts.pop()
    if n_runs < 2:
        raise TooFewRuns(f"reproducibility needs at least 2 runs per sample, got {n_runs}")

    per_sample = []
    for sid in sorted(runs_per_sample):
        runs = runs_per_sample[sid]
        sims = [normalized_similarity(a, b) for a, b in itertools.combinations(runs, 2)]
        per_sample.append((sid, math.fsum(sims) / len(sims)))
    corpus = math.fsum(s for _, s in per_sample) / len(per_sample)
    return ReproReport(tuple(per_sample), corpus, n_runs)


# --- soft match ---------------------------------------------------------------


def _unique_serialized(facts: Sequence[HyperFact]) -> list[str]:
    return list(dict.fromkeys(serialize_fact(f) for f in facts))


def similarity_matrix(pred: Sequence[str], gold: Sequence[str], sim: Callable[[str, str], float]) -> np.ndarray:
    name = getattr(sim, "name", getattr(sim, "__name__", ""))
    mat = np.empty((len(pred), len(gold)), dtype=np.float64)
    for i, p in enumerate(pred):
        for j, g in enumerate(gold):
            value = float(sim(p, g))
            if not 0.0 <= value <= 1.0:  # also rejects NaN
                raise SimilarityOutOfRange(value, name)
            mat[i, j] = value
    return mat


def align(mat: np.ndarray, method: str = "greedy") -> tuple[np.ndarray, np.ndarray]:
    if method == "greedy":
        return _kernels.greedy_align(mat)
    if method == "optimal":
        from scipy.optimize import linear_sum_assignment

        if mat.size == 0:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty
        return linear_sum_assignment(mat, maximize=True)
    raise ValueError(f"unknown alignment {method!r}")


def soft_match(
    gold: Sequence[HyperFact],
    pred: Sequence[HyperFact],
    sim: Callable[[str, str], float],
    align_method: str = "greedy",
    granularity: str = "fact",
) -> PRF:
    """Similarity-weighted P/R/F1 over canonical fact serializations.

    Duplicate serializations are dropped on both sides. With ``granularity="blob"``
    each side is the sorted, newline-joined serializations scored as one pair.
    """
    g = _unique_serialized(gold)
    p = _unique_serialized(pred)
    if granularity == "blob":
        if g and p:
            s = similarity_matrix(["\n".join(sorted(p))], ["\n".join(sorted(g))], sim)[0, 0]
            return PRF.from_counts(float(s), 1, 1)
        return PRF.from_counts(0.0, int(bool(p)), int(bool(g)))
    if granularity != "fact":
        raise ValueError(f"unknown granularity {granularity!r}")
    if not g or not p:
        return PRF.from_counts(0.0, len(p), len(g))
    mat = similarity_matrix(p, g, sim)
    rows, cols = align(mat, align_method)
    mass = math.fsum(mat[rows, cols])
    return PRF.from_counts(mass, len(p), len(g))


# --- corpus aggregation -----------------------------------------------------


def aggregate(per_sample: Sequence[PRF], mode: str = "micro") -> PRF:
    if not per_sample:
        raise EmptyInput("nothing to aggregate")
    if mode == "micro":
        return PRF.from_counts(
            math.fsum(x.n_matched for x in per_sample),
            sum(x.n_pred for x in per_sample),
            sum(x.n_gold for x in per_sample),
        )
    if mode == "macro":
        n = len(per_sample)
        return PRF(
            math.fsum(x.precision for x in per_sample) / n,
            math.fsum(x.recall for x in per_sample) / n,
            math.fsum(x.f1 for x in per_sample) / n,
            sum(x.n_pred for x in per_sample),
            sum(x.n_gold for x in per_sample),
            math.fsum(x.n_matched for x in per_sample),
        )
    raise ValueError(f"unknown aggregation mode {mode!r}")


@dataclass
class EvalReport:
    metric: str
    params: dict
    per_sample: list[tuple[str, PRF]]
    model: str = ""
    provenance: dict = field(default_factory=dict)

    @property
    def micro(self) -> PRF:
        return aggregate([prf for _, prf in self.per_sample], "micro")

    @property
    def macro(self) -> PRF:
        return aggregate([prf for _, prf in self.per_sample], "macro")

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "model": self.model,
            "params": self.params,
            "provenance": self.provenance,
            "per_sample": [{"id": sid, **prf.to_dict()} for sid, prf in self.per_sample],
            "micro": self.micro.to_dict(),
            "macro": self.macro.to_dict(),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["precision", "recall", "f1", "n_pred", "n_gold", "n_matched"]
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", *cols])
        rows = [(sid, prf) for sid, prf in self.per_sample]
        rows += [("__micro__", self.micro), ("__macro__", self.macro)]
        for sid, prf in rows:
            d = prf.to_dict()
            writer.writerow([sid, *(d[c] for c in cols)])
        return buf.getvalue()
