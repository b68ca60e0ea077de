"""HyperRED conversion, canonical JSONL loading, and seeded subsetting."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterator, Sequence

from .errors import DuplicateId, FileUnreadable, SchemaViolation, SpanOutOfRange, SubsetTooLarge
from .facts import HyperFact, fact_from_dict, fact_to_dict, normalize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SentenceSample:
    id: str
    text: str
    gold: tuple[HyperFact, ...] = ()

    def to_dict(self) -> dict:
        return {"id": self.id, "text": self.text, "facts": [fact_to_dict(f) for f in self.gold]}


@dataclass(frozen=True)
class FieldMapping:
    """Key names of the raw HyperRED records.

    The defaults follow the public release, where a record looks like::

        {"tokens": [...],
         "entities": [{"span": [s, e], "label": "Entity"}, ...],
         "relations": [{"head": [s, e], "tail": [s, e], "label": "...",
                        "qualifiers": [{"span": [s, e], "label": "..."}]}]}

    and spans are ``[start, end)`` token offsets.
    """

    tokens: str = "tokens"
    entities: str = "entities"
    relations: str = "relations"
    head: str = "head"
    tail: str = "tail"
    relation_label: str = "label"
    qualifiers: str = "qualifiers"
    qualifier_span: str = "span"
    qualifier_label: str = "label"
    sample_id: str = "id"
    end_exclusive: bool = True

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.type in ("str", str) and (not isinstance(value, str) or not value):
                raise SchemaViolation(f"mapping.{f.name}", "must be a non-empty string")

    @classmethod
    def load(cls, path: str | Path) -> "FieldMapping":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise FileUnreadable(path, str(exc)) from exc
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"mapping line {exc.lineno}", exc.msg) from exc
        if not isinstance(data, dict):
            raise SchemaViolation("mapping", "must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise SchemaViolation("mapping", f"unknown keys: {', '.join(unknown)}")
        return cls(**data)


@dataclass
class ConversionStats:
    samples_read: int = 0
    samples_written: int = 0
    facts_emitted: int = 0
    records_skipped: int = 0
    skipped: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _read_raw_records(path: Path) -> Iterator[dict]:
    """Yield records from a JSON array or a JSONL file."""
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FileUnreadable(path, str(exc)) from exc
    if text.lstrip().startswith("["):
        try:
            records = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"line {exc.lineno}", f"invalid JSON: {exc.msg}") from exc
        yield from records
        return
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"line {lineno}", f"invalid JSON: {exc.msg}") from exc


def _span_text(tokens: list[str], span, index: int, end_exclusive: bool) -> str:
    if not (isinstance(span, (list, tuple)) and len(span) == 2 and all(isinstance(x, int) for x in span)):
        raise SchemaViolation(f"record {index}", f"span {span!r} is not a [start, end] pair")
    start, end = span
    if not end_exclusive:
        end += 1
    if start < 0 or end > len(tokens) or start >= end:
        raise SpanOutOfRange(index, list(span), len(tokens))
    text = normalize(" ".join(tokens[start:end]))
    if not text:
        raise SpanOutOfRange(index, list(span), len(tokens))
    return text


def _require(record: dict, key: str, index: int):
    if key not in record:
        raise SchemaViolation(f"record {index}", f"missing key {key!r}")
    return record[key]


def convert_record(record: dict, index: int, mapping: FieldMapping, id_prefix: str) -> SentenceSample:
    if not isinstance(record, dict):
        raise SchemaViolation(f"record {index}", "not a JSON object")
    tokens = _require(record, mapping.tokens, index)
    relations = _require(record, mapping.relations, index)
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise SchemaViolation(f"record {index}", f"{mapping.tokens!r} must be a list of strings")
    if not isinstance(relations, list):
        raise SchemaViolation(f"record {index}", f"{mapping.relations!r} must be a list")
    text = normalize(" ".join(tokens))
    if not text:
        raise SchemaViolation(f"record {index}", "empty sentence")

    facts = []
    for rel in relations:
        if not isinstance(rel, dict):
            raise SchemaViolation(f"record {index}", "relation entry is not an object")
        head = _span_text(tokens, _require(rel, mapping.head, index), index, mapping.end_exclusive)
        tail = _span_text(tokens, _require(rel, mapping.tail, index), index, mapping.end_exclusive)
        label = _require(rel, mapping.relation_label, index)
        if not isinstance(label, str) or not normalize(label):
            raise SchemaViolation(f"record {index}", "relation label missing or empty")
        quals = []
        for q in rel.get(mapping.qualifiers) or []:
            value = _span_text(tokens, _require(q, mapping.qualifier_span, index), index, mapping.end_exclusive)
            key = _require(q, mapping.qualifier_label, index)
            if not isinstance(key, str) or not normalize(key):
                raise SchemaViolation(f"record {index}", "qualifier label missing or empty")
            quals.append((key, value))
        facts.append(HyperFact.build(head, label, tail, quals))

    raw_id = record.get(mapping.sample_id)
    sample_id = str(raw_id) if raw_id is not None else f"{id_prefix}-{index:06d}"
    return SentenceSample(sample_id, text, tuple(facts))


def convert_hyperred(raw_path: str | Path, mapping: FieldMapping | None, out_path: str | Path) -> ConversionStats:
    """Convert a raw HyperRED split to canonical fact JSONL.

    Records with out-of-range spans are skipped and listed in the stats; a
    missing mapped key is a configuration error and aborts the conversion.
    """
    mapping = mapping or FieldMapping()
    raw_path, out_path = Path(raw_path), Path(out_path)
    stats = ConversionStats()
    seen_ids: set[str] = set()
    prefix = raw_path.stem
    with open(out_path, "w", encoding="utf-8", newline="\n") as out:
        for index, record in enumerate(_read_raw_records(raw_path)):
            stats.samples_read += 1
            try:
                sample = convert_record(record, index, mapping, prefix)
            except SpanOutOfRange as exc:
                stats.records_skipped += 1
                stats.skipped.append({"index": index, "reason": "SpanOutOfRange", "detail": str(exc)})
                log.warning("skipping %s", exc)
                continue
            if sample.id in seen_ids:
                raise DuplicateId(sample.id)
            seen_ids.add(sample.id)
            out.write(dumps_sample(sample) + "\n")
            stats.samples_written += 1
            stats.facts_emitted += len(sample.gold)
    return stats


def dumps_sample(sample: SentenceSample) -> str:
    return json.dumps(sample.to_dict(), ensure_ascii=False)


def sample_from_dict(obj, where: str) -> SentenceSample:
    if not isinstance(obj, dict):
        raise SchemaViolation(where, "line is not a JSON object")
    sid, text = obj.get("id"), obj.get("text")
    if not isinstance(sid, str) or not sid:
        raise SchemaViolation(where, "missing or empty 'id'")
    if not isinstance(text, str) or not normalize(text):
        raise SchemaViolation(where, "missing or empty 'text'")
    raw_facts = obj.get("facts", [])
    if not isinstance(raw_facts, list):
        raise SchemaViolation(where, "'facts' must be a list")
    try:
        facts = tuple(fact_from_dict(f) for f in raw_facts)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SchemaViolation(where, f"bad fact: {exc}") from exc
    return SentenceSample(sid, text, facts)


def iter_jsonl(path: str | Path) -> Iterator[tuple[int, object]]:
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(path, str(exc)) from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(f"{path}:{lineno}", f"invalid JSON: {exc.msg}") from exc


def load_samples(path: str | Path) -> list[SentenceSample]:
    samples, seen = [], set()
    for lineno, obj in iter_jsonl(path):
        sample = sample_from_dict(obj, f"{path}:{lineno}")
        if sample.id in seen:
            raise DuplicateId(sample.id, lineno)
        seen.add(sample.id)
        samples.append(sample)
    return samples


# --- seeded subsetting --------------------------------------------------------

_MASK64 = (1 << 64) - 1


class XorShift64Star:
    """xorshift64* generator seeded through one splitmix64 step.

    Seeding: ``state = splitmix64(seed mod 2**64)``, replaced by
    ``0x9E3779B97F4A7C15`` if that is zero. Each draw applies the shifts
    12/25/27 and multiplies by ``0x2545F4914F6CDD1D`` modulo 2**64.
    """

    def __init__(self, seed: int):
        z = (seed + 0x9E3779B97F4A7C15) & _MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z ^= z >> 31
        self.state = z or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64


def sample_subset(samples: Sequence[SentenceSample], n: int, seed: int) -> list[SentenceSample]:
    """First ``n`` items of a Fisher-Yates shuffle driven by :class:`XorShift64Star`.

    For i from len-1 down to 1, swap item i with item ``next_u64() % (i + 1)``.
    """
    if n < 0 or n > len(samples):
        raise SubsetTooLarge(n, len(samples))
    rng = XorShift64Star(seed)
    items = list(samples)
    for i in range(len(items) - 1, 0, -1):
        j = rng.next_u64() % (i + 1)
        items[i], items[j] = items[j], items[i]
    return items[:n]
