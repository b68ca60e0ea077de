"""Hyper-relational fact model: normalization, canonical text form, quintuples."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

# Characters that carry structure in the line format. Backslash comes first so
# escaping is reversible.
SPECIAL_CHARS = "\\|;:()[]"


def normalize(text: str) -> str:
    """NFC, trimmed, internal whitespace runs collapsed to one space. Case kept."""
    return unicodedata.normalize("NFC", " ".join(text.split()))


def escape(text: str) -> str:
    return "".join("\\" + ch if ch in SPECIAL_CHARS else ch for ch in text)


def unescape(text: str) -> str:
    out = []
    chars = iter(text)
    for ch in chars:
        if ch == "\\":
            nxt = next(chars, None)
            out.append("\\" if nxt is None else nxt)
        else:
            out.append(ch)
    return "".join(out)


@dataclass(frozen=True)
class EntityMention:
    """Entity text as written plus its normalized form.

    Equality and hashing only look at ``normalized``.
    """

    normalized: str
    surface: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.normalized:
            raise ValueError("entity text is empty after normalization")

    @classmethod
    def of(cls, surface: str) -> "EntityMention":
        return cls(normalized=normalize(surface), surface=surface)

    def __str__(self) -> str:
        return self.normalized


@dataclass(frozen=True)
class Qualifier:
    key: str
    value: EntityMention

    def __post_init__(self):
        if not self.key:
            raise ValueError("qualifier key is empty")

    @property
    def sort_key(self) -> tuple[str, str]:
        return (self.key, self.value.normalized)


@dataclass(frozen=True)
class HyperFact:
    """A (head, relation, tail) triple with qualifiers that scope the whole triple.

    Use :meth:`build` to construct from plain strings; it normalizes, sorts
    and deduplicates qualifiers. The raw constructor validates but does not fix.
    """

    head: EntityMention
    relation: str
    tail: EntityMention
    qualifiers: tuple[Qualifier, ...] = ()

    def __post_init__(self):
        if not self.relation:
            raise ValueError("relation label is empty")
        keys = [q.sort_key for q in self.qualifiers]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise ValueError("qualifiers must be sorted by (key, value) without duplicates")

    @classmethod
    def build(
        cls,
        head: str,
        relation: str,
        tail: str,
        qualifiers: Iterable[tuple[str, str]] = (),
    ) -> "HyperFact":
        quals = {}
        for key, value in qualifiers:
            q = Qualifier(normalize(key), EntityMention.of(value))
            quals.setdefault(q.sort_key, q)
        return cls(
            head=EntityMention.of(head),
            relation=normalize(relation),
            tail=EntityMention.of(tail),
            qualifiers=tuple(quals[k] for k in sorted(quals)),
        )


class Quintuple(NamedTuple):
    """Exact-match unit. ``qkey``/``qvalue`` are both ``None`` for a bare triple."""

    head: str
    relation: str
    tail: str
    qkey: str | None
    qvalue: str | None


def expand_quintuples(fact: HyperFact) -> list[Quintuple]:
    h, r, t = fact.head.normalized, fact.relation, fact.tail.normalized
    if not fact.qualifiers:
        return [Quintuple(h, r, t, None, None)]
    return [Quintuple(h, r, t, q.key, q.value.normalized) for q in fact.qualifiers]


def serialize_fact(fact: HyperFact) -> str:
    """Canonical single-line form ``(head | relation | tail) [k1: v1; k2: v2]``."""
    triple = " | ".join(escape(x) for x in (fact.head.normalized, fact.relation, fact.tail.normalized))
    text = f"({triple})"
    if fact.qualifiers:
        quals = "; ".join(f"{escape(q.key)}: {escape(q.value.normalized)}" for q in fact.qualifiers)
        text += f" [{quals}]"
    return text


def fact_to_dict(fact: HyperFact) -> dict:
    return {
        "head": fact.head.normalized,
        "relation": fact.relation,
        "tail": fact.tail.normalized,
        "qualifiers": [{"key": q.key, "value": q.value.normalized} for q in fact.qualifiers],
    }


def fact_from_dict(obj: dict) -> HyperFact:
    """Inverse of :func:`fact_to_dict`; raises ``KeyError``/``ValueError``/``TypeError`` on bad input."""
    quals = obj.get("qualifiers") or []
    if not isinstance(quals, list):
        raise TypeError("qualifiers must be a list")
    return HyperFact.build(
        _text(obj["head"]),
        _text(obj["relation"]),
        _text(obj["tail"]),
        [(_text(q["key"]), _text(q["value"])) for q in quals],
    )


def _text(value) -> str:
    if not isinstance(value, str):
        raise TypeError(f"expected a string, got {type(value).__name__}")
    return value
