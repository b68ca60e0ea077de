"""Relation/qualifier ontology that grounds prompts and parser validation."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import DuplicateName, FileUnreadable, SchemaViolation
from .facts import normalize

DEFAULT_ONTOLOGY = "hyperred_ontology.json"


@dataclass(frozen=True)
class RelationDef:
    name: str
    description: str


@dataclass(frozen=True)
class QualifierDef:
    key: str
    description: str


@dataclass(frozen=True)
class Ontology:
    """Immutable, lexicographically ordered catalog of relations and qualifiers."""

    name: str
    version: str
    relations: tuple[RelationDef, ...]
    qualifiers: tuple[QualifierDef, ...]
    _rel_index: dict = field(init=False, repr=False, compare=False)
    _qual_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(sorted(self.relations, key=lambda r: r.name)))
        object.__setattr__(self, "qualifiers", tuple(sorted(self.qualifiers, key=lambda q: q.key)))
        object.__setattr__(self, "_rel_index", _index(self.relations, lambda r: r.name))
        object.__setattr__(self, "_qual_index", _index(self.qualifiers, lambda q: q.key))

    @property
    def relation_names(self) -> frozenset[str]:
        return frozenset(self._rel_index)

    @property
    def qualifier_keys(self) -> frozenset[str]:
        return frozenset(self._qual_index)


def _index(items, key_of) -> dict:
    index = {}
    for item in items:
        k = key_of(item)
        if k in index:
            raise DuplicateName(k)
        index[k] = item
    return index


def lookup_relation(ont: Ontology, name: str) -> RelationDef | None:
    return ont._rel_index.get(name.strip())


def lookup_qualifier(ont: Ontology, key: str) -> QualifierDef | None:
    return ont._qual_index.get(key.strip())


def ontology_from_dict(data) -> Ontology:
    if not isinstance(data, dict):
        raise SchemaViolation("$", "ontology must be a JSON object")
    for fld in ("name", "version"):
        if not isinstance(data.get(fld), str):
            raise SchemaViolation(fld, "missing or not a string")
    relations = _entries(data, "relations", "name", RelationDef)
    if not relations:
        raise SchemaViolation("relations", "ontology has no relations")
    qualifiers = _entries(data, "qualifiers", "key", QualifierDef)
    return Ontology(
        name=normalize(data["name"]),
        version=normalize(data["version"]),
        relations=tuple(relations),
        qualifiers=tuple(qualifiers),
    )


def _entries(data: dict, fld: str, label: str, cls) -> list:
    raw = data.get(fld)
    if not isinstance(raw, list):
        raise SchemaViolation(fld, "missing or not an array")
    out = []
    for i, entry in enumerate(raw):
        where = f"{fld}[{i}]"
        if not isinstance(entry, dict):
            raise SchemaViolation(where, "entry must be an object")
        values = []
        for part in (label, "description"):
            value = entry.get(part)
            if not isinstance(value, str) or not normalize(value):
                raise SchemaViolation(f"{where}.{part}", "missing or empty")
            values.append(normalize(value))
        out.append(cls(*values))
    return out


def ontology_to_dict(ont: Ontology) -> dict:
    return {
        "name": ont.name,
        "version": ont.version,
        "relations": [{"name": r.name, "description": r.description} for r in ont.relations],
        "qualifiers": [{"key": q.key, "description": q.description} for q in ont.qualifiers],
    }


def dumps_ontology(ont: Ontology) -> str:
    return json.dumps(ontology_to_dict(ont), ensure_ascii=False, indent=2) + "\n"


def ontology_digest(ont: Ontology) -> str:
    canon = json.dumps(ontology_to_dict(ont), ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def load_ontology(path: str | Path) -> Ontology:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FileUnreadable(path, str(exc)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"line {exc.lineno}", f"invalid JSON: {exc.msg}") from exc
    return ontology_from_dict(data)


def default_ontology_path() -> Path:
    return Path(str(resources.files("hrex") / "data" / DEFAULT_ONTOLOGY))


def default_ontology() -> Ontology:
    """The shipped HyperRED ontology (62 relations, 44 qualifiers)."""
    return load_ontology(default_ontology_path())
