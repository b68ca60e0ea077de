"""Zero-shot prompt assembly from the ontology, one worked example, and the output grammar."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import EmptySentence, ExemplarUnparseable, FileUnreadable, SchemaViolation
from .facts import normalize
from .ontology import Ontology
from .parser import parse_completion

SLOT = "{SENTENCE}"
DEFAULT_EXEMPLAR = "exemplar.json"

RELATIONS_HEADER = "## Relations"
QUALIFIERS_HEADER = "## Qualifiers"

TASK_TEXT = """\
You extract hyper-relational facts from one sentence.
A hyper-relational fact is a triple of head entity, relation and tail entity, plus optional qualifiers. \
A qualifier is a key: value pair that adds context such as a time, place, role or quantity to the whole triple, \
not to a single entity.

Entities are things the sentence mentions by name or value, for example a person, country, city, organization, \
type of document, creative work, event, date or quantity. Copy entity text exactly as it appears in the sentence.

Relations connect a head entity to a tail entity. Use only the relation names listed below; \
each line gives a name, a colon and what the relation means.

Qualifiers refine a triple. Each qualifier is written as key: value, where the key is one of the qualifier \
names listed below and the value is text taken from the sentence. For example, a person's degree finished \
in 1991 gets the qualifier end time: 1991."""

FORMAT_GRAMMAR = """\
## Output format
Write one fact per line and nothing else:
(head | relation | tail) [qualifier key: value; qualifier key: value]
- head and tail are entity texts copied from the sentence.
- relation is exactly one relation name from the list.
- the bracketed qualifier block is optional; leave it out when no qualifier applies.
- each qualifier key is exactly one qualifier name from the list.
- put a backslash before any | ; : ( ) [ ] character that belongs to an entity or value.
- if the sentence states no fact, write nothing."""

USER_TEMPLATE = "Sentence: {SENTENCE}\nFacts:"


@dataclass(frozen=True)
class CoTExemplar:
    context_sentence: str
    reasoning: str
    expected_output: str

    def to_dict(self) -> dict:
        return {
            "context_sentence": self.context_sentence,
            "reasoning": self.reasoning,
            "expected_output": self.expected_output,
        }


@dataclass(frozen=True)
class PromptSpec:
    system_text: str
    user_template: str
    exemplar: CoTExemplar
    format_grammar_text: str

    def __post_init__(self):
        if self.user_template.count(SLOT) != 1:
            raise ValueError(f"user template must contain exactly one {SLOT} slot")


@dataclass(frozen=True)
class RenderedPrompt:
    system_text: str
    user_text: str
    prompt_hash: str


def prompt_digest(system_text: str, user_text: str) -> str:
    payload = json.dumps([system_text, user_text], ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def load_exemplar(path: str | Path) -> CoTExemplar:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        raise FileUnreadable(path, str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"line {exc.lineno}", f"invalid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise SchemaViolation("$", "exemplar must be a JSON object")
    values = []
    for key in ("context_sentence", "reasoning", "expected_output"):
        value = data.get(key)
        if not isinstance(value, str) or not value.strip():
            raise SchemaViolation(key, "missing or empty")
        values.append(value.strip())
    return CoTExemplar(*values)


def default_exemplar_path() -> Path:
    return Path(str(resources.files("hrex") / "data" / DEFAULT_EXEMPLAR))


def default_exemplar() -> CoTExemplar:
    return load_exemplar(default_exemplar_path())


def exemplar_digest(exemplar: CoTExemplar) -> str:
    canon = json.dumps(exemplar.to_dict(), ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def build_prompt_spec(ont: Ontology, exemplar: CoTExemplar) -> PromptSpec:
    outcome = parse_completion(exemplar.expected_output, ont, strict=True)
    if outcome.diagnostics or not outcome.facts:
        problems = "; ".join(f"line {d.line_number}: {d.reason.value}" for d in outcome.diagnostics)
        raise ExemplarUnparseable(f"exemplar output does not follow the grammar ({problems or 'no facts'})")

    lines = [TASK_TEXT, "", RELATIONS_HEADER]
    lines += [f"{r.name}: {r.description}" for r in ont.relations]
    lines += ["", QUALIFIERS_HEADER]
    lines += [f"{q.key}: {q.description}" for q in ont.qualifiers]
    lines += ["", FORMAT_GRAMMAR, "", "## Example"]
    lines += [f"Sentence: {exemplar.context_sentence}", f"Reasoning: {exemplar.reasoning}", "Facts:"]
    lines += [exemplar.expected_output]
    return PromptSpec(
        system_text="\n".join(lines),
        user_template=USER_TEMPLATE,
        exemplar=exemplar,
        format_grammar_text=FORMAT_GRAMMAR,
    )


def render(spec: PromptSpec, sentence: str) -> RenderedPrompt:
    sentence = normalize(sentence)
    if not sentence:
        raise EmptySentence("sentence is empty after normalization")
    user_text = spec.user_template.replace(SLOT, sentence)
    return RenderedPrompt(spec.system_text, user_text, prompt_digest(spec.system_text, user_text))
