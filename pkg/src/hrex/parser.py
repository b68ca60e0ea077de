"""Line-grammar parser for model completions.

Grammar, one fact per line::

    '(' field '|' field '|' field ')' [ '[' qualifier (';' qualifier)* ']' ]
    qualifier = key ':' value

A backslash escapes the next character. Unescaped parentheses inside a field
are accepted when balanced, since models rarely escape them. Lines that do not
start with '(' (after an optional list bullet) are reported as prose.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .facts import HyperFact, normalize, unescape
from .ontology import Ontology, lookup_qualifier, lookup_relation


class Severity(str, enum.Enum):
    SKIP = "skip"
    WARN = "warn"


class Reason(str, enum.Enum):
    NOT_A_FACT_LINE = "NotAFactLine"
    BAD_ARITY = "BadArity"
    EMPTY_FIELD = "EmptyField"
    MALFORMED_QUALIFIER = "MalformedQualifier"
    UNKNOWN_RELATION = "UnknownRelation"
    UNKNOWN_QUALIFIER_KEY = "UnknownQualifierKey"
    DUPLICATE_FACT = "DuplicateFact"


_WARN_REASONS = {Reason.UNKNOWN_RELATION, Reason.UNKNOWN_QUALIFIER_KEY, Reason.DUPLICATE_FACT}


@dataclass(frozen=True)
class ParseDiagnostic:
    line_number: int
    reason: Reason
    excerpt: str

    @property
    def severity(self) -> Severity:
        return Severity.WARN if self.reason in _WARN_REASONS else Severity.SKIP

    def to_dict(self) -> dict:
        return {
            "line": self.line_number,
            "severity": self.severity.value,
            "reason": self.reason.value,
            "excerpt": self.excerpt,
        }


@dataclass(frozen=True)
class ParseOutcome:
    facts: tuple[HyperFact, ...]
    fact_lines: tuple[int, ...]
    diagnostics: tuple[ParseDiagnostic, ...]

    @property
    def skipped(self) -> list[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.SKIP]


_BULLET = re.compile(r"^(?:[-*•]|\d{1,3}[.)])\s+")
_EXCERPT_LEN = 200


def _excerpt(line: str) -> str:
    line = line.strip()
    return line if len(line) <= _EXCERPT_LEN else line[: _EXCERPT_LEN - 3] + "..."


def _strip_bullet(line: str) -> str:
    line = line.strip()
    return _BULLET.sub("", line, count=1)


def _split_unescaped(text: str, sep: str, maxsplit: int = -1) -> list[str]:
    parts, buf = [], []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            buf.append(text[i : i + 2])
            i += 2
            continue
        if ch == sep and maxsplit != 0:
            parts.append("".join(buf))
            buf = []
            maxsplit -= 1
        else:
            buf.append(ch)
        i += 1
    parts.append("".join(buf))
    return parts


def _close_paren(text: str) -> int:
    """Index of the ')' closing the '(' at position 0, or -1."""
    depth = 0
    i = 1
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            i += 2
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            if depth == 0:
                return i
            depth -= 1
        i += 1
    return -1


def _ends_unescaped(text: str, ch: str) -> bool:
    if not text.endswith(ch):
        return False
    n = len(text) - 1
    backslashes = 0
    while n > 0 and text[n - 1] == "\\":
        backslashes += 1
        n -= 1
    return backslashes % 2 == 0


def _field(raw: str) -> str:
    return normalize(unescape(raw))


def parse_fact_line(line: str, line_number: int = 1) -> HyperFact | ParseDiagnostic:
    body = _strip_bullet(line)

    def diag(reason: Reason) -> ParseDiagnostic:
        return ParseDiagnostic(line_number, reason, _excerpt(line))

    if not body.startswith("("):
        return diag(Reason.NOT_A_FACT_LINE)
    end = _close_paren(body)
    if end < 0:
        return diag(Reason.BAD_ARITY)
    fields = [_field(f) for f in _split_unescaped(body[1:end], "|")]
    if len(fields) != 3:
        return diag(Reason.BAD_ARITY)
    if not all(fields):
        return diag(Reason.EMPTY_FIELD)

    rest = body[end + 1 :].strip()
    qualifiers = []
    if rest:
        if not (rest.startswith("[") and _ends_unescaped(rest, "]")):
            return diag(Reason.MALFORMED_QUALIFIER)
        inner = rest[1:-1]
        if inner.strip():
            for chunk in _split_unescaped(inner, ";"):
                kv = _split_unescaped(chunk, ":", maxsplit=1)
                if len(kv) != 2:
                    return diag(Reason.MALFORMED_QUALIFIER)
                key, value = _field(kv[0]), _field(kv[1])
                if not key or not value:
                    return diag(Reason.EMPTY_FIELD)
                qualifiers.append((key, value))
    return HyperFact.build(fields[0], fields[1], fields[2], qualifiers)


def parse_completion(raw: str, ont: Ontology | None = None, strict: bool = False) -> ParseOutcome:
    """Parse every line of ``raw``; never raises.

    With an ontology, unknown relations and qualifier keys produce warnings.
    In strict mode such facts are dropped, otherwise they are kept.
    Duplicate facts are kept once, later copies get a warning.
    """
    facts: list[HyperFact] = []
    fact_lines: list[int] = []
    diagnostics: list[ParseDiagnostic] = []
    seen: set[HyperFact] = set()

    for number, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        result = parse_fact_line(line, number)
        if isinstance(result, ParseDiagnostic):
            diagnostics.append(result)
            continue
        if ont is not None:
            unknown = []
            if lookup_relation(ont, result.relation) is None:
                unknown.append(Reason.UNKNOWN_RELATION)
            if any(lookup_qualifier(ont, q.key) is None for q in result.qualifiers):
                unknown.append(Reason.UNKNOWN_QUALIFIER_KEY)
            diagnostics.extend(ParseDiagnostic(number, r, _excerpt(line)) for r in unknown)
            if unknown and strict:
                continue
        if result in seen:
            diagnostics.append(ParseDiagnostic(number, Reason.DUPLICATE_FACT, _excerpt(line)))
            continue
        seen.add(result)
        facts.append(result)
        fact_lines.append(number)

    return ParseOutcome(tuple(facts), tuple(fact_lines), tuple(diagnostics))
