"""Knowledge-base model: events, derivation rules, goal revisions.

A knowledge base bundles everything the planner and simulator need for
one domain: action and happening definitions with STRIPS-style effects,
Horn rules deriving facts from a situation, goal revision rules fired
by exogenous events, an initial situation, and a goal. Instances are
immutable; the DSL parser in :mod:`incidentgen.dsl` builds them.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Union

from .terms import Compound, Term, rename_fresh_all, unify

Situation = frozenset  # of ground Term facts

SourcePos = tuple[int, int]  # line, column; 1-based


class UnknownEventError(Exception):
    """No event definition matches the given event term."""

    def __init__(self, event: Term, message: Optional[str] = None):
        from .terms import format_term

        self.event = event
        super().__init__(message or f"no event definition matches {format_term(event)}")


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class Slot:
    var: str


Segment = Union[Literal, Slot]


@dataclass(frozen=True)
class TextTemplate:
    """A narration template with ``{Var}`` placeholders."""

    raw: str
    segments: tuple[Segment, ...]

    @classmethod
    def parse(cls, raw: str) -> "TextTemplate":
        segments: list[Segment] = []
        buf: list[str] = []
        i = 0
        while i < len(raw):
            ch = raw[i]
            if ch == "{":
                end = raw.find("}", i + 1)
                if end < 0:
                    raise ValueError("unclosed '{' in template")
                name = raw[i + 1 : end].strip()
                if not name:
                    raise ValueError("empty placeholder in template")
                if buf:
                    segments.append(Literal("".join(buf)))
                    buf = []
                segments.append(Slot(name))
                i = end + 1
            elif ch == "}":
                raise ValueError("unmatched '}' in template")
            else:
                buf.append(ch)
                i += 1
        if buf:
            segments.append(Literal("".join(buf)))
        return cls(raw, tuple(segments))

    def slot_names(self) -> list[str]:
        return [seg.var for seg in self.segments if isinstance(seg, Slot)]

    def render(self, values: Mapping[str, str]) -> str:
        parts = []
        for seg in self.segments:
            parts.append(seg.text if isinstance(seg, Literal) else values[seg.var])
        return "".join(parts)


@dataclass(frozen=True)
class EventDef:
    """An action (planned) or happening (exogenous) definition."""

    kind: str  # "action" or "happening"
    head: Term
    pcs: tuple[Term, ...]
    dels: tuple[Term, ...]
    adds: tuple[Term, ...]
    template: Optional[TextTemplate] = None
    pos: Optional[SourcePos] = field(default=None, compare=False)

    @property
    def name(self) -> str:
        return self.head.functor if isinstance(self.head, Compound) else self.head.name

    @property
    def arity(self) -> int:
        return len(self.head.args) if isinstance(self.head, Compound) else 0


@dataclass(frozen=True)
class DerivationRule:
    """Horn rule: head holds in a situation if every body goal does."""

    head: Term
    body: tuple[Term, ...]
    pos: Optional[SourcePos] = field(default=None, compare=False)


@dataclass(frozen=True)
class RevisionRule:
    """Replaces a goal matching ``old`` with ``new`` when ``trigger`` holds."""

    old: Term
    trigger: Term
    new: Term
    pos: Optional[SourcePos] = field(default=None, compare=False)


@dataclass(frozen=True)
class KnowledgeBase:
    events: tuple[EventDef, ...] = ()
    rules: tuple[DerivationRule, ...] = ()
    revisions: tuple[RevisionRule, ...] = ()
    init: Situation = frozenset()
    goal: Optional[Term] = None

    @property
    def actions(self) -> tuple[EventDef, ...]:
        return tuple(e for e in self.events if e.kind == "action")

    @property
    def happenings(self) -> tuple[EventDef, ...]:
        return tuple(e for e in self.events if e.kind == "happening")

    def match_event(self, term: Term, kind: Optional[str] = None):
        """First event definition whose head unifies with ``term``.

        Returns ``(EventDef, Substitution)`` or None. The definition is
        returned as declared, variable names intact, so callers can tie
        template slot names to the bindings; pass a ground ``term`` to
        avoid capturing its variables.
        """
        for event in self.events:
            if kind is not None and event.kind != kind:
                continue
            subst = unify(event.head, term)
            if subst is not None:
                return event, subst
        return None


def fresh_event(event: EventDef) -> EventDef:
    """Copy an event with its variables renamed apart."""
    n_pcs, n_dels = len(event.pcs), len(event.dels)
    renamed = rename_fresh_all([event.head, *event.pcs, *event.dels, *event.adds])
    head = renamed[0]
    pcs = tuple(renamed[1 : 1 + n_pcs])
    dels = tuple(renamed[1 + n_pcs : 1 + n_pcs + n_dels])
    adds = tuple(renamed[1 + n_pcs + n_dels :])
    return EventDef(event.kind, head, pcs, dels, adds, event.template, event.pos)


def fresh_rule(rule: DerivationRule) -> DerivationRule:
    renamed = rename_fresh_all([rule.head, *rule.body])
    return DerivationRule(renamed[0], tuple(renamed[1:]), rule.pos)


def fresh_revision(rule: RevisionRule) -> RevisionRule:
    old, trigger, new = rename_fresh_all([rule.old, rule.trigger, rule.new])
    return RevisionRule(old, trigger, new, rule.pos)


def data_path(name: str) -> Path:
    """Path of a bundled data file (knowledge bases, grammars)."""
    return Path(str(importlib.resources.files(__package__) / "data" / name))


def aviation_kb_path() -> Path:
    return data_path("aviation.kb")
