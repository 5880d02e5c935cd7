"""Story grammars: productions expanded into event-token sequences.

A grammar file holds productions ``head --> item, item, ... .`` where
each item is either a nonterminal term or a bracketed terminal list:

    incident --> start_of_flight, problem(P), response(P).
    start_of_flight --> [taxi, takeoff].
    response(broken(transponder)) --> return_to_ground.

Alternatives are separate productions for the same head. Heads may
carry parameters; unification threads them across sibling items, so
problem(P) and response(P) agree on what went wrong. ``[]`` is an
empty terminal list and ``#`` starts a comment.

Expansion is leftmost depth-first. Sampling picks among the unifying
productions at random and fails hard on a dead end; enumeration
backtracks through every alternative and silently prunes dead or
too-deep branches.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional, Union

from .dsl import Diagnostic, ParseError, _ParseFail, _read_term, _tokenize, _TokenStream
from .kb import SourcePos
from .rng import RngState, rnd_member
from .terms import (
    Atom,
    Compound,
    Substitution,
    Term,
    Variable,
    format_term,
    rename_fresh_all,
    substitute,
    term_key,
    unify,
)

DEFAULT_MAX_DEPTH = 16


class UnknownNonterminalError(Exception):
    """The requested start symbol has no productions at all."""

    def __init__(self, symbol: Term):
        self.symbol = symbol
        super().__init__(f"no productions for {format_term(symbol)}")


class DeadEndError(Exception):
    """A nonterminal was reached that no production unifies with."""

    def __init__(self, symbol: Term):
        self.symbol = symbol
        super().__init__(f"dead end at {format_term(symbol)}: no production unifies")


class DepthExceededError(Exception):
    def __init__(self, symbol: Term, depth: int):
        self.symbol = symbol
        self.depth = depth
        super().__init__(
            f"expansion of {format_term(symbol)} exceeded depth {depth}"
        )


@dataclass(frozen=True)
class TerminalList:
    items: tuple[Term, ...]


@dataclass(frozen=True)
class NonterminalRef:
    term: Term


BodyItem = Union[TerminalList, NonterminalRef]


@dataclass(frozen=True)
class Production:
    head: Term
    body: tuple[BodyItem, ...]
    pos: Optional[SourcePos] = field(default=None, compare=False)


def _signature(term: Term) -> tuple[str, int]:
    if isinstance(term, Compound):
        return (term.functor, len(term.args))
    if isinstance(term, Atom):
        return (term.name, 0)
    return ("", -1)  # a bare variable matches no production head


@dataclass(frozen=True)
class Grammar:
    productions: tuple[Production, ...]

    def has_symbol(self, symbol: Term) -> bool:
        sig = _signature(symbol)
        return any(_signature(p.head) == sig for p in self.productions)


def parse_grammar(text: str, filename: str = "<grammar>") -> Grammar:
    """Parse grammar text, reporting every problem found."""
    diags: list[Diagnostic] = []
    tokens = _tokenize(text, filename, diags)
    ts = _TokenStream(tokens, filename)
    productions: list[Production] = []
    while ts.peek().kind != "EOF":
        start = ts.peek()
        anon = itertools.count(1)
        try:
            head = _read_term(ts, anon, diags)
            if isinstance(head, Variable):
                ts.fail(start, "production head must be an atom or a compound term")
            ts.expect_punct("-->")
            body: list[BodyItem] = []
            while True:
                if ts.at_punct("["):
                    ts.advance()
                    items: list[Term] = []
                    if not ts.at_punct("]"):
                        items.append(_read_term(ts, anon, diags))
                        while ts.at_punct(","):
                            ts.advance()
                            items.append(_read_term(ts, anon, diags))
                    ts.expect_punct("]")
                    body.append(TerminalList(tuple(items)))
                else:
                    body.append(NonterminalRef(_read_term(ts, anon, diags)))
                if ts.at_punct(","):
                    ts.advance()
                    continue
                ts.expect_punct(".")
                break
            productions.append(Production(head, tuple(body), pos=(start.line, start.col)))
        except _ParseFail as err:
            diags.append(err.diagnostic)
            while ts.peek().kind != "EOF":
                if ts.advance().value == ".":
                    break
    if any(d.severity == "error" for d in diags):
        raise ParseError(diags)
    return Grammar(tuple(productions))


def load_grammar(path) -> Grammar:
    path = Path(path)
    return parse_grammar(path.read_text(), filename=str(path))


def _fresh_production(p: Production) -> tuple[Term, tuple[BodyItem, ...]]:
    flat: list[Term] = [p.head]
    for item in p.body:
        flat.extend(item.items if isinstance(item, TerminalList) else (item.term,))
    renamed = rename_fresh_all(flat)
    head = renamed[0]
    body: list[BodyItem] = []
    i = 1
    for item in p.body:
        if isinstance(item, TerminalList):
            n = len(item.items)
            body.append(TerminalList(tuple(renamed[i : i + n])))
            i += n
        else:
            body.append(NonterminalRef(renamed[i]))
            i += 1
    return head, tuple(body)


def _expand_once(
    grammar: Grammar,
    symbol: Term,
    rng: RngState,
    depth: int,
    subst: Substitution,
) -> tuple[list[Term], Substitution, RngState]:
    if depth <= 0:
        raise DepthExceededError(substitute(symbol, subst), depth)
    candidates: list[tuple[Term, tuple[BodyItem, ...], Substitution]] = []
    for p in grammar.productions:
        head, body = _fresh_production(p)
        extended = unify(head, symbol, subst)
        if extended is not None:
            candidates.append((head, body, extended))
    if not candidates:
        raise DeadEndError(substitute(symbol, subst))
    (_, body, extended), rng = rnd_member(candidates, rng)
    tokens: list[Term] = []
    for item in body:
        if isinstance(item, TerminalList):
            tokens.extend(item.items)
        else:
            sub_tokens, extended, rng = _expand_once(
                grammar, item.term, rng, depth - 1, extended
            )
            tokens.extend(sub_tokens)
    return tokens, extended, rng


def expand(
    grammar: Grammar,
    symbol: Term,
    rng: RngState,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> list[Term]:
    """One random expansion of symbol into a terminal sequence.

    Leftmost depth-first; each nonterminal picks among its unifying
    productions with one random draw and never backtracks, so an
    elliptical grammar can raise DeadEndError.
    """
    if not grammar.has_symbol(symbol):
        raise UnknownNonterminalError(symbol)
    tokens, subst, _ = _expand_once(grammar, symbol, rng, max_depth, Substitution())
    return [substitute(t, subst) for t in tokens]


def _enumerate(
    grammar: Grammar,
    symbol: Term,
    depth: int,
    subst: Substitution,
    on_dead: Optional[Callable[[Term], None]],
) -> Iterator[tuple[list[Term], Substitution]]:
    if depth <= 0:
        return
    matched = False
    for p in grammar.productions:
        head, body = _fresh_production(p)
        extended = unify(head, symbol, subst)
        if extended is None:
            continue
        matched = True
        yield from _enumerate_body(grammar, body, depth, extended, on_dead)
    if not matched and on_dead is not None:
        on_dead(substitute(symbol, subst))


def _enumerate_body(
    grammar: Grammar,
    items: tuple[BodyItem, ...],
    depth: int,
    subst: Substitution,
    on_dead: Optional[Callable[[Term], None]],
) -> Iterator[tuple[list[Term], Substitution]]:
    if not items:
        yield [], subst
        return
    first, rest = items[0], items[1:]
    if isinstance(first, TerminalList):
        for tokens, extended in _enumerate_body(grammar, rest, depth, subst, on_dead):
            yield [*first.items, *tokens], extended
    else:
        for tokens1, s1 in _enumerate(grammar, first.term, depth - 1, subst, on_dead):
            for tokens2, s2 in _enumerate_body(grammar, rest, depth, s1, on_dead):
                yield tokens1 + tokens2, s2


def enumerate_expansions(
    grammar: Grammar,
    symbol: Term,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> list[list[Term]]:
    """Every complete expansion of symbol within the depth bound.

    Dead and too-deep branches are pruned; the result is duplicate-free
    in a deterministic (production declaration) order.
    """
    if not grammar.has_symbol(symbol):
        raise UnknownNonterminalError(symbol)
    out: list[list[Term]] = []
    seen: set[tuple] = set()
    for tokens, subst in _enumerate(grammar, symbol, max_depth, Substitution(), None):
        resolved = [substitute(t, subst) for t in tokens]
        key = tuple(term_key(t) for t in resolved)
        if key not in seen:
            seen.add(key)
            out.append(resolved)
    return out


def find_dead_ends(
    grammar: Grammar,
    symbol: Term,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> list[Term]:
    """Nonterminal instances reachable from symbol that no production
    unifies with, in term order."""
    if not grammar.has_symbol(symbol):
        raise UnknownNonterminalError(symbol)
    dead: set[Term] = set()
    for _ in _enumerate(grammar, symbol, max_depth, Substitution(), dead.add):
        pass
    return sorted(dead, key=term_key)
