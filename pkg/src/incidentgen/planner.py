"""Backward-chaining planner over STRIPS-style action definitions.

Plans are found by means-ends analysis: pick an action whose add-list
achieves the goal (directly or through a derivation rule), recursively
plan its preconditions left to right while threading a simulated
situation, and append the action. A goal stack blocks circular
subgoaling and a length bound guarantees termination on any knowledge
base. Enumeration is exhaustive within the bound; selection maximizes
(quality, term order), which is deterministic.

Each plan step records the subgoal it was chosen to achieve and the
step that needed that subgoal, so a finished plan can be read backwards
as a justification chain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .kb import DerivationRule, EventDef, KnowledgeBase, Situation, fresh_event, fresh_rule
from .terms import (
    Atom,
    Compound,
    Substitution,
    Term,
    Variable,
    substitute,
    term_key,
    unify,
    variables,
)

# rule chains deeper than this are treated as unprovable rather than
# recursed into forever (cyclic rule sets)
_MAX_RULE_DEPTH = 16


class NoPlanFoundError(Exception):
    """No plan within the length bound achieves the goal."""

    def __init__(self, goal: Term, message: Optional[str] = None):
        from .terms import format_term

        self.goal = goal
        super().__init__(message or f"no plan achieves {format_term(goal)}")


class MissingDeleteFactError(Exception):
    """An effect tried to delete a fact the situation does not contain."""

    def __init__(self, fact: Term):
        from .terms import format_term

        self.fact = fact
        super().__init__(f"cannot delete absent fact {format_term(fact)}")


class UnknownScorerError(ValueError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown scorer {name!r} (choose from {sorted(SCORERS)})")


@dataclass(frozen=True)
class PlannerConfig:
    max_plan_length: int = 20
    scorer: str = "standard"

    def __post_init__(self) -> None:
        if self.max_plan_length < 1:
            raise ValueError("max_plan_length must be at least 1")


@dataclass(frozen=True)
class PlanStep:
    """One action plus the reason it is in the plan.

    ``achieves_goal`` is the subgoal this action was selected for,
    ``via_rule`` the derivation rule that connected the action's
    add-list to that subgoal (None if an add matched directly), and
    ``parent`` the later step whose precondition the subgoal is; the
    root step (parent None) achieves the plan's top-level goal.
    """

    action: Term
    achieves_goal: Term
    via_rule: Optional[DerivationRule] = None
    parent: Optional["PlanStep"] = field(default=None, repr=False)


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...]

    @property
    def actions(self) -> tuple[Term, ...]:
        return tuple(step.action for step in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class ScoredPlan:
    plan: Plan
    quality: int


def _quality_standard(plan: Plan) -> int:
    cost = 1 if any(_functor(s.action) == "evacuate" for s in plan.steps) else 0
    return 100 - 10 * len(plan.steps) - cost


def _functor(term: Term) -> str:
    return term.functor if isinstance(term, Compound) else term.name


SCORERS = {
    "standard": _quality_standard,
    # ranks every plan the same; selection then falls through to the
    # term-order tie-break, which reproduces unranked-plan behaviour
    "constant": lambda plan: 0,
}


def plan_quality(plan: Plan, scorer: str = "standard") -> int:
    try:
        fn = SCORERS[scorer]
    except KeyError:
        raise UnknownScorerError(scorer) from None
    return fn(plan)


def plan_sort_key(plan: Plan) -> tuple:
    return tuple(term_key(action) for action in plan.actions)


# ---------------------------------------------------------------- satisfied


def _may_unify(a: Term, b: Term) -> bool:
    # shallow screen before paying for a fresh rename: terms whose
    # outermost shapes already clash can never unify
    if isinstance(a, Variable) or isinstance(b, Variable):
        return True
    if isinstance(a, Atom) and isinstance(b, Atom):
        return a.name == b.name
    if isinstance(a, Compound) and isinstance(b, Compound):
        return a.functor == b.functor and len(a.args) == len(b.args)
    return False


def _satisfied_iter(
    goal: Term,
    sitn: Situation,
    rules: Sequence[DerivationRule],
    subst: Substitution,
    depth: int = _MAX_RULE_DEPTH,
) -> Iterator[Substitution]:
    for fact in sorted(sitn, key=term_key):
        extended = unify(goal, fact, subst)
        if extended is not None:
            yield extended
    if depth <= 0:
        return
    seen = subst.walk(goal)
    for rule in rules:
        if not _may_unify(seen, rule.head):
            continue
        fresh = fresh_rule(rule)
        extended = unify(goal, fresh.head, subst)
        if extended is not None:
            yield from _satisfied_seq(fresh.body, sitn, rules, extended, depth - 1)


def _satisfied_seq(
    goals: Sequence[Term],
    sitn: Situation,
    rules: Sequence[DerivationRule],
    subst: Substitution,
    depth: int,
) -> Iterator[Substitution]:
    if not goals:
        yield subst
        return
    for extended in _satisfied_iter(goals[0], sitn, rules, subst, depth):
        yield from _satisfied_seq(goals[1:], sitn, rules, extended, depth)


def iter_satisfying(
    facts: Sequence[Term],
    sitn: Situation,
    rules: Sequence[DerivationRule] = (),
    subst: Optional[Substitution] = None,
) -> Iterator[Substitution]:
    """Substitutions satisfying every fact in sequence, lazily.

    Unlike :func:`satisfied` the results are full working substitutions,
    not projections; the simulator threads them into effect application.
    """
    yield from _satisfied_seq(
        tuple(facts), sitn, rules, subst or Substitution(), _MAX_RULE_DEPTH
    )


def _project(base: Term, solutions: Iterator[Substitution]) -> list[Substitution]:
    """Restrict solutions to the query's own variables, deduplicated."""
    vs = variables(base)
    out: list[Substitution] = []
    seen: set[tuple] = set()
    for s in solutions:
        image = tuple(term_key(substitute(v, s)) for v in vs)
        if image in seen:
            continue
        seen.add(image)
        restricted = Substitution()
        for v in vs:
            value = substitute(v, s)
            if value != v:
                restricted = restricted.bind(v, value)
        out.append(restricted)
    return out


def satisfied(
    fact: Term, sitn: Situation, rules: Sequence[DerivationRule] = ()
) -> list[Substitution]:
    """All substitutions under which fact holds in the situation.

    A fact holds by direct membership or through a derivation rule
    whose body is recursively satisfied. Empty list means unsatisfied;
    a ground satisfied query yields one empty substitution.
    """
    return _project(fact, _satisfied_iter(fact, sitn, rules, Substitution()))


# ----------------------------------------------------------------- achieves


def _subset_iter(
    facts: Sequence[Term], pool: Sequence[Term], subst: Substitution
) -> Iterator[Substitution]:
    # each fact unifies with a distinct pool member; all pairings tried
    if not facts:
        yield subst
        return
    for i, candidate in enumerate(pool):
        extended = unify(facts[0], candidate, subst)
        if extended is not None:
            rest = tuple(pool[:i]) + tuple(pool[i + 1 :])
            yield from _subset_iter(facts[1:], rest, extended)


def _achieves_iter(
    event: EventDef,
    goal: Term,
    rules: Sequence[DerivationRule],
    subst: Substitution,
) -> Iterator[tuple[Substitution, Optional[DerivationRule]]]:
    for add in event.adds:
        extended = unify(goal, add, subst)
        if extended is not None:
            yield extended, None
    seen = subst.walk(goal)
    for rule in rules:
        if not _may_unify(seen, rule.head):
            continue
        fresh = fresh_rule(rule)
        extended = unify(goal, fresh.head, subst)
        if extended is None:
            continue
        for solution in _subset_iter(fresh.body, event.adds, extended):
            yield solution, rule


def achieves(
    event: EventDef, goal: Term, rules: Sequence[DerivationRule] = ()
) -> list[Substitution]:
    """Substitutions under which the event's additions reach the goal.

    Either the goal unifies with an add-list member, or a derivation
    rule's head unifies with the goal and its body unifies element-wise
    with distinct add-list members. Pass a freshly renamed event when
    the goal could share variable names with the definition.
    """
    base = Compound("+", (goal, event.head, *event.adds, *event.pcs))
    return _project(
        base, (s for s, _ in _achieves_iter(event, goal, rules, Substitution()))
    )


# ------------------------------------------------------------------ effects


def apply_effects(
    dels: Sequence[Term], adds: Sequence[Term], sitn: Situation
) -> Situation:
    """(sitn - dels) + adds over ground effect lists."""
    for fact in dels:
        if fact not in sitn:
            raise MissingDeleteFactError(fact)
    return frozenset(sitn - frozenset(dels)) | frozenset(adds)


def _remove_branches(
    dels: Sequence[Term], sitn: Situation, subst: Substitution
) -> Iterator[tuple[Situation, Substitution]]:
    # search-time deletion: delete patterns unify against situation
    # facts, and each way of pairing them up is a separate branch
    if not dels:
        yield sitn, subst
        return
    for fact in sorted(sitn, key=term_key):
        extended = unify(dels[0], fact, subst)
        if extended is not None:
            yield from _remove_branches(dels[1:], sitn - {fact}, extended)


# ----------------------------------------------------------------- planning


@dataclass
class _Rec:
    """Mutable search-time record of one chosen action."""

    id: int
    action_raw: Term
    goal_raw: Term
    via_rule: Optional[DerivationRule]
    parent_id: Optional[int]


def _plan(
    goal: Term,
    sitn: Situation,
    stack: tuple[Term, ...],
    subst: Substitution,
    budget: int,
    kb: KnowledgeBase,
    counter: Iterator[int],
) -> Iterator[tuple[list[_Rec], Situation, Substitution]]:
    # already true: one empty plan per satisfying substitution, and the
    # action case is then blocked entirely
    satisfied_any = False
    for extended in _satisfied_iter(goal, sitn, kb.rules, subst):
        satisfied_any = True
        yield [], sitn, extended
    if satisfied_any or budget <= 0:
        return
    # a goal already being pursued further up is a dead end
    for pursued in stack:
        if unify(goal, pursued, subst) is not None:
            return
    new_stack = (goal, *stack)
    seen = subst.walk(goal)
    # renaming an action's variables is the hot path; skip any action
    # whose add list cannot possibly reach the goal, directly or via a
    # rule head (roots survive renaming, so the raw lists are enough)
    via_rule_possible = any(_may_unify(seen, r.head) for r in kb.rules)
    for event in kb.actions:
        if not via_rule_possible and not any(
            _may_unify(seen, a) for a in event.adds
        ):
            continue
        fresh = fresh_event(event)
        for achieved, via_rule in _achieves_iter(fresh, goal, kb.rules, subst):
            for pre_recs, mid_sitn, mid_subst in _plan_seq(
                fresh.pcs, sitn, new_stack, achieved, budget - 1, kb, counter
            ):
                dels = [substitute(d, mid_subst) for d in fresh.dels]
                for reduced, del_subst in _remove_branches(dels, mid_sitn, mid_subst):
                    adds = frozenset(substitute(a, del_subst) for a in fresh.adds)
                    this_id = next(counter)
                    # copy records per branch: the same preconditions
                    # get re-parented under a new consumer in every
                    # alternative, and branches must not share state
                    recs = [
                        _Rec(
                            r.id,
                            r.action_raw,
                            r.goal_raw,
                            r.via_rule,
                            this_id if r.parent_id is None else r.parent_id,
                        )
                        for r in pre_recs
                    ]
                    recs.append(_Rec(this_id, fresh.head, goal, via_rule, None))
                    yield recs, reduced | adds, del_subst


def _plan_seq(
    goals: Sequence[Term],
    sitn: Situation,
    stack: tuple[Term, ...],
    subst: Substitution,
    budget: int,
    kb: KnowledgeBase,
    counter: Iterator[int],
) -> Iterator[tuple[list[_Rec], Situation, Substitution]]:
    if not goals:
        yield [], sitn, subst
        return
    for recs1, sitn1, subst1 in _plan(
        goals[0], sitn, stack, subst, budget, kb, counter
    ):
        for recs2, sitn2, subst2 in _plan_seq(
            goals[1:], sitn1, stack, subst1, budget - len(recs1), kb, counter
        ):
            yield recs1 + recs2, sitn2, subst2


def _finalize(recs: list[_Rec], subst: Substitution) -> Plan:
    by_id: dict[int, PlanStep] = {}
    # consumers sit after their precondition steps, so walking the list
    # backwards always finds the parent already built
    for rec in reversed(recs):
        parent = by_id.get(rec.parent_id) if rec.parent_id is not None else None
        by_id[rec.id] = PlanStep(
            action=substitute(rec.action_raw, subst),
            achieves_goal=substitute(rec.goal_raw, subst),
            via_rule=rec.via_rule,
            parent=parent,
        )
    return Plan(steps=tuple(by_id[rec.id] for rec in recs))


def enumerate_plans(
    goal: Term,
    sitn: Situation,
    kb: KnowledgeBase,
    cfg: Optional[PlannerConfig] = None,
) -> list[Plan]:
    """Every distinct plan achieving the goal, up to the length bound.

    Deterministic: knowledge-base declaration order drives action
    choice, term order drives fact matching, and duplicate action
    sequences are dropped keeping the first derivation.
    """
    cfg = cfg or PlannerConfig()
    counter = itertools.count(1)
    plans: list[Plan] = []
    seen: set[tuple] = set()
    for recs, _, subst in _plan(
        goal, sitn, (), Substitution(), cfg.max_plan_length, kb, counter
    ):
        plan = _finalize(recs, subst)
        key = plan_sort_key(plan)
        if key in seen:
            continue
        seen.add(key)
        plans.append(plan)
    return plans


def make_best_plan(
    goal: Term,
    sitn: Situation,
    kb: KnowledgeBase,
    cfg: Optional[PlannerConfig] = None,
) -> ScoredPlan:
    """The enumerated plan maximizing (quality, term order)."""
    cfg = cfg or PlannerConfig()
    plans = enumerate_plans(goal, sitn, kb, cfg)
    if not plans:
        raise NoPlanFoundError(goal)
    best = max(plans, key=lambda p: (plan_quality(p, cfg.scorer), plan_sort_key(p)))
    return ScoredPlan(plan=best, quality=plan_quality(best, cfg.scorer))
