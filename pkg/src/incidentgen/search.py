"""Forward search over action applications, solo and adversarial.

Where the backward planner reasons from the goal, these helpers reason
from the situation: apply every applicable action, score the results,
and chase the most promising one (best-first). The default scoring
function delegates back to the planner, rating a situation by how
short the shortest remaining plan is.

The adversarial loop plays a protagonist against an antagonist with a
private action repertoire. Turns alternate strictly, protagonist
first; the protagonist replans each turn toward its goal, and the
antagonist plays whichever of its applicable actions leaves the
protagonist worst off (the exact zero-sum counter). An antagonist
with nothing applicable passes.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Sequence

from .kb import EventDef, KnowledgeBase, Situation, fresh_event
from .planner import (
    MissingDeleteFactError,
    NoPlanFoundError,
    Plan,
    PlannerConfig,
    PlanStep,
    apply_effects,
    enumerate_plans,
    iter_satisfying,
)
from .simulator import GoalEntry, Trace, apply_event
from .terms import Term, ground, substitute, term_key

# score for situations the goal is unreachable from; any reachable
# situation must rank above it
_UNREACHABLE = -(10**6)


class StalemateError(Exception):
    """The adversarial loop hit its turn bound with the goal unmet."""

    def __init__(self, turns: int):
        self.turns = turns
        super().__init__(f"stalemate: goal not reached after {turns} turns")


@lru_cache(maxsize=4096)
def plan_distance(
    sitn: Situation,
    goal: Term,
    kb: KnowledgeBase,
    max_plan_length: int = 20,
) -> int:
    """Negated length of the shortest plan from sitn to goal.

    0 when the goal already holds, a large negative sentinel when no
    plan exists within the length bound. Cached: search revisits the
    same situations constantly, and every argument is immutable.
    """
    plans = enumerate_plans(
        goal, sitn, kb, PlannerConfig(max_plan_length=max_plan_length)
    )
    if not plans:
        return _UNREACHABLE
    return -min(len(p) for p in plans)


EVALUATIONS = {
    "plan_distance": plan_distance,
}


@dataclass(frozen=True)
class SearchConfig:
    """max_depth bounds plan length in forward_search and total turns
    in adversarial_story."""

    max_depth: int = 10
    evaluation: str = "plan_distance"

    def __post_init__(self) -> None:
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.evaluation not in EVALUATIONS:
            raise ValueError(
                f"unknown evaluation {self.evaluation!r} "
                f"(choose from {sorted(EVALUATIONS)})"
            )


def _applicable_actions(
    sitn: Situation, kb: KnowledgeBase
) -> list[tuple[Term, Situation]]:
    """Ground action instances applicable in sitn, with their results.

    Declaration order by definition, term order within one definition;
    one entry per distinct instance.
    """
    out: list[tuple[Term, Situation]] = []
    for event in kb.actions:
        fresh = fresh_event(event)
        found: list[tuple[Term, Situation]] = []
        seen: set[tuple] = set()
        for solution in iter_satisfying(fresh.pcs, sitn, kb.rules):
            instance = substitute(fresh.head, solution)
            if not ground(instance):
                continue
            key = term_key(instance)
            if key in seen:
                continue
            seen.add(key)
            dels = [substitute(d, solution) for d in fresh.dels]
            adds = [substitute(a, solution) for a in fresh.adds]
            try:
                post = apply_effects(dels, adds, sitn)
            except MissingDeleteFactError:
                continue
            found.append((instance, post))
        found.sort(key=lambda pair: term_key(pair[0]))
        out.extend(found)
    return out


def forward_search(
    sitn: Situation,
    goal: Term,
    kb: KnowledgeBase,
    cfg: Optional[SearchConfig] = None,
) -> Plan:
    """Best-first forward search for an action sequence reaching goal.

    The frontier is ordered by the configured evaluation of each
    situation, ties broken by insertion order, so results are
    deterministic. Sequences longer than max_depth are not expanded.
    """
    cfg = cfg or SearchConfig()
    evaluate = EVALUATIONS[cfg.evaluation]
    counter = itertools.count()
    heap: list[tuple[int, int, Situation, tuple[Term, ...]]] = [
        (-evaluate(sitn, goal, kb), next(counter), sitn, ())
    ]
    visited = {sitn}
    while heap:
        _, _, here, actions = heapq.heappop(heap)
        if next(iter_satisfying((goal,), here, kb.rules), None) is not None:
            return Plan(
                steps=tuple(PlanStep(action=a, achieves_goal=goal) for a in actions)
            )
        if len(actions) >= cfg.max_depth:
            continue
        for instance, post in _applicable_actions(here, kb):
            if post in visited:
                continue
            visited.add(post)
            heapq.heappush(
                heap,
                (
                    -evaluate(post, goal, kb),
                    next(counter),
                    post,
                    actions + (instance,),
                ),
            )
    raise NoPlanFoundError(goal, f"no plan within depth {cfg.max_depth}")


def adversarial_story(
    kb: KnowledgeBase,
    hero_goal: Term,
    antagonist_actions: Sequence[EventDef],
    cfg: Optional[SearchConfig] = None,
) -> Trace:
    """Two agents alternate from kb.init until hero_goal holds.

    The protagonist runs forward_search each turn and plays the first
    action of the found plan (raising NoPlanFoundError if there is
    none); the antagonist plays its applicable action minimizing the
    protagonist's evaluation, term order breaking ties, or passes.
    Antagonist definitions must not collide with the knowledge base's
    own actions. Passes leave no trace step, so the returned trace
    holds actions only; antagonist steps carry no justification.
    """
    cfg = cfg or SearchConfig()
    antagonist_actions = tuple(antagonist_actions)
    own = {(e.name, e.arity) for e in kb.actions}
    clash = sorted(
        f"{e.name}/{e.arity}"
        for e in antagonist_actions
        if (e.name, e.arity) in own
    )
    if clash:
        raise ValueError(
            f"antagonist actions collide with the knowledge base's: {', '.join(clash)}"
        )
    evaluate = EVALUATIONS[cfg.evaluation]
    # matching covers both repertoires; planning and scoring only the hero's
    full_kb = replace(kb, events=(*kb.events, *antagonist_actions))
    antag_kb = replace(kb, events=antagonist_actions)
    sitn = kb.init
    steps = []
    turn = 0
    while True:
        if next(iter_satisfying((hero_goal,), sitn, kb.rules), None) is not None:
            break
        if turn >= cfg.max_depth:
            raise StalemateError(turn)
        if turn % 2 == 0:
            plan = forward_search(sitn, hero_goal, kb, cfg)
            step = plan.steps[0]
            rec = apply_event(
                step.action,
                "action",
                sitn,
                full_kb,
                index=len(steps),
                justification=step,
                steps=steps,
            )
            steps.append(rec)
            sitn = rec.post_situation
        else:
            candidates = _applicable_actions(sitn, antag_kb)
            if candidates:
                instance, _ = min(
                    candidates,
                    key=lambda pair: (
                        evaluate(pair[1], hero_goal, kb),
                        term_key(pair[0]),
                    ),
                )
                rec = apply_event(
                    instance, "action", sitn, full_kb, index=len(steps), steps=steps
                )
                steps.append(rec)
                sitn = rec.post_situation
        turn += 1
    return Trace(
        steps=tuple(steps),
        goal_history=(GoalEntry(0, hero_goal, "initial"),),
        replans=(),
        initial_situation=kb.init,
        rng_after=None,
    )
