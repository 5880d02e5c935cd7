"""Step-wise plan execution with stochastic happening injection.

The simulator walks the current plan one action at a time. Before each
action it may inject a happening: either the injection schedule names
one for this step, or a probability draw fires and a random applicable
happening is chosen. After a happening the goal is reassessed against
the revision rules and a fresh best plan replaces the remainder of the
old one. Everything that occurs is recorded in a Trace.

Randomness is threaded functionally (see :mod:`incidentgen.rng`), so a
given configuration always reproduces the same trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .kb import KnowledgeBase, Situation, UnknownEventError, fresh_event, fresh_revision
from .planner import (
    NoPlanFoundError,
    PlannerConfig,
    PlanStep,
    ScoredPlan,
    apply_effects,
    iter_satisfying,
    make_best_plan,
)
from .rng import RngState, maybe, rnd_member
from .terms import Substitution, Term, format_term, substitute, term_key, unify, variables


class PreconditionViolationError(Exception):
    """A plan action's preconditions no longer hold (stale plan)."""

    def __init__(self, action: Term, missing: Term, steps: Sequence["TraceStep"] = ()):
        self.action = action
        self.missing = missing
        self.steps = tuple(steps)
        super().__init__(
            f"precondition {format_term(missing)} of {format_term(action)} "
            f"does not hold (after {len(self.steps)} executed steps)"
        )


class InvalidInjectionError(Exception):
    """An injection schedule entry names an inapplicable happening."""


@dataclass(frozen=True)
class SimConfig:
    happening_prob: float = 0.3
    max_happenings: int = 1
    rng: RngState = field(default_factory=RngState.table)
    injection_schedule: tuple[tuple[int, Term], ...] = ()
    planner: PlannerConfig = field(default_factory=PlannerConfig)

    def __post_init__(self) -> None:
        if not 0.0 <= self.happening_prob <= 1.0:
            raise ValueError("happening_prob must lie in [0, 1]")
        if self.max_happenings < 0:
            raise ValueError("max_happenings must be nonnegative")


@dataclass(frozen=True)
class GoalEntry:
    step_index: int
    goal: Term
    reason: str  # "initial" or "revised"
    trigger: Optional[Term] = None


@dataclass(frozen=True)
class Replan:
    step_index: int
    plan: ScoredPlan


@dataclass(frozen=True)
class TraceStep:
    index: int
    event: Term
    kind: str  # "action" or "happening"
    pre_situation: Situation
    post_situation: Situation
    justification: Optional[PlanStep] = None
    bindings: Substitution = field(default_factory=Substitution)


@dataclass(frozen=True)
class Trace:
    steps: tuple[TraceStep, ...]
    goal_history: tuple[GoalEntry, ...]
    replans: tuple[Replan, ...]
    initial_situation: Situation
    rng_after: Optional[RngState] = None

    @property
    def final_situation(self) -> Situation:
        if self.steps:
            return self.steps[-1].post_situation
        return self.initial_situation


def applicable_happenings(sitn: Situation, kb: KnowledgeBase) -> list[Term]:
    """Ground happening instances whose preconditions hold.

    Ordered by knowledge-base declaration, then term order among the
    instantiations of one definition.
    """
    out: list[Term] = []
    for event in kb.happenings:
        fresh = fresh_event(event)
        instances = {
            substitute(fresh.head, s)
            for s in iter_satisfying(fresh.pcs, sitn, kb.rules)
        }
        out.extend(sorted(instances, key=term_key))
    return out


def revise_goal(
    sitn: Situation, goal: Term, kb: KnowledgeBase
) -> tuple[Term, Optional[Term]]:
    """Reassess a goal after the situation changed unexpectedly.

    The first revision rule (in declared order) whose pattern unifies
    with the goal and whose trigger holds rewrites the goal; the ground
    trigger instance is returned alongside. No match returns the goal
    unchanged with None.
    """
    for rule in kb.revisions:
        fresh = fresh_revision(rule)
        bound = unify(fresh.old, goal)
        if bound is None:
            continue
        solution = next(iter_satisfying([fresh.trigger], sitn, kb.rules, bound), None)
        if solution is None:
            continue
        return substitute(fresh.new, solution), substitute(fresh.trigger, solution)
    return goal, None


def _first_missing(
    pcs: Sequence[Term], sitn: Situation, kb: KnowledgeBase, subst: Substitution
) -> Term:
    # greedy scan for the message only: the first precondition with no
    # solution under the bindings accumulated so far
    for pc in pcs:
        extended = next(iter_satisfying([pc], sitn, kb.rules, subst), None)
        if extended is None:
            return substitute(pc, subst)
        subst = extended
    return substitute(pcs[-1], subst)


def apply_event(
    event: Term,
    kind: str,
    sitn: Situation,
    kb: KnowledgeBase,
    index: int = 0,
    justification: Optional[PlanStep] = None,
    steps: Sequence[TraceStep] = (),
) -> TraceStep:
    """Execute one ground event against a situation.

    Verifies the matching definition's preconditions (first satisfying
    substitution in deterministic order binds any open variables),
    applies its effects, and returns the finished trace step.
    """
    match = kb.match_event(event, kind=kind)
    if match is None:
        raise UnknownEventError(event)
    event_def, head_subst = match
    solution = next(iter_satisfying(event_def.pcs, sitn, kb.rules, head_subst), None)
    if solution is None:
        missing = _first_missing(event_def.pcs, sitn, kb, head_subst)
        raise PreconditionViolationError(event, missing, steps)
    dels = [substitute(d, solution) for d in event_def.dels]
    adds = [substitute(a, solution) for a in event_def.adds]
    post = apply_effects(dels, adds, sitn)
    bindings = Substitution()
    for v in {v for t in (event_def.head, *event_def.pcs) for v in variables(t)}:
        value = substitute(v, solution)
        if value != v:
            bindings = bindings.bind(v, value)
    return TraceStep(
        index=index,
        event=event,
        kind=kind,
        pre_situation=sitn,
        post_situation=post,
        justification=justification,
        bindings=bindings,
    )


def execute_plan(
    plan: ScoredPlan,
    sitn: Situation,
    goal: Term,
    cfg: Optional[SimConfig],
    kb: KnowledgeBase,
) -> Trace:
    """Run a plan to completion, injecting and reacting to happenings.

    Per step, in order: if happenings are still permitted and either
    the schedule names this step or a probability draw fires and some
    happening is applicable, that happening occurs, the goal is
    reassessed, and the plan is rebuilt; otherwise the next plan action
    executes after its preconditions are re-verified.
    """
    cfg = cfg or SimConfig()
    schedule: dict[int, Term] = {}
    for idx, term in cfg.injection_schedule:
        if idx in schedule:
            raise InvalidInjectionError(f"duplicate injection index {idx}")
        schedule[idx] = term
    rng = cfg.rng
    budget = cfg.max_happenings
    current_goal = goal
    queue = list(plan.plan.steps)
    steps: list[TraceStep] = []
    goal_history = [GoalEntry(0, goal, "initial")]
    replans: list[Replan] = []
    fired: set[int] = set()

    while queue:
        index = len(steps)
        happening: Optional[Term] = None
        if budget > 0:
            scheduled = schedule.get(index)
            if scheduled is not None:
                candidates = [
                    h
                    for h in applicable_happenings(sitn, kb)
                    if unify(h, scheduled) is not None
                ]
                if not candidates:
                    raise InvalidInjectionError(
                        f"scheduled happening {format_term(scheduled)} is not "
                        f"applicable at step {index}"
                    )
                happening = candidates[0]
                fired.add(index)
            else:
                drawn, rng = maybe(cfg.happening_prob, rng)
                if drawn:
                    candidates = applicable_happenings(sitn, kb)
                    if candidates:
                        happening, rng = rnd_member(candidates, rng)

        if happening is not None:
            step = apply_event(happening, "happening", sitn, kb, index, None, steps)
            steps.append(step)
            sitn = step.post_situation
            budget -= 1
            new_goal, trigger = revise_goal(sitn, current_goal, kb)
            if trigger is not None:
                current_goal = new_goal
                goal_history.append(
                    GoalEntry(len(steps), current_goal, "revised", trigger)
                )
            try:
                scored = make_best_plan(current_goal, sitn, kb, cfg.planner)
            except NoPlanFoundError as err:
                raise NoPlanFoundError(
                    current_goal,
                    f"unresolvable incident: no plan achieves "
                    f"{format_term(current_goal)} after {format_term(happening)}",
                ) from err
            replans.append(Replan(len(steps), scored))
            queue = list(scored.plan.steps)
            continue

        plan_step = queue.pop(0)
        step = apply_event(
            plan_step.action, "action", sitn, kb, index, plan_step, steps
        )
        steps.append(step)
        sitn = step.post_situation

    unfired = sorted(set(schedule) - fired)
    if unfired:
        raise InvalidInjectionError(
            f"injection schedule entries never fired at steps "
            f"{', '.join(map(str, unfired))}"
        )
    return Trace(
        steps=tuple(steps),
        goal_history=tuple(goal_history),
        replans=tuple(replans),
        initial_situation=steps[0].pre_situation if steps else sitn,
        rng_after=rng,
    )


def generate_incident(kb: KnowledgeBase, cfg: Optional[SimConfig] = None) -> Trace:
    """Plan for the knowledge base's goal from its initial situation
    and simulate the execution."""
    if kb.goal is None:
        raise ValueError("knowledge base declares no goal")
    cfg = cfg or SimConfig()
    scored = make_best_plan(kb.goal, kb.init, kb, cfg.planner)
    return execute_plan(scored, kb.init, kb.goal, cfg, kb)
