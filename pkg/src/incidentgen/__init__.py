"""Episodic incident narratives from a STRIPS-style knowledge base.

A backward-chaining planner finds the best action sequence for a goal;
a stochastic simulator executes it while injecting exogenous happenings
that revise the goal and force replanning; the resulting trace renders
to English and answers "why" questions from its recorded
justifications. Story-grammar expansion and forward/adversarial search
are included as contrasting generation styles, and the ``incidentgen``
command exposes the lot.
"""

__version__ = "0.1.0"

from .terms import (
    Atom,
    Compound,
    Substitution,
    Term,
    Variable,
    compare_terms,
    format_term,
    ground,
    occurs_in,
    rename_fresh,
    rename_fresh_all,
    substitute,
    term_key,
    unify,
    variables,
)
from .kb import (
    DerivationRule,
    EventDef,
    KnowledgeBase,
    RevisionRule,
    Situation,
    TextTemplate,
    UnknownEventError,
    aviation_kb_path,
    data_path,
    fresh_event,
    fresh_revision,
    fresh_rule,
)
from .dsl import (
    Diagnostic,
    ParseError,
    load_aviation,
    load_kb,
    parse_kb,
    parse_kb_with_diagnostics,
    parse_term,
    serialize_kb,
    validate_kb,
)
from .rng import TABLE, EmptyListError, RngState, maybe, next_unit, rnd_member
from .planner import (
    MissingDeleteFactError,
    NoPlanFoundError,
    Plan,
    PlannerConfig,
    PlanStep,
    SCORERS,
    ScoredPlan,
    UnknownScorerError,
    achieves,
    apply_effects,
    enumerate_plans,
    iter_satisfying,
    make_best_plan,
    plan_quality,
    plan_sort_key,
    satisfied,
)
from .simulator import (
    GoalEntry,
    InvalidInjectionError,
    PreconditionViolationError,
    Replan,
    SimConfig,
    Trace,
    TraceStep,
    applicable_happenings,
    apply_event,
    execute_plan,
    generate_incident,
    revise_goal,
)
from .narrate import (
    STYLES,
    ChainLink,
    Explanation,
    UnboundSlotError,
    explain,
    format_explanation,
    render_event,
    render_story,
)
from .grammar import (
    DeadEndError,
    DepthExceededError,
    Grammar,
    NonterminalRef,
    Production,
    TerminalList,
    UnknownNonterminalError,
    enumerate_expansions,
    expand,
    find_dead_ends,
    load_grammar,
    parse_grammar,
)
from .search import (
    EVALUATIONS,
    SearchConfig,
    StalemateError,
    adversarial_story,
    forward_search,
    plan_distance,
)
from .cli import main

__all__ = [
    "__version__",
    # terms
    "Atom",
    "Compound",
    "Substitution",
    "Term",
    "Variable",
    "compare_terms",
    "format_term",
    "ground",
    "occurs_in",
    "rename_fresh",
    "rename_fresh_all",
    "substitute",
    "term_key",
    "unify",
    "variables",
    # knowledge base
    "DerivationRule",
    "EventDef",
    "KnowledgeBase",
    "RevisionRule",
    "Situation",
    "TextTemplate",
    "UnknownEventError",
    "aviation_kb_path",
    "data_path",
    "fresh_event",
    "fresh_revision",
    "fresh_rule",
    # definition language
    "Diagnostic",
    "ParseError",
    "load_aviation",
    "load_kb",
    "parse_kb",
    "parse_kb_with_diagnostics",
    "parse_term",
    "serialize_kb",
    "validate_kb",
    # randomness
    "TABLE",
    "EmptyListError",
    "RngState",
    "maybe",
    "next_unit",
    "rnd_member",
    # planner
    "MissingDeleteFactError",
    "NoPlanFoundError",
    "Plan",
    "PlannerConfig",
    "PlanStep",
    "SCORERS",
    "ScoredPlan",
    "UnknownScorerError",
    "achieves",
    "apply_effects",
    "enumerate_plans",
    "iter_satisfying",
    "make_best_plan",
    "plan_quality",
    "plan_sort_key",
    "satisfied",
    # simulator
    "GoalEntry",
    "InvalidInjectionError",
    "PreconditionViolationError",
    "Replan",
    "SimConfig",
    "Trace",
    "TraceStep",
    "applicable_happenings",
    "apply_event",
    "execute_plan",
    "generate_incident",
    "revise_goal",
    # narration
    "STYLES",
    "ChainLink",
    "Explanation",
    "UnboundSlotError",
    "explain",
    "format_explanation",
    "render_event",
    "render_story",
    # story grammars
    "DeadEndError",
    "DepthExceededError",
    "Grammar",
    "NonterminalRef",
    "Production",
    "TerminalList",
    "UnknownNonterminalError",
    "enumerate_expansions",
    "expand",
    "find_dead_ends",
    "load_grammar",
    "parse_grammar",
    # forward search
    "EVALUATIONS",
    "SearchConfig",
    "StalemateError",
    "adversarial_story",
    "forward_search",
    "plan_distance",
    # command line
    "main",
]
