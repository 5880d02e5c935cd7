"""Forward heuristic search, and a saboteur who keeps undoing the plan.

Run with: python3 demos/05_forward_and_adversary.py
"""

from dataclasses import replace

from incidentgen import (
    SearchConfig,
    adversarial_story,
    format_term,
    forward_search,
    load_aviation,
    load_kb,
    make_best_plan,
    render_story,
)
from incidentgen.kb import data_path

kb = load_aviation()

print("--- forward search from the initial situation")
found = forward_search(kb.init, kb.goal, kb)
for action in found.actions:
    print(" ", format_term(action))

backward = make_best_plan(kb.goal, kb.init, kb)
print("matches the backward planner's choice:", found.actions == backward.plan.actions)

# the saboteur's actions live in a second definition file; its init
# facts merge into the shared world before the struggle starts
saboteur = load_kb(str(data_path("saboteur.kb")), require_init_goal=False)
hero_kb = replace(kb, init=frozenset(kb.init | saboteur.init))
print("\n--- flight to dallas with a saboteur aboard")
trace = adversarial_story(hero_kb, kb.goal, saboteur.actions, SearchConfig(max_depth=24))
merged = replace(kb, events=(*kb.events, *saboteur.events))
print(render_story(trace, merged))

print("--- the same struggle, step by step with actors")
for step in trace.steps:
    actor = "crew" if step.justification is not None else "saboteur"
    print(f"  {step.index}: [{actor}] {format_term(step.event)}")
