"""Plan a trip, compare the alternatives, and ask why each step ran.

Run with: python3 demos/02_plan_and_explain.py
"""

from incidentgen import (
    PlannerConfig,
    SimConfig,
    enumerate_plans,
    explain,
    format_explanation,
    format_term,
    generate_incident,
    load_aviation,
    make_best_plan,
    parse_term,
    plan_quality,
)

kb = load_aviation()

print("--- best plan for", format_term(kb.goal))
best = make_best_plan(kb.goal, kb.init, kb)
for action in best.plan.actions:
    print(" ", format_term(action))
print("quality:", best.quality)

# once the passengers are aboard there are two ways to finish the trip:
# unload normally, or evacuate at the destination gate
boarded = (kb.init - {parse_term("plocation(passengers1, gate(seattle))")}) | {
    parse_term("contains(airplane1, passengers1)")
}
print("\n--- all plans from the boarded situation")
for plan in enumerate_plans(kb.goal, boarded, kb, PlannerConfig(max_plan_length=8)):
    actions = ", ".join(format_term(a) for a in plan.actions)
    print(f"  [{plan_quality(plan)}] {actions}")

# each simulated step keeps its justification, so the trace can answer
# why-questions all the way back to the goal that was active at the time
print("\n--- why did the plane land back at seattle?")
cfg = SimConfig(happening_prob=0.0, injection_schedule=((3, parse_term("ill_passenger")),))
trace = generate_incident(kb, cfg)
print(format_explanation(explain(trace, 4)))

print("--- why the initial boarding?")
print(format_explanation(explain(trace, 0)))

print("--- and the illness itself?")
print(format_explanation(explain(trace, 3)))
