"""Expand the story grammar baseline and map its limits.

A phrase-structure grammar can spell out every incident it covers, but
it cannot revise goals or explain steps; dead ends have to be found by
exhaustion. Run with: python3 demos/04_story_grammar.py
"""

from incidentgen import (
    DeadEndError,
    RngState,
    enumerate_expansions,
    expand,
    find_dead_ends,
    format_term,
    load_grammar,
    parse_term,
)
from incidentgen.kb import data_path

grammar = load_grammar(str(data_path("incident.grammar")))
start = parse_term("incident")

print("--- every complete incident the grammar can tell")
for seq in enumerate_expansions(grammar, start):
    print(" ", " ".join(format_term(t) for t in seq))

print("\n--- branches that can never finish")
for dead in find_dead_ends(grammar, start):
    print(" ", format_term(dead))

print("\n--- random sampling (leftmost expansion, no backtracking)")
for seed in range(8):
    try:
        seq = expand(grammar, start, RngState.seeded(seed))
        print(f"  seed {seed}: " + " ".join(format_term(t) for t in seq))
    except DeadEndError as err:
        print(f"  seed {seed}: stuck at {err}")

episode = load_grammar(str(data_path("rumelhart.grammar")))
print("\n--- classic episode grammar, expansions by depth budget")
for depth in (4, 6, 8):
    count = len(enumerate_expansions(episode, parse_term("episode"), max_depth=depth))
    print(f"  depth {depth}: {count} complete episodes")
