"""Generate aviation incident stories under different trouble regimes.

Run with: python3 demos/01_generate_stories.py
"""

from incidentgen import RngState, SimConfig, generate_incident, load_aviation, parse_term, render_story

kb = load_aviation()


def show(title, cfg, style="plain"):
    print(f"--- {title}")
    print(render_story(generate_incident(kb, cfg), kb, style=style))


# no trouble at all: the flight runs its planned course
show("quiet flight", SimConfig(happening_prob=0.0))

# a scheduled illness three steps in forces a diversion back to the gate
show(
    "ill passenger over seattle",
    SimConfig(happening_prob=0.0, injection_schedule=((3, parse_term("ill_passenger")),)),
)

# an engine fire late in the cruise forces evacuation at the destination
show(
    "engine fire on approach",
    SimConfig(happening_prob=0.0, injection_schedule=((5, parse_term("fire(engine)")),)),
)

# spontaneous troubles, reproducible from a seed
for seed in (7, 11):
    show(
        f"seeded run {seed}",
        SimConfig(happening_prob=0.4, rng=RngState.seeded(seed)),
    )

# the same incident dressed up for reading aloud
show(
    "storybook rendering",
    SimConfig(happening_prob=0.0, injection_schedule=((1, parse_term("ill_passenger")),)),
    style="storybook",
)
