"""Define a new story domain in the event DSL and run it.

The engine is not tied to aviation: any set of actions, happenings,
rules, and revisions parsed from the DSL drives the same planner and
simulator. Run with: python3 demos/03_custom_domain.py
"""

from incidentgen import (
    SimConfig,
    generate_incident,
    parse_kb,
    render_story,
    serialize_kb,
    validate_kb,
)

HOSPITAL = """
# a tiny ward: an orderly wheels a patient to theatre; a power cut
# reroutes everyone to the backup room

action collect(Patient) {
  pre: in_ward(Patient);
  del: in_ward(Patient);
  add: on_trolley(Patient);
  text: "The orderly collected {Patient} from the ward.";
}

action wheel_to(Patient, Room) {
  pre: on_trolley(Patient), lit(Room);
  del: on_trolley(Patient);
  add: located(Patient, Room);
  text: "The orderly wheeled {Patient} to the {Room}.";
}

happening power_cut {
  pre: lit(theatre);
  del: lit(theatre);
  add: dark(theatre);
  text: "The lights went out in the theatre.";
}

rule settled(Patient) :- located(Patient, theatre).
rule settled(Patient) :- located(Patient, backup_room).

revise located(Patient, theatre) when dark(theatre) => settled(Patient).

init {
  in_ward(mrs_price);
  lit(theatre);
  lit(backup_room);
}

goal located(mrs_price, theatre).
"""

kb = parse_kb(HOSPITAL)
problems = validate_kb(kb)
print("validation:", "clean" if not problems else problems)

print("\n--- uneventful transfer")
print(render_story(generate_incident(kb, SimConfig(happening_prob=0.0)), kb))

print("--- power cut mid-transfer")
cfg = SimConfig(
    happening_prob=0.0,
    injection_schedule=((1, kb.happenings[0].head),),
)
print(render_story(generate_incident(kb, cfg), kb))

# definitions survive a round trip through the serializer unchanged
assert parse_kb(serialize_kb(kb)) == kb
print("serialized form round-trips: ok")
