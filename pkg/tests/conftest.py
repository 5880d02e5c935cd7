"""Shared fixtures: the aviation knowledge base and canned situations."""

import pytest
from hypothesis import HealthCheck, settings

from incidentgen import Situation, load_aviation, parse_term

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def facts(*texts: str) -> Situation:
    return frozenset(parse_term(t) for t in texts)


@pytest.fixture(scope="session")
def kb():
    return load_aviation()


@pytest.fixture(scope="session")
def boarded(kb):
    """The initial situation after load: passengers aboard at the gate."""
    return (kb.init - facts("plocation(passengers1, gate(seattle))")) | facts(
        "contains(airplane1, passengers1)"
    )


@pytest.fixture(scope="session")
def at_runway_loaded():
    """Plane on the seattle runway, passengers aboard, ready for takeoff."""
    return facts(
        "airplane(airplane1)",
        "passengers(passengers1)",
        "contains(airplane1, passengers1)",
        "alocation(airplane1, runway(seattle))",
        "flight_path(seattle, chicago)",
        "flight_path(chicago, dallas)",
    )


@pytest.fixture(scope="session")
def fire_on_runway(at_runway_loaded):
    """Same, but the engine has caught fire before takeoff."""
    return at_runway_loaded | facts("on_fire(engine)")


@pytest.fixture(scope="session")
def forward_from_init(kb):
    """Brute-force forward result from the initial situation, bound 8."""
    from oracles import forward_sequence_set

    return forward_sequence_set(kb.init, kb.goal, kb, 8)
