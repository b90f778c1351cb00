from fractions import Fraction

import pytest
from hypothesis import settings

import shortsight as ss

settings.register_profile("exact", deadline=None, derandomize=True)
settings.load_profile("exact")


@pytest.fixture
def prefix3():
    return ss.build_prefix(3)


@pytest.fixture
def greedy310():
    return ss.build_greedy(3, 10)


@pytest.fixture
def aliasing3():
    return ss.build_aliasing(3)


def half_behavior(mdp):
    """50/50 stochastic behavior at every choice state, forced elsewhere."""
    half = {}
    for s in mdp.choice_states():
        a0, a1 = mdp.actions[s][0], mdp.actions[s][1]
        half[mdp.states[s]] = {a0: Fraction(1, 2), a1: Fraction(1, 2)}
    return ss.make_stationary(mdp, half)
