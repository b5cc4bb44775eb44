import random

import pytest
from hypothesis import settings

from thompson_attack.fgroup import Letter, normalize

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def random_word(rng: random.Random, max_len: int = 100, max_index: int = 50):
    n = rng.randint(0, max_len)
    return tuple(Letter(rng.randint(0, max_index), rng.choice((1, -1))) for _ in range(n))


def random_nf(rng: random.Random, max_len: int = 60, max_index: int = 20):
    return normalize(random_word(rng, max_len, max_index))


@pytest.fixture
def rng():
    return random.Random(20240917)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
