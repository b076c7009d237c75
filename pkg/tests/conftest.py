import os
import random
import sys

import pytest
from hypothesis import HealthCheck, settings

from autohd.bench import gen_dataset

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

PROMPT1_INIT = (
    "the red block is clear, the yellow block is clear, the hand is empty, the red block is on top of the "
    "blue block, the yellow block is on top of the orange block, the blue block is on the table and the "
    "orange block is on the table"
)
PROMPT1_GOAL = (
    "the orange block is clear, the yellow block is clear, the hand is empty, the orange block is on top of "
    "the red block, the red block is on top of the blue block, the blue block is on the table, and the yellow "
    "block is on the table."
)
PROMPT2_INIT = (
    "the blue block is clear, the orange block is in the hand, the red block is clear, the yellow block is "
    "clear, the hand is holding the orange block, the blue block is on the table, the red block is on the "
    "table, and the yellow block is on the table."
)
PROMPT2_GOAL = (
    "the orange block is clear, the red block is clear, the yellow block is clear, the hand is empty, the red "
    "block is on top of the blue block, the blue block is on the table, the orange block is on the table, and "
    "the yellow block is on the table."
)


@pytest.fixture(scope="session")
def cube_small():
    return gen_dataset("cube2x2", {"depths": {1: 3, 2: 3, 3: 2, 4: 2}}, seed=11)


@pytest.fixture(scope="session")
def bw_small():
    return gen_dataset("blocksworld", {"depths": {2: 4, 4: 4, 6: 2}}, seed=5)


@pytest.fixture(scope="session")
def g24_small():
    return gen_dataset("game24", {"count": 12}, seed=3)


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    test_acceptance = sys.modules.get("test_acceptance")
    if test_acceptance is not None and test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
