import os
from itertools import combinations

import pytest

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")

MINI_DUMP = os.path.join(FIXTURES, "mini_dump.xml")
MINI_HUMANEVAL = os.path.join(FIXTURES, "mini_humaneval.jsonl")
MINI_MBPP = os.path.join(FIXTURES, "mini_mbpp.jsonl")


def brute_pass_at_k(n: int, c: int, k: int) -> float:
    """Reference oracle: enumerate every k-subset of n samples (the first c
    are the correct ones) and average the at-least-one-correct indicator."""
    hits = 0
    total = 0
    for combo in combinations(range(n), k):
        total += 1
        if any(i < c for i in combo):
            hits += 1
    return hits / total


@pytest.fixture
def fixture_dir():
    return FIXTURES
