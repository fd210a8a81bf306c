import random
import sys

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from revstruct.structures import structure

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def digraphs(draw, min_size=0, max_size=5, loops=True):
    n = draw(st.integers(min_size, max_size))
    nodes = [f"v{i}" for i in range(n)]
    pairs = [(a, b) for a in nodes for b in nodes if loops or a != b]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    return structure(nodes, chosen)


def random_digraph(rng: random.Random, n: int, density: float = None, loops: bool = True):
    p = rng.random() if density is None else density
    nodes = [f"v{i}" for i in range(n)]
    edges = [(a, b) for a in nodes for b in nodes if (loops or a != b) and rng.random() < p]
    return structure(nodes, edges)


@pytest.fixture
def rng():
    return random.Random(20261016)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
