import os

import pytest
from hypothesis import HealthCheck, settings

from treeroute.generators import make_tree
from treeroute.tree import build_tree

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def path3():
    """Path 0-1-2 rooted at 0 with weights 1.5 and 2.5."""
    return build_tree([(0, 1, 1.5), (1, 2, 2.5)], 0)


@pytest.fixture
def star5():
    return build_tree([(0, i, 1.0) for i in range(1, 6)], 0)


@pytest.fixture(scope="session")
def rrt():
    """Cached seeded random recursive trees keyed by ``(n, seed)``."""
    cache = {}

    def get(n, seed=0):
        if (n, seed) not in cache:
            cache[(n, seed)] = make_tree("random-recursive-tree", n, seed)
        return cache[(n, seed)]

    return get


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[_ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
