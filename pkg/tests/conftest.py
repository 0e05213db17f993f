import numpy as np
import pytest

from gridattack.grid import build_grid
from gridattack.ingest import assign_admittances, load_builtin, random_case


def two_node():
    return build_grid([("g", "generator"), ("c", "consumer")], [("g", "c", 10.0)])


def star():
    return build_grid(
        [("g", "generator"), ("c1", "consumer"), ("c2", "consumer")],
        [("g", "c1", 10.0), ("g", "c2", 10.0)],
    )


def random_grid(seed, max_nodes=50, max_generators=4):
    """Seeded connected grid with a few generators and admittances ~ N(11, 2)."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, max_nodes + 1))
    m = int(rng.integers(n - 1, min(2 * n, n * (n - 1) // 2) + 1))
    gens = int(rng.integers(1, min(max_generators, n - 1) + 1))
    case = random_case(n, m, gens, seed=seed)
    return assign_admittances(case, seed=seed)


def toy_grid(seed):
    """Small grid for exhaustive search: 5 or 6 nodes, D between 12 and 14."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 7))
    m = 12 - n + int(rng.integers(0, 3))
    case = random_case(n, m, round(0.5 * n), seed=seed)
    return assign_admittances(case, seed=seed)


@pytest.fixture
def grid2():
    return two_node()


@pytest.fixture
def grid_star():
    return star()


@pytest.fixture
def toy4():
    return load_builtin("toy4").to_grid()


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE = {}


def record(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(
            f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        )
