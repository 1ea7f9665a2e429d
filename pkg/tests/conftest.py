import random

import pytest

from pdspace import Diagram, make_space

GROUND_SPACES = ["halfplane:l1", "halfplane:l2", "halfplane:linf", "pointed_euclidean:2"]
EXPONENTS = [1.0, 1.5, 2.0, 3.0, "inf"]


def random_point(rng, space):
    if space.name.startswith("halfplane"):
        x = rng.uniform(-3.0, 3.0)
        return (x, x + rng.uniform(0.1, 3.0))
    if space.name.startswith("pointed_euclidean"):
        while True:
            pt = tuple(rng.uniform(-2.0, 2.0) for _ in range(space.k))
            if pt != space.base_point:
                return pt
    if space.name == "ray":
        return (rng.uniform(0.05, 4.0),)
    raise ValueError(space.name)


def random_diagram(rng, space, max_card=4, min_card=0, grid=None):
    """Up to ``max_card`` points; with ``grid`` coordinates are rounded to force ties."""
    space = make_space(space)
    pts = []
    for _ in range(rng.randint(min_card, max_card)):
        pt = random_point(rng, space)
        if grid:
            pt = tuple(round(v * grid) / grid for v in pt)
            if space.in_A(pt):
                continue
        pts.append(pt)
    return Diagram.from_points(space, pts)


@pytest.fixture
def rng():
    return random.Random(20240611)


# one PASS/FAIL line per acceptance criterion, shown after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0][2:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
