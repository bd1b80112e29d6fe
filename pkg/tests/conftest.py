import numpy as np
import pytest

from juliabubbles.families import FamilyInstance
from juliabubbles.rmap import INF, Cycle, RationalMap


def make_square_instance():
    """z -> z^2 with its two superattracting fixed points, for oracle tests."""
    f = RationalMap(np.array([0.0, 0.0, 1.0], dtype=np.complex128))
    cycles = [
        Cycle(points=[INF], period=1, multiplier=0j, kind="superattracting"),
        Cycle(points=[0j], period=1, multiplier=0j, kind="superattracting"),
    ]
    return FamilyInstance(f, "square", {}, cycles, [0j, INF])


@pytest.fixture(scope="session")
def square_instance():
    return make_square_instance()
