import random

import pytest

from latdefect.pointconfig import Family, PointConfiguration, is_full_dimensional


def random_config(rng: random.Random, n: int, lo: int = 0, hi: int = 3,
                  size: tuple[int, int] | None = None, full: bool = True) -> PointConfiguration:
    """Random configuration in ``[lo, hi]^n``, full-dimensional when ``full``."""
    lo_size, hi_size = size or (n + 1, n + 3)
    while True:
        m = rng.randint(lo_size, hi_size)
        pts = [tuple(rng.randint(lo, hi) for _ in range(n)) for _ in range(m)]
        a = PointConfiguration.of(pts, n)
        if not full or is_full_dimensional(a):
            return a


def random_family(rng: random.Random, n: int, members: int, **kw) -> Family:
    return Family(tuple(random_config(rng, n, **kw) for _ in range(members)))


@pytest.fixture
def rng():
    return random.Random(20240611)


D2 = [(0, 0), (1, 0), (0, 1)]
TWO_D2 = [(0, 0), (2, 0), (0, 2)]
SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]
SEGMENTS = ([(0, 0), (1, 0), (2, 0)], [(0, 0), (0, 1), (0, 2)])
