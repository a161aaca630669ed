import random

import pytest

from twovalue_nsw.core import Instance


def random_instance(rng: random.Random, n_range=(1, 4), m_range=(1, 8), ps=(3, 5, 7), densities=(0.2, 0.5, 0.8)):
    n = rng.randint(*n_range)
    m = rng.randint(*m_range)
    p = rng.choice(ps)
    d = rng.choice(densities)
    rows = [[rng.random() < d for _ in range(m)] for _ in range(n)]
    return Instance.from_rows(p, rows, m)


def corpus(seed: int, size: int, **kw) -> list[Instance]:
    rng = random.Random(seed)
    return [random_instance(rng, **kw) for _ in range(size)]


@pytest.fixture
def rng():
    return random.Random(12345)
