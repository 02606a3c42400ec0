import math

import numpy as np
import pytest

from pcm_threshold import PerturbationConfig, build_perfect_pcm, combinatorial_aggregate, pcm_consistency

PAPER_W = (1.0, math.sqrt(3), 3.0, 3 * math.sqrt(3), 9.0)


def random_reciprocal(rng, n, spread=1.0):
    m = np.ones((n, n))
    iu = np.triu_indices(n, 1)
    m[iu] = np.exp(rng.normal(scale=spread, size=len(iu[0])))
    m[iu[1], iu[0]] = 1.0 / m[iu]
    return m


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # JIT compilation (or cache load) happens once here, outside any timed check
    for n in range(2, 7):
        p = build_perfect_pcm(np.arange(1, n + 1))
        combinatorial_aggregate(p)
        pcm_consistency(p)


@pytest.fixture
def paper_w():
    return PAPER_W


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def half_pm():
    return PerturbationConfig(0.2)
