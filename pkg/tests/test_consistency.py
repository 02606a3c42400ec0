import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcm_threshold import (
    ConsistencyConfig,
    ContractError,
    Pcm,
    alternative_spectrum,
    build_perfect_pcm,
    normalize_weights,
    pcm_consistency,
    spectrum_consistency,
)

from conftest import random_reciprocal

DEFAULT = ConsistencyConfig()


def perturbed_124():
    m = build_perfect_pcm([1, 2, 4]).entries.copy()
    m[0, 1] = 0.75
    m[1, 0] = 4 / 3
    return Pcm(m)


def test_paper_weights_spectrum(paper_w):
    s = alternative_spectrum(build_perfect_pcm(paper_w), 0)
    assert s.shape == (125,)
    np.testing.assert_allclose(s, normalize_weights(paper_w)[0], atol=1e-15)
    assert s[0] == pytest.approx(0.050180, abs=1e-6)


def test_two_alternatives_single_tree():
    pcm = build_perfect_pcm([1, 3])
    assert alternative_spectrum(pcm, 1).shape == (1,)
    assert pcm_consistency(Pcm([[1, 0.3], [3.1, 1]])).overall == 1.0


def test_hand_enumerated_spectrum():
    np.testing.assert_allclose(alternative_spectrum(perturbed_124(), 0), [3 / 19, 0.2, 1 / 7], atol=1e-15)
    np.testing.assert_allclose(alternative_spectrum(perturbed_124(), 0), [0.157895, 0.2, 0.142857], atol=1e-6)
    with pytest.raises(ContractError):
        alternative_spectrum(perturbed_124(), 3)


def test_spectrum_consistency_examples():
    assert spectrum_consistency([0.3] * 7) == 1.0
    assert spectrum_consistency([0.0, 1.0]) == 0.0
    assert spectrum_consistency([0.42]) == 1.0
    got = spectrum_consistency([3 / 19, 0.2, 1 / 7])
    exact = 1 - ((0.2 - 3 / 19) + (3 / 19 - 1 / 7) + (0.2 - 1 / 7)) / 2
    assert got == pytest.approx(exact, abs=1e-15)
    assert got == pytest.approx(0.942857, abs=1e-6)


def test_pcm_consistency_hand_example():
    rep = pcm_consistency(perturbed_124())
    np.testing.assert_allclose(rep.per_alternative, [0.942857, 0.924812, 0.901754], atol=1e-6)
    assert rep.overall == pytest.approx(0.9018, abs=1e-4)
    assert rep.overall == min(rep.per_alternative)
    assert rep.argmin == 2


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_perfect_pcm_is_fully_consistent(rng, n):
    rep = pcm_consistency(build_perfect_pcm(rng.uniform(1, 9, n)))
    assert rep.overall == pytest.approx(1.0, abs=1e-13)
    assert all(x == pytest.approx(1.0, abs=1e-13) for x in rep.per_alternative)


def test_permutation_invariance(rng):
    for _ in range(10):
        pcm = Pcm(random_reciprocal(rng, 5, spread=0.4))
        order = rng.permutation(5)
        a, b = pcm_consistency(pcm), pcm_consistency(pcm.permuted(order))
        assert b.overall == pytest.approx(a.overall, abs=1e-13)
        assert order[b.argmin] == a.argmin


@pytest.mark.parametrize("T", range(1, 9))
@pytest.mark.parametrize("distance", ["identity", "square"])
def test_normalizer_is_the_maximum_over_vertices(T, distance):
    # convex numerators peak at the interval ends; enumerate every 0/1 placement
    cfg = ConsistencyConfig(distance)
    best = min(spectrum_consistency(np.array(p, float), cfg) for p in itertools.product([0, 1], repeat=T))
    assert best == pytest.approx(0.0 if T > 1 else 1.0, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=40), st.sampled_from(["identity", "square"]))
def test_index_range(xs, distance):
    v = spectrum_consistency(xs, ConsistencyConfig(distance))
    assert -1e-12 <= v <= 1.0 + 1e-12


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=12))
def test_ordered_pair_convention(xs):
    # ordered (i != j) numerators and normalizers both double, leaving the index unchanged
    x = np.array(xs)
    T = len(x)
    ordered = np.abs(x[:, None] - x[None, :]).sum()
    M_ordered = 2 * (T // 2) * ((T + 1) // 2)
    assert spectrum_consistency(x) == pytest.approx(1 - ordered / M_ordered, abs=1e-12)


@pytest.mark.parametrize("sign", [1, -1])
def test_monotone_response_single_entry(sign):
    values = []
    for delta in np.arange(0, 0.51, 0.1):
        m = build_perfect_pcm([1, 2, 4]).entries.copy()
        m[0, 1] *= 1 + sign * delta
        m[1, 0] = 1 / m[0, 1]
        values.append(pcm_consistency(Pcm(m)).overall)
    assert np.all(np.diff(values) <= 1e-12)


def test_config_tags():
    assert DEFAULT.tag == "identity/pair_extremes"
    assert ConsistencyConfig.from_tag("square/pair_extremes") == ConsistencyConfig("square")
    with pytest.raises(ContractError):
        ConsistencyConfig("cubic")
