import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcm_threshold import (
    ContractError,
    DomainError,
    Mode,
    Pcm,
    PerturbationConfig,
    apply_sign_perturbation,
    build_perfect_pcm,
    check_reciprocity,
)
from pcm_threshold.pcm import ScaleWarning, as_weights, gene_layout

weights_st = st.lists(st.floats(1.0, 9.0), min_size=2, max_size=6)


def test_perfect_pcm_paper_weights(paper_w):
    m = build_perfect_pcm(paper_w).entries
    assert m[1, 0] == pytest.approx(math.sqrt(3), abs=1e-7)
    assert m[0, 4] == pytest.approx(1 / 9, abs=1e-15)
    assert np.all(np.diag(m) == 1.0)
    assert check_reciprocity(build_perfect_pcm(paper_w))


def test_perfect_pcm_small_cases():
    assert np.array_equal(build_perfect_pcm([1, 1, 1]).entries, np.ones((3, 3)))
    m = build_perfect_pcm([1, 2, 4]).entries
    assert m[0, 2] == 0.25
    assert m[2, 1] == 2.0


@pytest.mark.parametrize("bad", [[1, 0, 2], [1, -3], [1, float("nan")]])
def test_nonpositive_weights_rejected(bad):
    with pytest.raises(DomainError):
        build_perfect_pcm(bad)


def test_scale_warning_is_not_fatal():
    with pytest.warns(ScaleWarning):
        w = as_weights([1, 10])
    assert w.tolist() == [1.0, 10.0]
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        as_weights([1, 9])


def test_zero_delta_is_identity(rng):
    base = build_perfect_pcm([1, 3**0.5, 3, 5])
    for half in (True, False):
        cfg = PerturbationConfig(0.0, Mode.PMZ, half)
        pat = rng.choice([-1, 0, 1], size=cfg.pattern_length(4))
        assert apply_sign_perturbation(base, cfg, pat) == base


def test_two_by_two_plus_and_minus():
    base = build_perfect_pcm([1, 3])
    cfg = PerturbationConfig(0.2)
    up = apply_sign_perturbation(base, cfg, [1]).entries
    assert up[0, 1] == pytest.approx(0.4, abs=1e-15)
    assert up[1, 0] == pytest.approx(2.5, abs=1e-14)
    down = apply_sign_perturbation(base, cfg, [-1]).entries
    assert down[0, 1] == pytest.approx(0.266667, abs=1e-6)
    assert down[1, 0] == pytest.approx(3.75, abs=1e-14)


def test_full_matrix_breaks_reciprocity():
    base = build_perfect_pcm([1, 3])
    cfg = PerturbationConfig(0.2, half_matrix=False)
    m = apply_sign_perturbation(base, cfg, [1, 1])
    assert m.entries[0, 1] == pytest.approx(0.4)
    assert m.entries[1, 0] == pytest.approx(3.6)
    assert not check_reciprocity(m)


def test_gene_layout_row_major():
    rows, cols = gene_layout(4, True)
    assert list(zip(rows.tolist(), cols.tolist())) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    rows, cols = gene_layout(3, False)
    assert list(zip(rows.tolist(), cols.tolist())) == [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]


def test_pattern_contract_errors():
    base = build_perfect_pcm([1, 2, 4])
    with pytest.raises(ContractError):
        apply_sign_perturbation(base, PerturbationConfig(0.1), [1, 1])
    with pytest.raises(ContractError):
        apply_sign_perturbation(base, PerturbationConfig(0.1), [1, 0, 1])  # 0 not in PM alphabet
    with pytest.raises(DomainError):
        PerturbationConfig(1.0)
    with pytest.raises(ContractError):
        apply_sign_perturbation(Pcm([[1, 2], [3, 1]]), PerturbationConfig(0.1), [1])


def test_pcm_validation():
    with pytest.raises(ContractError):
        Pcm(np.ones((2, 3)))
    with pytest.raises(DomainError):
        Pcm([[1, -1], [-1, 1]])
    with pytest.raises(DomainError):
        Pcm([[2, 1], [1, 1]])


@settings(max_examples=60, deadline=None)
@given(weights_st, st.floats(0.0, 0.999), st.data())
def test_half_matrix_preserves_reciprocity_and_positivity(w, delta, data):
    base = build_perfect_pcm(w)
    cfg = PerturbationConfig(delta, Mode.PMZ, True)
    pat = data.draw(st.lists(st.sampled_from([-1, 0, 1]), min_size=cfg.pattern_length(len(w)),
                             max_size=cfg.pattern_length(len(w))))
    out = apply_sign_perturbation(base, cfg, pat)
    assert check_reciprocity(out)
    assert np.all(out.entries > 0)
    assert np.all(np.diag(out.entries) == 1.0)


@settings(max_examples=40, deadline=None)
@given(weights_st, st.floats(0.0, 0.999), st.data())
def test_full_matrix_positivity(w, delta, data):
    cfg = PerturbationConfig(delta, Mode.PM, False)
    L = cfg.pattern_length(len(w))
    pat = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=L, max_size=L))
    assert np.all(apply_sign_perturbation(build_perfect_pcm(w), cfg, pat).entries > 0)


@settings(max_examples=60, deadline=None)
@given(weights_st, st.integers(-20, 20), st.floats(0.01, 100))
def test_scale_invariance(w, k, c):
    base = build_perfect_pcm(w).entries
    # powers of two scale exactly in binary floating point
    assert np.array_equal(build_perfect_pcm(np.array(w) * 2.0**k).entries, base)
    np.testing.assert_allclose(build_perfect_pcm(np.array(w) * c).entries, base, rtol=4e-16 * 4)


@settings(max_examples=40, deadline=None)
@given(weights_st, st.randoms(use_true_random=False))
def test_permutation_equivariance(w, rnd):
    order = list(range(len(w)))
    rnd.shuffle(order)
    permuted = build_perfect_pcm(np.array(w)[order])
    assert permuted == build_perfect_pcm(w).permuted(order)
