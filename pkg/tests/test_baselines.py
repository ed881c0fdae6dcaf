import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from ffpsk.baselines import (
    HeterodyneSpec,
    QuadratureError,
    heterodyne_channel_matrix,
    helstrom_error_psk,
    psk_gram_eigenvalues,
    sector_probability,
)
from ffpsk.info import average_error_rate, uniform_prior
from ffpsk.receiver import ReceiverConfig, exact_channel_matrix

DOMINANCE_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)


def grid_sector_probability(M, alpha_sq, n=2001, r_max=12.0):
    """Brute-force polar Simpson rule over the decision sector of symbol 0."""
    alpha = math.sqrt(alpha_sq)
    r = np.linspace(0.0, r_max, n)
    theta = np.linspace(-math.pi / M, math.pi / M, n)
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    dist_sq = rr**2 + alpha_sq - 2 * alpha * rr * np.cos(tt)
    f = np.exp(-dist_sq) / math.pi * rr
    return integrate.simpson(integrate.simpson(f, x=theta, axis=1), x=r)


def binary_helstrom(alpha_sq):
    return (1 - math.sqrt(1 - math.exp(-4 * alpha_sq))) / 2


@pytest.mark.parametrize("M", [2, 3, 4])
def test_heterodyne_vacuum_is_uniform(M):
    p = np.asarray(heterodyne_channel_matrix(HeterodyneSpec(M, 0.0)))
    assert p == pytest.approx(np.full((M, M), 1 / M), abs=1e-12)


def test_heterodyne_matches_grid_oracle():
    het = np.asarray(heterodyne_channel_matrix(HeterodyneSpec(4, 1.0)))
    oracle = grid_sector_probability(4, 1.0)
    assert het[0, 0] == pytest.approx(oracle, abs=1e-6)
    assert het[0, 0] == pytest.approx(0.70786098, abs=1e-8)


@pytest.mark.parametrize("M", [3, 4])
def test_heterodyne_off_diagonal_matches_grid_oracle(M):
    # a sector rotated by one step is the same integral at a rotated signal
    alpha_sq = 0.7
    direct = sector_probability(M, alpha_sq, 1)
    alpha = math.sqrt(alpha_sq)
    r = np.linspace(0.0, 12.0, 2001)
    theta = np.linspace(2 * math.pi / M - math.pi / M, 2 * math.pi / M + math.pi / M, 2001)
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    f = np.exp(-(rr**2 + alpha_sq - 2 * alpha * rr * np.cos(tt))) / math.pi * rr
    oracle = integrate.simpson(integrate.simpson(f, x=theta, axis=1), x=r)
    assert direct == pytest.approx(oracle, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 4]), st.floats(0.0, 25.0))
def test_heterodyne_row_stochastic_and_circulant(M, alpha_sq):
    p = np.asarray(heterodyne_channel_matrix(HeterodyneSpec(M, alpha_sq)))
    assert np.abs(p.sum(axis=1) - 1).max() <= 10 * 1e-10
    for i in range(M):
        for j in range(M):
            assert p[i, j] == pytest.approx(p[0, (j - i) % M], abs=1e-9)


def test_heterodyne_confusion_decreases_with_energy():
    low = np.asarray(heterodyne_channel_matrix(HeterodyneSpec(4, 1.0)))
    high = np.asarray(heterodyne_channel_matrix(HeterodyneSpec(4, 4.0)))
    assert high[0, 0] > low[0, 0]


def test_heterodyne_spec_validation():
    with pytest.raises(ValueError):
        HeterodyneSpec(4, -0.1)
    with pytest.raises(ValueError):
        HeterodyneSpec(4, 1.0, quadrature_abs_tol=0.0)
    with pytest.raises(ValueError):
        HeterodyneSpec(1, 1.0)


def test_quadrature_failure_reports_estimate():
    with pytest.raises(QuadratureError) as info:
        sector_probability(4, 1.0, 0, abs_tol=1e-300)
    assert 0 < info.value.estimate < 1
    assert info.value.abserr > 1e-300


@pytest.mark.parametrize("M", [2, 3, 4])
def test_helstrom_vacuum_is_best_guess(M):
    assert helstrom_error_psk(M, 0.0) == pytest.approx(1 - 1 / M, abs=1e-12)


@pytest.mark.parametrize("alpha_sq", [0.1, 0.5, 1.0, 2.0])
def test_helstrom_binary_closed_form(alpha_sq):
    assert helstrom_error_psk(2, alpha_sq) == pytest.approx(binary_helstrom(alpha_sq), abs=1e-12)


def test_helstrom_large_energy():
    assert helstrom_error_psk(4, 20.0) < 1e-6


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 4]), st.floats(0.0, 30.0))
def test_gram_eigenvalues(M, alpha_sq):
    lam = psk_gram_eigenvalues(M, alpha_sq)
    assert np.all(lam >= 0)
    assert lam.sum() == pytest.approx(M, abs=1e-12)
    err = helstrom_error_psk(M, alpha_sq)
    assert 0 <= err <= 1 - 1 / M


def test_helstrom_rejects_unsupported():
    with pytest.raises(ValueError):
        helstrom_error_psk(5, 1.0)
    with pytest.raises(ValueError):
        helstrom_error_psk(4, -1.0)


@pytest.mark.parametrize("M", [3, 4])
@pytest.mark.parametrize("alpha_sq", DOMINANCE_GRID)
def test_helstrom_dominates(M, alpha_sq):
    u = uniform_prior(M)
    bound = helstrom_error_psk(M, alpha_sq)
    disp = average_error_rate(exact_channel_matrix(ReceiverConfig(M=M, alpha_sq=alpha_sq)), u)
    het = average_error_rate(heterodyne_channel_matrix(HeterodyneSpec(M, alpha_sq)), u)
    assert bound <= disp + 1e-9
    assert bound <= het + 1e-9
