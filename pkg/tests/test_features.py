import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rqmcf.errors import ConfigError, DimensionError
from rqmcf.features import (
    FeatureBank,
    approx_kernel,
    build_features,
    feature_matrix,
    feature_vector,
    make_bank,
    sample_nodes,
)
from rqmcf.kernels import KernelSpec, eval_kernel
from rqmcf.qmc import PointSet, mc_points, sobol_points

GAUSS1 = KernelSpec("gaussian", 1.0, 1)


def _bank(w, b, d=1):
    return FeatureBank(np.atleast_2d(w), np.atleast_1d(b), KernelSpec("gaussian", 1.0, d))


def test_center_node_maps_to_zero_frequency():
    ps = PointSet([[0.5, 0.5, 0.5, 0.25]])
    bank = build_features(ps, KernelSpec("gaussian", 1.0, 3))
    assert bank.frequencies.tolist() == [[0.0, 0.0, 0.0]]
    assert bank.phases.tolist() == [0.25]


def test_bandwidth_scales_frequencies():
    # frequencies are Q(t) / sigma, so halving sigma doubles them exactly
    ps = sobol_points(6, 3)
    a = build_features(ps, KernelSpec("gaussian", 1.0, 2)).frequencies
    b = build_features(ps, KernelSpec("gaussian", 0.5, 2)).frequencies
    np.testing.assert_array_equal(b, 2 * a)


def test_mc_frequency_covariance():
    sigma = 0.7
    ps = mc_points(100_000, 4, seed=9)
    w = build_features(ps, KernelSpec("gaussian", sigma, 3)).frequencies
    cov = np.cov(w.T)
    target = np.eye(3) / sigma**2
    assert np.all(np.abs(cov - target) <= 0.02 / sigma**2)


def test_origin_node_is_clamped():
    bank = build_features(sobol_points(4, 3), KernelSpec("gaussian", 1.0, 2))
    assert np.all(np.isfinite(bank.frequencies))
    assert bank.frequencies[0, 0] == pytest.approx(-8.209536151601387, rel=1e-12)  # mpmath: Phi^-1(2^-53)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        build_features(sobol_points(3, 2), KernelSpec("gaussian", 1.0, 2))
    bank = make_bank("mc", GAUSS1, 4, 0)
    with pytest.raises(DimensionError):
        feature_vector(bank, np.zeros(2))


def test_feature_vector_examples():
    M = 8
    ones = feature_vector(_bank(np.zeros((M, 1)), np.zeros(M)), np.array([0.3]))
    np.testing.assert_allclose(ones, np.full(M, np.sqrt(2 / M)), rtol=1e-15)
    neg = feature_vector(_bank(np.zeros((M, 1)), np.full(M, 0.5)), np.array([0.3]))
    np.testing.assert_allclose(neg, np.full(M, -np.sqrt(2 / M)), rtol=1e-15)


def test_feature_norm_bound():
    bank = make_bank("sobol_owen", KernelSpec("gaussian", 0.4, 3), 64, 5)
    X = np.random.default_rng(1).random((1000, 3))
    Phi = feature_matrix(bank, X)
    sq = np.sum(Phi**2, axis=1)
    assert np.all((sq >= 0) & (sq <= 2 + 1e-12))
    assert np.all(np.abs(Phi) * np.sqrt(bank.n_features) <= np.sqrt(2) + 1e-12)


def test_approx_kernel_single_feature():
    w, b = np.array([[1.3, -0.4]]), np.array([0.1])
    bank = FeatureBank(w, b, KernelSpec("gaussian", 1.0, 2))
    x, xp = np.array([0.2, 0.9]), np.array([0.5, 0.1])
    want = 2 * np.cos(x @ w[0] + 2 * np.pi * b[0]) * np.cos(xp @ w[0] + 2 * np.pi * b[0])
    assert approx_kernel(bank, x, xp) == pytest.approx(want, rel=1e-14)


def test_approx_kernel_diagonal_is_squared_norm():
    bank = make_bank("halton", KernelSpec("gaussian", 0.5, 2), 50)
    x = np.array([0.3, 0.6])
    v = approx_kernel(bank, x, x)
    assert 0 <= v <= 2
    assert v == pytest.approx(float(np.sum(feature_vector(bank, x) ** 2)), rel=1e-14)


def test_approx_kernel_matches_explicit_sum():
    bank = make_bank("mc", KernelSpec("gaussian", 0.5, 2), 40, 3)
    x, xp = np.array([0.1, 0.7]), np.array([0.4, 0.2])
    total = 0.0
    for w, b in zip(bank.frequencies, bank.phases):
        total += 2 * np.cos(x @ w + 2 * np.pi * b) * np.cos(xp @ w + 2 * np.pi * b)
    assert approx_kernel(bank, x, xp) == pytest.approx(total / 40, rel=1e-12)


def test_mc_kernel_estimate_within_clt_band():
    M = 2**14
    bank = make_bank("mc", GAUSS1, M, 123)
    exact = eval_kernel(GAUSS1, np.array([0.2]), np.array([0.7]))
    assert abs(approx_kernel(bank, np.array([0.2]), np.array([0.7])) - exact) <= 5 * M**-0.5


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**63), st.lists(st.floats(0, 1), min_size=4, max_size=4))
def test_symmetry(seed, coords):
    bank = make_bank("sobol_owen", KernelSpec("gaussian", 0.6, 2), 32, seed)
    x, xp = np.array(coords[:2]), np.array(coords[2:])
    assert approx_kernel(bank, x, xp) == approx_kernel(bank, xp, x)


def test_approx_gram_is_psd():
    bank = make_bank("sobol_owen", KernelSpec("gaussian", 0.3, 2), 16, 4)
    X = np.random.default_rng(3).random((60, 2))
    Phi = feature_matrix(bank, X)
    G = np.array([[approx_kernel(bank, a, b) for b in X] for a in X])
    np.testing.assert_allclose(G, Phi @ Phi.T, atol=1e-13)
    assert np.linalg.eigvalsh(G).min() >= -1e-10


def test_rqmc_estimates_are_unbiased():
    kernel = KernelSpec("gaussian", 0.5, 2)
    x, xp = np.array([0.15, 0.8]), np.array([0.6, 0.35])
    R = 2000
    est = np.array([approx_kernel(make_bank("sobol_owen", kernel, 32, s), x, xp) for s in range(R)])
    se = est.std(ddof=1) / np.sqrt(R)
    assert abs(est.mean() - eval_kernel(kernel, x, xp)) <= 4 * se


@pytest.mark.parametrize("family", ["gaussian", "laplacian", "cauchy"])
def test_spectral_consistency(family):
    kernel = KernelSpec(family, 0.8, 3)
    bank = make_bank("mc", kernel, 2**16, 17)
    rng = np.random.default_rng(8)
    X, Xp = rng.random((20, 3)), rng.random((20, 3))
    err = np.abs(approx_kernel(bank, X, Xp) - eval_kernel(kernel, X, Xp))
    assert np.all(err <= 5 * 2**-8)


def test_samplers():
    assert sample_nodes("halton", 5, 3).points.tobytes() == sample_nodes("halton", 5, 3, seed=9).points.tobytes()
    assert sample_nodes("sobol", 8, 2).points[0].tolist() == [0.0, 0.0]
    assert not np.any(np.all(sample_nodes("sobol_owen", 8, 2, 1).points == 0.0, axis=1))
    with pytest.raises(ConfigError):
        sample_nodes("sobol_owen", 12, 2)
    with pytest.raises(ConfigError):
        sample_nodes("lattice", 8, 2)


def test_bank_is_immutable():
    bank = make_bank("mc", GAUSS1, 4, 0)
    with pytest.raises(ValueError):
        bank.frequencies[0, 0] = 1.0
