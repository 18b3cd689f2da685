"""Tests for the known-density oracles."""

import math

import numpy as np
import pytest

from densityball._quadrature import nodes_for
from densityball.basis import (
    FourierModel,
    HistogramModel,
    PiecewisePolynomialModel,
    histogram_collection,
    piecewise_polynomial_collection,
)
from densityball.oracle import (
    CosineTiltDensity,
    HistogramDensity,
    UniformDensity,
    residual_norm_sq,
    sample_from,
    true_bias_sq,
    true_coefficient,
)
from densityball.weights import replication_rng

ORACLES = [
    UniformDensity(),
    HistogramDensity([1.5, 0.5]),
    HistogramDensity([0.4, 2.2, 0.4]),
    CosineTiltDensity(0.3, 3),
    CosineTiltDensity(-0.5, 1),
]

MODELS = [
    HistogramModel(1),
    HistogramModel(8),
    FourierModel(0),
    FourierModel(4),
    PiecewisePolynomialModel(3, 4),
    histogram_collection([1, 2, 4, 8]).top,
    piecewise_polynomial_collection([1, 3], 3).top,
]


def test_validation():
    with pytest.raises(ValueError):
        HistogramDensity([2.0, 0.5])  # mean != 1
    with pytest.raises(ValueError):
        HistogramDensity([-0.5, 2.5])
    with pytest.raises(ValueError):
        CosineTiltDensity(0.8, 1)  # 0.8 * sqrt(2) > 1
    with pytest.raises(ValueError):
        CosineTiltDensity(0.3, 0)


@pytest.mark.parametrize("oracle", ORACLES, ids=lambda o: repr(o.__dict__))
@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label + str(m.params.get("chain", "")))
def test_coefficients_match_quadrature(oracle, model):
    x, w = nodes_for(model, oracle, order=16)
    quad = model.basis_matrix(x) @ (w * oracle.density(x))
    np.testing.assert_allclose(oracle.true_coefficients(model), quad, atol=1e-8)


def test_specific_coefficients():
    uniform = UniformDensity()
    fourier = FourierModel(3)
    for lam in range(1, fourier.dim):
        assert true_coefficient(uniform, fourier, lam) == 0.0
    hist = HistogramModel(5)
    for lam in range(5):
        assert true_coefficient(uniform, hist, lam) == pytest.approx(1.0 / math.sqrt(5.0))
    tilt = CosineTiltDensity(0.3, 2)
    # cosine coefficient of the matching frequency is the amplitude
    assert true_coefficient(tilt, FourierModel(3), 3) == pytest.approx(0.3, abs=1e-15)
    assert true_coefficient(tilt, FourierModel(3), 4) == 0.0
    with pytest.raises(IndexError):
        true_coefficient(uniform, hist, 5)


def test_true_bias_examples():
    uniform = UniformDensity()
    coll = histogram_collection([1, 2, 4])
    assert true_bias_sq(uniform, coll.models[0], coll.top) == pytest.approx(0.0, abs=1e-15)

    tilt = CosineTiltDensity(0.3, 3)
    assert true_bias_sq(tilt, FourierModel(2), FourierModel(4)) == pytest.approx(0.09, abs=1e-15)

    half = HistogramDensity([2.0, 0.0])
    chain = histogram_collection([1, 2])
    assert true_bias_sq(half, chain.models[0], chain.top) == pytest.approx(1.0, abs=1e-12)
    # quadrature cross-check of the same value
    x, w = nodes_for(chain.top, half, order=8)
    coeffs = chain.top.basis_matrix(x) @ (w * half.density(x))
    assert coeffs[1] ** 2 == pytest.approx(1.0, abs=1e-10)

    with pytest.raises(ValueError):
        true_bias_sq(uniform, HistogramModel(2), HistogramModel(4))


def test_norm_identities():
    tilt = CosineTiltDensity(0.4, 2)
    assert tilt.norm2**2 == pytest.approx(1.0 + 0.16, rel=1e-15)
    hist = HistogramDensity([1.5, 0.5])
    assert hist.norm2**2 == pytest.approx((1.5**2 + 0.5**2) / 2.0, rel=1e-15)
    assert hist.norm_inf == 1.5
    assert tilt.norm_inf == pytest.approx(1.0 + 0.4 * math.sqrt(2.0), rel=1e-15)


def test_residual_norm():
    tilt = CosineTiltDensity(0.3, 3)
    assert residual_norm_sq(tilt, FourierModel(2)) == pytest.approx(0.09, abs=1e-12)
    assert residual_norm_sq(tilt, FourierModel(3)) == pytest.approx(0.0, abs=1e-12)
    assert residual_norm_sq(UniformDensity(), HistogramModel(7)) == pytest.approx(0.0, abs=1e-12)


def test_cdf_matches_density_integral():
    from densityball._quadrature import piecewise_nodes, refine_breakpoints

    xs = np.linspace(0.0, 1.0, 23)[1:]
    for oracle in ORACLES:
        width = 0.25 / (oracle.max_frequency() + 1)
        for x in xs:
            bps = np.concatenate([oracle.breakpoints(), [x]])
            bps = np.unique(bps[bps <= x + 1e-15])
            if bps[0] > 0.0:
                bps = np.concatenate([[0.0], bps])
            nodes, w = piecewise_nodes(refine_breakpoints(bps, width), 12)
            integral = float(oracle.density(nodes) @ w)
            np.testing.assert_allclose(float(oracle.cdf(np.array([x]))[0]), integral, atol=1e-10)


def test_uniform_sampler_ks():
    from scipy.stats import kstest

    passed = 0
    for j in range(100):
        pts = UniformDensity().sample_points(500, replication_rng(5, j))
        stat = kstest(pts, "uniform").statistic
        passed += stat < 1.628 / math.sqrt(500)  # 1% critical value
    assert passed >= 96


def test_histogram_sampler_respects_support():
    half = HistogramDensity([2.0, 0.0])
    pts = half.sample_points(2000, np.random.default_rng(8))
    assert np.all(pts < 0.5)
    assert np.all(pts >= 0.0)


def test_cosine_sampler_first_moment():
    tilt = CosineTiltDensity(0.3, 2)
    pts = tilt.sample_points(100_000, np.random.default_rng(12))
    values = math.sqrt(2.0) * np.cos(2.0 * math.pi * 2 * pts)
    se = values.std(ddof=1) / math.sqrt(values.size)
    assert abs(values.mean() - 0.3) <= 4.0 * se


def test_sample_from_wraps_points():
    sample = sample_from(UniformDensity(), 10, np.random.default_rng(0))
    assert sample.n == 10
    with pytest.raises(ValueError):
        sample_from(UniformDensity(), 1, np.random.default_rng(0))


def test_histogram_sampler_distribution():
    oracle = HistogramDensity([0.4, 2.2, 0.4])
    pts = oracle.sample_points(60_000, np.random.default_rng(4))
    counts = np.histogram(pts, bins=np.linspace(0.0, 1.0, 4))[0] / 60_000
    np.testing.assert_allclose(counts, [0.4 / 3, 2.2 / 3, 0.4 / 3], atol=0.01)
