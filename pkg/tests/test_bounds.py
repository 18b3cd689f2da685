"""Tests for the explicit-constant radius components."""

import math

import numpy as np
import pytest

from densityball.basis import histogram_collection
from densityball.bounds import (
    EPSILON_GRID,
    BoundConfig,
    bias_bound,
    bias_deviation_constant,
    radius,
    variance_bound,
    variance_deviation_constant,
)


def test_variance_deviation_constant_values():
    assert variance_deviation_constant(1.0, 4.0) == pytest.approx(12240.0, rel=1e-12)
    assert variance_deviation_constant(1.0, 2.0 / 3.0) == pytest.approx(2040.0, rel=1e-9)
    assert variance_deviation_constant(2.0, 1.0) == pytest.approx(12240.0, rel=1e-12)
    with pytest.raises(ValueError):
        variance_deviation_constant(0.0, 1.0)
    with pytest.raises(ValueError):
        variance_deviation_constant(1.0, -2.0)


def test_bias_deviation_constant_values():
    assert bias_deviation_constant(0.5, 1.0, 4.0) == pytest.approx(12248.0, rel=1e-12)
    assert bias_deviation_constant(0.1, 1.0, 4.0) == pytest.approx(12280.0, rel=1e-12)
    # epsilon close to 1 leaves just over 12244
    assert bias_deviation_constant(0.999, 1.0, 4.0) == pytest.approx(12244.0, abs=0.01)
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            bias_deviation_constant(bad, 1.0, 4.0)


def _ten_model_collection():
    return histogram_collection([2**k for k in range(10)])


def test_variance_bound_frozen_example():
    # d = 4, n = 100, 10 models, beta = 0.1, m_inf = 2, m2 = 10
    collection = _ten_model_collection()
    model = collection.models[2]
    assert model.dim == 4
    cfg = BoundConfig(beta=0.1, m2=10.0, m_inf=2.0)
    got = variance_bound(0.0, model, collection, cfg, n=100)
    level = 2.0 * math.log(2.0 * 10 / 0.1)
    expected = 12240.0 * (1.0 + math.sqrt(2.0)) * 2.0 * level / 100.0
    assert got == pytest.approx(expected, rel=1e-12)
    assert got == pytest.approx(6263.0, abs=1.0)


def test_variance_bound_zero_scale_and_floor():
    collection = _ten_model_collection()
    model = collection.models[2]
    cfg = BoundConfig(beta=0.1, m2=10.0, m_inf=2.0, kappa_scale=0.0)
    assert variance_bound(0.37, model, collection, cfg, n=100) == 0.37

    # a single-model collection with large beta hits the deviation floor of 2
    single = histogram_collection([4])
    cfg = BoundConfig(beta=0.8, m2=10.0, m_inf=2.0)
    got = variance_bound(0.0, single.top, single, cfg, n=50)
    expected = 12240.0 * (1.0 + math.sqrt(2.0)) * 2.0 * 2.0 / 50.0
    assert got == pytest.approx(expected, rel=1e-12)

    with pytest.raises(ValueError):
        variance_bound(-0.1, model, collection, cfg, n=100)


def test_bias_bound_zero_estimate_grid_minimum():
    # oracle: evaluate the objective at every grid point and take the min;
    # with the default constants the minimizer sits at a small epsilon
    # (the interior optimum, not the grid edge)
    collection = _ten_model_collection()
    sub = collection.models[0]
    cfg = BoundConfig(beta=0.1, m2=10.0, m_inf=2.0)
    n = 100
    got = bias_bound(0.0, sub, collection, cfg, n)
    d_top = collection.top.dim
    level = max(2.0 * math.log(6.0 * collection.cardinality / cfg.beta), 2.0)
    base = (1.0 + math.sqrt(min(cfg.m_inf, cfg.m2 * math.sqrt(d_top)))) * math.sqrt(d_top) * level / n
    values = [
        bias_deviation_constant(eps, 1.0, collection.c_m) * base / (1.0 - eps)
        for eps in EPSILON_GRID
    ]
    assert got == pytest.approx(min(values), rel=1e-12)
    assert int(np.argmin(values)) <= 2


def test_bias_bound_zero_scale_keeps_only_the_estimate():
    collection = _ten_model_collection()
    cfg = BoundConfig(beta=0.1, m2=10.0, m_inf=2.0, kappa_scale=0.0)
    got = bias_bound(3.0, collection.models[0], collection, cfg, n=100)
    assert got == pytest.approx(3.0 / 0.99, rel=1e-12)


def test_bias_bound_monotone_in_estimate():
    collection = _ten_model_collection()
    cfg = BoundConfig(beta=0.1, m2=10.0, m_inf=2.0)
    lo = bias_bound(-0.2, collection.models[1], collection, cfg, n=100)
    mid = bias_bound(0.5, collection.models[1], collection, cfg, n=100)
    hi = bias_bound(2.0, collection.models[1], collection, cfg, n=100)
    assert lo < mid < hi


def test_bias_bound_requires_nesting():
    collection = _ten_model_collection()
    other = histogram_collection([1, 2]).models[0]
    cfg = BoundConfig(beta=0.1, m2=10.0, m_inf=2.0)
    with pytest.raises(ValueError):
        bias_bound(0.0, other, collection, cfg, n=100)


def test_radius_square_root_and_components():
    collection = _ten_model_collection()
    model = collection.models[2]
    cfg = BoundConfig(beta=0.1, m2=10.0, m_inf=2.0, kappa_scale=0.0)
    rho, clamped = radius(4.0, 0.0, model, collection, cfg, n=100)
    assert not clamped
    assert rho == pytest.approx(2.0, rel=1e-12)

    cfg = BoundConfig(beta=0.1, m2=10.0, m_inf=2.0, eta=0.3)
    rho, clamped = radius(0.1, 0.2, model, collection, cfg, n=100)
    v = variance_bound(0.1, model, collection, cfg, 100)
    k = bias_bound(0.2, model, collection, cfg, 100)
    assert rho == pytest.approx(math.sqrt(cfg.eta**2 + v + k), rel=1e-12)
    assert not clamped


def test_radius_clamps_negative_radicand():
    collection = _ten_model_collection()
    cfg = BoundConfig(beta=0.1, m2=10.0, m_inf=2.0, kappa_scale=1e-9)
    rho, clamped = radius(0.0, -50.0, collection.models[0], collection, cfg, n=100)
    assert clamped
    assert rho == 0.0


def test_bounds_monotone_in_n_and_dim():
    collection = _ten_model_collection()
    cfg = BoundConfig(beta=0.1, m2=10.0, m_inf=2.0)
    model = collection.models[3]
    v_by_n = [variance_bound(0.3, model, collection, cfg, n) for n in (10, 30, 100, 1000)]
    assert all(a >= b for a, b in zip(v_by_n[:-1], v_by_n[1:]))
    v_by_d = [variance_bound(0.3, m, collection, cfg, 100) for m in collection.models[:7]]
    assert all(a <= b for a, b in zip(v_by_d[:-1], v_by_d[1:]))

    k_by_n = [bias_bound(0.3, model, collection, cfg, n) for n in (10, 30, 100, 1000)]
    assert all(a >= b for a, b in zip(k_by_n[:-1], k_by_n[1:]))
    # bias bound grows with the top dimension of the collection
    k_by_top = [
        bias_bound(0.3, c.models[0], c, cfg, 100)
        for c in (
            histogram_collection([1, 2, 4]),
            histogram_collection([1, 2, 4, 8, 16]),
            histogram_collection([1, 2, 4, 8, 16, 32, 64]),
        )
    ]
    assert all(a <= b for a, b in zip(k_by_top[:-1], k_by_top[1:]))


def test_radius_monotone_in_beta():
    collection = _ten_model_collection()
    model = collection.models[2]
    rhos = []
    for beta in (0.01, 0.05, 0.1, 0.3):
        cfg = BoundConfig(beta=beta, m2=10.0, m_inf=2.0)
        rhos.append(radius(0.2, 0.1, model, collection, cfg, n=100)[0])
    assert all(a >= b for a, b in zip(rhos[:-1], rhos[1:]))


def test_epsilon_grid_close_to_finer_grid():
    # grid minimum within 0.5% of a 10x finer grid, over random draws
    rng = np.random.default_rng(99)
    fine = np.linspace(0.001, 0.999, 999)
    for _ in range(100):
        n = int(rng.integers(10, 1000))
        collection = histogram_collection([2**k for k in range(int(rng.integers(2, 7)))])
        cfg = BoundConfig(
            beta=float(rng.uniform(0.01, 0.5)),
            m2=float(rng.uniform(0.5, 20.0)),
            m_inf=float(rng.uniform(0.5, 20.0)),
            kappa_scale=float(rng.uniform(0.5, 2.0)),
        )
        estimate = float(rng.uniform(-0.5, 5.0))
        sub = collection.models[0]
        coarse_min = bias_bound(estimate, sub, collection, cfg, n)
        d_top = collection.top.dim
        level = max(2.0 * math.log(6.0 * collection.cardinality / cfg.beta), 2.0)
        base = (
            cfg.kappa_scale
            * (1.0 + math.sqrt(min(cfg.m_inf, cfg.m2 * math.sqrt(d_top))))
            * math.sqrt(d_top)
            * level
            / n
        )
        fine_min = min(
            (estimate + bias_deviation_constant(e, 1.0, collection.c_m) * base) / (1.0 - e)
            for e in fine
        )
        assert coarse_min >= fine_min - 1e-12
        assert coarse_min - fine_min <= 0.005 * abs(fine_min)


def test_bound_config_validation():
    with pytest.raises(ValueError):
        BoundConfig(beta=0.0, m2=1.0, m_inf=1.0)
    with pytest.raises(ValueError):
        BoundConfig(beta=0.1, m2=-1.0, m_inf=1.0)
    with pytest.raises(ValueError):
        BoundConfig(beta=0.1, m2=1.0, m_inf=1.0, eta=-0.1)
    with pytest.raises(ValueError):
        BoundConfig(beta=0.1, m2=1.0, m_inf=1.0, kappa_scale=-1.0)
