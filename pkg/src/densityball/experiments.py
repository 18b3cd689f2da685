"""Seeded Monte Carlo experiments around the resampling variance estimator.

Two studies ship, both on histogram models:

* ``normalized_difference_experiment`` repeats, for fresh samples, the
  normalized difference ``n (error - estimate) / sqrt(dim)`` between the
  exact squared projection error and the resampling estimate (Monte Carlo
  over weight draws, and closed form as a second column).  Its empirical
  distribution is expected to be stable across sample sizes and dimensions.

* ``coverage_experiment`` checks how often the exact squared projection
  error falls below the empirical alpha-quantile of the reweighted
  statistic's conditional distribution, for a grid of alpha levels; the
  curve should hug the diagonal.

Every replication draws from an independent stream keyed by
``(seed, replication)``, and reductions preserve replication order, so a
fixed seed reproduces results bit for bit regardless of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ball import order_statistic_rank
from .basis import HistogramModel
from .estimators import (
    Sample,
    projection_error_sq,
    resampling_statistics,
    resampling_variance,
    resampling_variance_monte_carlo,
)
from .oracle import DensityOracle
from .weights import WeightKind, make_scheme, replication_rng, sample_weights_batch

DEFAULT_SEED = 4


@dataclass(frozen=True)
class NormalizedDifferenceResult:
    """Per-replication normalized differences, Monte Carlo vs closed form."""

    monte_carlo: np.ndarray
    closed_form: np.ndarray

    def summary(self) -> dict[str, tuple[float, float]]:
        """(mean, sd, min, max) per column, keyed by column name."""
        out = {}
        for name, col in (("monte_carlo", self.monte_carlo), ("closed_form", self.closed_form)):
            out[name] = (
                float(np.mean(col)),
                float(np.std(col, ddof=1)) if col.size > 1 else 0.0,
                float(np.min(col)),
                float(np.max(col)),
            )
        return out


def normalized_difference_experiment(
    oracle: DensityOracle,
    n: int,
    dim: int,
    n_draws: int,
    reps: int,
    seed: int = DEFAULT_SEED,
    kind: WeightKind | str = WeightKind.EFRON_MULTINOMIAL,
) -> NormalizedDifferenceResult:
    """Replicate ``n (error - estimate) / sqrt(dim)`` on fresh samples."""
    if reps < 1:
        raise ValueError("need at least one replication")
    model = HistogramModel(dim)
    scheme = make_scheme(kind, n)
    scale = n / math.sqrt(dim)
    mc = np.empty(reps)
    cf = np.empty(reps)
    for j in range(reps):
        rng = replication_rng(seed, j)
        sample = Sample(oracle.sample_points(n, rng))
        error = projection_error_sq(sample, model, oracle)
        mc[j] = scale * (error - resampling_variance_monte_carlo(sample, model, scheme, n_draws, rng))
        cf[j] = scale * (error - resampling_variance(sample, model, scheme))
    return NormalizedDifferenceResult(monte_carlo=mc, closed_form=cf)


def coverage_experiment(
    oracle: DensityOracle,
    n: int,
    dim: int,
    n_draws: int,
    reps: int,
    alphas,
    seed: int = DEFAULT_SEED,
    kind: WeightKind | str = WeightKind.EFRON_MULTINOMIAL,
) -> list[tuple[float, float]]:
    """Empirical coverage of the resampled quantile threshold per alpha.

    For each replication the exact squared projection error is compared to
    the order statistic of rank ``ceil(alpha * n_draws)`` of the reweighted
    statistics; rows come back as ``(alpha, frequency)`` in alpha order.
    """
    alphas = sorted(float(a) for a in alphas)
    if not alphas:
        raise ValueError("need at least one alpha level")
    if any(not 0.0 < a < 1.0 for a in alphas):
        raise ValueError("alpha levels must lie in (0, 1)")
    if reps < 1:
        raise ValueError("need at least one replication")
    model = HistogramModel(dim)
    scheme = make_scheme(kind, n)
    ranks = np.array([order_statistic_rank(a, n_draws) for a in alphas])
    hits = np.zeros(len(alphas))
    for j in range(reps):
        rng = replication_rng(seed, j)
        sample = Sample(oracle.sample_points(n, rng))
        error = projection_error_sq(sample, model, oracle)
        draws = sample_weights_batch(scheme, n_draws, rng)
        stats = np.sort(resampling_statistics(sample, model, scheme, draws))
        hits += error <= stats[ranks - 1]
    return [(a, float(h / reps)) for a, h in zip(alphas, hits)]
