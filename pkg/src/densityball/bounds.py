"""Radius components with explicit constants.

The confidence radius of a model combines a data-driven part (the closed-form
resampling variance estimate and the nested-bias U-statistic) with additive
deviation terms carrying fully explicit constants:

* ``variance_deviation_constant(c1, c3) = 2040 c1 max(1, c1, 3 c1 c3 / 2)``
* ``bias_deviation_constant(eps, c1, c3)`` adds ``(2/eps) max(2, 2 c1, c3 c1^2 / 9)``

The variance bound uses the deviation level ``max(2 ln(2 N / beta), 2)`` and
the bias bound ``max(2 ln(6 N / beta), 2)``; the two are deliberately kept
distinct.  The bias bound minimizes over a fixed 99-point epsilon grid, which
keeps the optimization auditable.  ``kappa_scale`` rescales both constants
(0 switches the additive terms off for diagnostics; the theoretical choice
is 1 and is known to be conservative).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import Model, ModelCollection

EPSILON_GRID = tuple(float(e) for e in np.linspace(0.01, 0.99, 99))


def variance_deviation_constant(c1: float, c3: float) -> float:
    """Explicit constant of the variance deviation term."""
    if c1 <= 0 or c3 <= 0:
        raise ValueError("constants must be positive")
    return 2040.0 * c1 * max(1.0, c1, 1.5 * c1 * c3)


def bias_deviation_constant(epsilon: float, c1: float, c3: float) -> float:
    """Explicit constant of the bias deviation term at trade-off ``epsilon``."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    extra = (2.0 / epsilon) * max(2.0, 2.0 * c1, c3 * c1 * c1 / 9.0)
    return variance_deviation_constant(c1, c3) + extra


@dataclass(frozen=True)
class BoundConfig:
    """Parameters of the radius bounds.

    ``m2`` and ``m_inf`` bound the L2 and sup norms of the unknown density,
    ``eta`` is the allowed out-of-span radius, and ``kappa_scale``
    multiplies the explicit constants.
    """

    beta: float
    m2: float
    m_inf: float
    eta: float = 0.0
    kappa_scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if self.m2 <= 0 or self.m_inf <= 0:
            raise ValueError("norm bounds must be positive")
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")
        if self.kappa_scale < 0:
            raise ValueError("kappa_scale must be nonnegative")


def _deviation_level(cardinality: int, beta: float, prefactor: float) -> float:
    return max(2.0 * math.log(prefactor * cardinality / beta), 2.0)


def variance_bound(
    variance_estimate: float,
    model: Model,
    collection: ModelCollection,
    config: BoundConfig,
    n: int,
) -> float:
    """Uniform high-probability bound on the estimation-error term.

    Adds to the data-driven estimate the deviation term
    ``kappa (1 + sqrt(min(m_inf, m2 sqrt(d), d))) sqrt(d) x / n``.
    """
    if variance_estimate < 0:
        raise ValueError("the variance estimate is nonnegative by construction")
    d = model.dim
    x = _deviation_level(collection.cardinality, config.beta, 2.0)
    kappa = variance_deviation_constant(collection.c1, collection.c_m)
    norm_part = 1.0 + math.sqrt(min(config.m_inf, config.m2 * math.sqrt(d), float(d)))
    return variance_estimate + config.kappa_scale * kappa * norm_part * math.sqrt(d) * x / n


def bias_bound(
    bias_estimate: float,
    sub_model: Model,
    collection: ModelCollection,
    config: BoundConfig,
    n: int,
) -> float:
    """Uniform high-probability bound on the squared bias term.

    Minimizes ``(estimate + kappa(eps) A) / (1 - eps)`` over the epsilon
    grid, where ``A`` involves the *top* dimension of the collection.  A
    negative estimate is allowed in the numerator.
    """
    if not sub_model.shares_prefix_with(collection.top):
        raise ValueError(f"{sub_model.label} is not nested in the collection's top model")
    d_top = collection.top.dim
    x = _deviation_level(collection.cardinality, config.beta, 6.0)
    norm_part = 1.0 + math.sqrt(min(config.m_inf, config.m2 * math.sqrt(d_top)))
    base = config.kappa_scale * norm_part * math.sqrt(d_top) * x / n
    best = math.inf
    for eps in EPSILON_GRID:
        kappa = bias_deviation_constant(eps, collection.c1, collection.c_m)
        best = min(best, (bias_estimate + kappa * base) / (1.0 - eps))
    return float(best)


def radius(
    variance_estimate: float,
    bias_estimate: float,
    model: Model,
    collection: ModelCollection,
    config: BoundConfig,
    n: int,
) -> tuple[float, bool]:
    """Radius ``sqrt(eta^2 + bias bound + variance bound)`` for one model.

    Returns ``(value, clamped)``; the radicand can only go negative when
    ``kappa_scale`` is tiny and the bias estimate very negative, in which
    case it is clamped at zero and flagged.
    """
    v = variance_bound(variance_estimate, model, collection, config, n)
    k = bias_bound(bias_estimate, model, collection, config, n)
    radicand = config.eta**2 + k + v
    if radicand < 0.0:
        return 0.0, True
    return math.sqrt(radicand), False


@dataclass(frozen=True)
class ModelRadius:
    """Per-model record assembled while selecting the confidence ball."""

    model: str
    dim: int
    variance_estimate: float
    bias_estimate: float
    variance_bound: float
    bias_bound: float
    radius_sq: float
    radius: float
    clamped: bool


RadiusReport = tuple[ModelRadius, ...]
