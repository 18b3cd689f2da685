"""Model selection by radius minimization and the resulting confidence ball.

For every model in a nested collection the radius combines the closed-form
resampling variance estimate with the nested-bias U-statistic and the
explicit deviation terms; the ball is centered at the projection estimator
of the model with the smallest radius (ties go to the smallest dimension).
Membership is evaluated in the coefficient space of the collection's top
model, with an optional quadrature term for candidates that have mass
outside the top model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .accumulate import compensated_sum
from .basis import Model, ModelCollection, check_dimension_growth
from .bounds import (
    BoundConfig,
    ModelRadius,
    RadiusReport,
    bias_bound,
    radius,
    variance_bound,
)
from .estimators import (
    Sample,
    project,
    projection_bias_estimate,
    resampling_statistics,
    resampling_variance,
)
from .weights import WeightScheme, sample_weights_batch


@dataclass(frozen=True)
class ConfidenceBall:
    """An L2 ball around a projection estimator, with its selection report."""

    selected_model: str
    selected_index: int
    center: np.ndarray
    radius: float
    top_dim: int
    beta: float
    eta: float
    growth_check_ok: bool
    report: RadiusReport

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).copy()
        center.flags.writeable = False
        object.__setattr__(self, "center", center)

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, coefficients: Sequence[float], residual_norm_sq: float = 0.0) -> bool:
        """Closed-ball membership for a candidate in top-model coordinates.

        ``coefficients`` must have length ``top_dim``; a candidate with a
        component outside the top model passes its squared out-of-span norm
        as ``residual_norm_sq``, which is added in quadrature.
        """
        cand = np.asarray(coefficients, dtype=float)
        if cand.shape != (self.top_dim,):
            raise ValueError(
                f"candidate must have {self.top_dim} top-model coefficients, got shape {cand.shape}"
            )
        if residual_norm_sq < 0:
            raise ValueError("residual_norm_sq must be nonnegative")
        padded = np.zeros(self.top_dim)
        padded[: self.center.size] = self.center
        diff = cand - padded
        dist_sq = compensated_sum(diff * diff) + residual_norm_sq
        return dist_sq <= self.radius * self.radius


def select_model_index(radius_sq_values: Sequence[float], dims: Sequence[int]) -> int:
    """Index of the smallest radius; exact ties go to the smallest dimension.

    Invariant under rescaling all values by a common positive constant.
    """
    if len(radius_sq_values) != len(dims) or not radius_sq_values:
        raise ValueError("need one dimension per radius value")
    order = range(len(dims))
    return min(order, key=lambda i: (radius_sq_values[i], dims[i], i))


def build_confidence_ball(
    sample: Sample,
    collection: ModelCollection,
    scheme: WeightScheme,
    config: BoundConfig,
) -> ConfidenceBall:
    """Compute every model's radius, select the minimizer, build the ball.

    The dimension-growth check is advisory here: a failure is recorded in
    ``growth_check_ok`` and the construction proceeds.
    """
    if scheme.n != sample.n:
        raise ValueError(f"scheme size {scheme.n} does not match sample size {sample.n}")
    growth = check_dimension_growth(collection, sample.n, config.beta)
    top = collection.top
    rows = []
    for model in collection:
        v_est = resampling_variance(sample, model, scheme)
        b_est = projection_bias_estimate(sample, model, top)
        v = variance_bound(v_est, model, collection, config, sample.n)
        k = bias_bound(b_est, model, collection, config, sample.n)
        rho, clamped = radius(v_est, b_est, model, collection, config, sample.n)
        rows.append(
            ModelRadius(
                model=model.label,
                dim=model.dim,
                variance_estimate=v_est,
                bias_estimate=b_est,
                variance_bound=v,
                bias_bound=k,
                radius_sq=config.eta**2 + k + v,
                radius=rho,
                clamped=clamped,
            )
        )
    chosen = select_model_index([r.radius_sq for r in rows], [r.dim for r in rows])
    center = project(sample, collection.models[chosen]).coefficients
    return ConfidenceBall(
        selected_model=rows[chosen].model,
        selected_index=chosen,
        center=center,
        radius=rows[chosen].radius,
        top_dim=top.dim,
        beta=config.beta,
        eta=config.eta,
        growth_check_ok=growth.holds,
        report=tuple(rows),
    )


def order_statistic_rank(level: float, count: int) -> int:
    """Rank ``ceil(level * count)`` in 1..count, robust to float fuzz."""
    t = level * count
    nearest = round(t)
    if abs(t - nearest) < 1e-9:
        t = nearest
    return min(max(int(math.ceil(t)), 1), count)


def resampled_quantile_radius(
    sample: Sample,
    model: Model,
    scheme: WeightScheme,
    alpha: float,
    n_draws: int,
    rng: np.random.Generator,
) -> float:
    """Empirical (1 - alpha) quantile of the reweighted squared statistic.

    Draws ``n_draws`` weight vectors, computes the normalized reweighted
    statistic for each, and returns the order statistic of rank
    ``ceil((1 - alpha) n_draws)``; ``alpha -> 0`` gives the largest draw.
    This is the squared-radius threshold used by the empirical coverage
    experiment.
    """
    if n_draws < 100:
        raise ValueError("need at least 100 draws for a stable quantile")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    draws = sample_weights_batch(scheme, n_draws, rng)
    stats = np.sort(resampling_statistics(sample, model, scheme, draws))
    return float(stats[order_statistic_rank(1.0 - alpha, n_draws) - 1])


def ball_to_doc(ball: ConfidenceBall) -> dict:
    """Plain-dict form of a ball for the structured text document."""
    return {
        "selected_model": ball.selected_model,
        "selected_index": ball.selected_index,
        "radius": float(ball.radius),
        "top_dim": ball.top_dim,
        "beta": float(ball.beta),
        "eta": float(ball.eta),
        "growth_check_ok": bool(ball.growth_check_ok),
        "center_coefficients": [float(c) for c in ball.center],
        "models": [
            {
                "model": r.model,
                "dim": r.dim,
                "variance_estimate": float(r.variance_estimate),
                "bias_estimate": float(r.bias_estimate),
                "variance_bound": float(r.variance_bound),
                "bias_bound": float(r.bias_bound),
                "radius_sq": float(r.radius_sq),
                "radius": float(r.radius),
                "clamped": bool(r.clamped),
            }
            for r in ball.report
        ],
    }


def ball_from_doc(doc: dict) -> ConfidenceBall:
    """Inverse of :func:`ball_to_doc`."""
    rows = tuple(
        ModelRadius(
            model=row["model"],
            dim=int(row["dim"]),
            variance_estimate=float(row["variance_estimate"]),
            bias_estimate=float(row["bias_estimate"]),
            variance_bound=float(row["variance_bound"]),
            bias_bound=float(row["bias_bound"]),
            radius_sq=float(row["radius_sq"]),
            radius=float(row["radius"]),
            clamped=bool(row["clamped"]),
        )
        for row in doc["models"]
    )
    return ConfidenceBall(
        selected_model=doc["selected_model"],
        selected_index=int(doc["selected_index"]),
        center=np.array(doc["center_coefficients"], dtype=float),
        radius=float(doc["radius"]),
        top_dim=int(doc["top_dim"]),
        beta=float(doc["beta"]),
        eta=float(doc["eta"]),
        growth_check_ok=bool(doc["growth_check_ok"]),
        report=rows,
    )
