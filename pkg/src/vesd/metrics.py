"""Exact Kolmogorov distances and convergence-rate fits.

Between two step functions, or between a step function and the (continuous,
monotone) semicircle CDF, |difference| is monotone on every piece between
consecutive evaluation points, so the supremum is attained at a jump point
evaluated from one of its two sides or at a support edge.  No grid or
tolerance enters the sup itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .empirical import WeightedStepCDF
from .semicircle import SUPPORT, semicircle_cdf

SIDE_AT_JUMP = "at_jump"
SIDE_LEFT_LIMIT = "left_limit"
SIDE_SUPPORT_EDGE = "support_edge"


@dataclass
class DistanceReport:
    distance: float
    argmax_location: float
    side: str


@dataclass
class RateFit:
    """Least-squares descriptions of distance-vs-dimension decay.

    slope/log_coefficient come from the free fit log d = slope * log n + c;
    fixed_exponent_coefficient is the least-squares C in d ~ C n^(-1/2).
    """

    slope: float
    log_coefficient: float
    fixed_exponent_coefficient: float
    r_squared: float


def kolmogorov_to_semicircle(h: WeightedStepCDF) -> DistanceReport:
    """Exact sup_x |H(x) - F(x)| against the semicircle CDF."""
    points = h.jump_points
    f_vals = np.atleast_1d(semicircle_cdf(points))
    at_jump = np.abs(h.cum_weights - f_vals)
    left = np.abs(np.concatenate(([0.0], h.cum_weights[:-1])) - f_vals)

    locations = [points, points]
    gaps = [at_jump, left]
    sides = [SIDE_AT_JUMP, SIDE_LEFT_LIMIT]
    edges = np.array(SUPPORT)
    edge_gap = np.abs(np.atleast_1d(h.evaluate(edges)) - np.array([0.0, 1.0]))
    locations.append(edges)
    gaps.append(edge_gap)
    sides.append(SIDE_SUPPORT_EDGE)

    best = (0.0, float(points[0]) if len(points) else 0.0, SIDE_AT_JUMP)
    for loc, gap, side in zip(locations, gaps, sides):
        i = int(np.argmax(gap))
        if gap[i] > best[0]:
            best = (float(gap[i]), float(loc[i]), side)
    return DistanceReport(*best)


def kolmogorov_between(h1: WeightedStepCDF, h2: WeightedStepCDF) -> float:
    """Exact sup_x |H1(x) - H2(x)| over the union of jump points, both sides."""
    points = np.union1d(h1.jump_points, h2.jump_points)
    gap_right = np.abs(np.atleast_1d(h1.evaluate(points)) - np.atleast_1d(h2.evaluate(points)))
    gap_left = np.abs(np.atleast_1d(h1.left_limit(points)) - np.atleast_1d(h2.left_limit(points)))
    return float(max(gap_right.max(initial=0.0), gap_left.max(initial=0.0)))


def fit_rate(ns, mean_distances) -> RateFit:
    """Fit decay of mean distances against dimension.

    Needs at least 3 points with strictly positive distances.  r_squared is
    computed in log-log space (1.0 when the data are exactly constant, since
    the constant fit is then exact).
    """
    ns = np.asarray(ns, dtype=float)
    ds = np.asarray(mean_distances, dtype=float)
    if len(ns) < 3:
        raise ValueError("rate fit needs at least 3 points")
    if np.any(ds <= 0.0):
        raise ValueError("rate fit needs strictly positive distances")

    log_n = np.log(ns)
    log_d = np.log(ds)
    slope, intercept = np.polyfit(log_n, log_d, 1)
    resid = log_d - (slope * log_n + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((log_d - log_d.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))

    fixed_coeff = float(np.sum(ds * ns**-0.5) / np.sum(1.0 / ns))
    return RateFit(float(slope), float(intercept), fixed_coeff, r_squared)
