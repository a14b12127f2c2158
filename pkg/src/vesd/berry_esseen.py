"""Numerical evaluation of the smoothing inequality that bounds a Kolmogorov
distance by Stieltjes-transform data.

For a step CDF H and the semicircle CDF F, the bound reads

    ||H - F|| <= 1/(pi (1-kappa) (2 gamma - 1)) * (
        int_{-A}^{A} |s_H(u+iv) - s(u+iv)| du
        + (2 pi / v) int_{|x|>B} |H(x) - F(x)| dx
        + (1/v) sup_x int_{|h|<=2 v tau} |F(x+h) - F(x)| dh )

with gamma = (2/pi) arctan(tau) > 1/2 and
kappa = 4B / (pi (A-B) (2 gamma - 1)) < 1.  Term by term: (i) composite
trapezoid quadrature with step at most v/10 (the integrand varies on scale
v); (ii) exact piecewise integration, using that F is 0 below -B and 1 above
B for B >= 2, so the integrand is the step function H resp. 1 - H; (iii) the
Lipschitz bound |F(x+h) - F(x)| <= |h|/pi, giving (2 v tau)^2 / (pi v).
Replacing term (iii) by its upper bound only enlarges the right-hand side,
so the verified inequality stays valid.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .empirical import WeightedStepCDF, empirical_stieltjes_grid
from .metrics import kolmogorov_to_semicircle
from .semicircle import semicircle_stieltjes

RELATIVE_SLACK = 1e-6


@dataclass(frozen=True)
class SmoothingInequalityParams:
    """Constants of the smoothing inequality; gamma and kappa are derived.

    v <= 0 means "derive from the dimension": v = 2 / sqrt(n) at use time.
    """

    a: float = 16.0
    b: float = 3.0
    tau: float = 2.0
    gamma: float = 0.0
    kappa: float = 0.0
    v: float = 0.0

    @property
    def prefactor(self) -> float:
        return 1.0 / (np.pi * (1.0 - self.kappa) * (2.0 * self.gamma - 1.0))

    def with_v(self, v: float) -> "SmoothingInequalityParams":
        return replace(self, v=v)


def derive_constants(a: float = 16.0, b: float = 3.0, tau: float = 2.0, v: float = 0.0) -> SmoothingInequalityParams:
    """Compute gamma and kappa and validate the admissibility constraints.

    Requires a > b > 0 and tau > 1 (tau = 1 gives gamma exactly 1/2, which
    collapses the prefactor) and rejects any (a, b, tau) with kappa >= 1.
    """
    if not a > b > 0.0:
        raise ValueError("need a > b > 0")
    gamma = (2.0 / np.pi) * np.arctan(tau)
    if gamma <= 0.5:
        raise ValueError(f"gamma={gamma:.6g} <= 1/2 (need tau > 1)")
    kappa = 4.0 * b / (np.pi * (a - b) * (2.0 * gamma - 1.0))
    if kappa >= 1.0:
        raise ValueError(f"kappa={kappa:.6g} >= 1")
    return SmoothingInequalityParams(a, b, tau, float(gamma), float(kappa), v)


def _resolve_v(params: SmoothingInequalityParams, n: int) -> float:
    if params.v > 0.0:
        return params.v
    if params.v < 0.0:
        raise ValueError("v must be positive")
    return 2.0 / np.sqrt(n)


def transform_gap_integral(h: WeightedStepCDF, a: float, v: float) -> float:
    """Term (i): int_{-A}^{A} |s_H(u+iv) - s(u+iv)| du, trapezoid rule."""
    if v <= 0.0:
        raise ValueError("v must be positive")
    steps = max(int(np.ceil(2.0 * a / (v / 10.0))), 2)
    us = np.linspace(-a, a, steps + 1)
    zs = us + 1j * v
    gap = np.abs(empirical_stieltjes_grid(h, zs) - semicircle_stieltjes(zs))
    return float(np.trapezoid(gap, us))


def tail_integral(h: WeightedStepCDF, b: float) -> float:
    """int_{x < -b} H(x) dx + int_{x > b} (1 - H(x)) dx, exact.

    Both integrands are step functions vanishing beyond the extreme jumps of
    H, so the integral is a finite sum of box areas.
    """
    pts = h.jump_points
    cums = h.cum_weights
    total = 0.0
    # Left tail: H is cums[j] on [pts[j], pts[j+1]); nonzero only below -b.
    for j in range(len(pts) - 1):
        lo, hi = pts[j], min(pts[j + 1], -b)
        if hi > lo:
            total += cums[j] * (hi - lo)
    if pts[-1] < -b:
        total += cums[-1] * (-b - pts[-1])
    # Right tail: 1 - H is (1 - cums[j]) on [pts[j], pts[j+1]); the segment
    # between b and the first jump (if any) has H = 0, integrand 1.
    if pts[0] > b:
        total += pts[0] - b
    for j in range(len(pts) - 1):
        lo, hi = max(pts[j], b), pts[j + 1]
        if hi > lo:
            total += (1.0 - cums[j]) * (hi - lo)
    return total


def modulus_term(v: float, tau: float) -> float:
    """Term (iii) bound: (1/v) * int_{|h|<=2 v tau} |h|/pi dh = 4 v tau^2 / pi."""
    return (2.0 * v * tau) ** 2 / (np.pi * v)


def smoothing_rhs(h: WeightedStepCDF, params: SmoothingInequalityParams, n: int) -> float:
    """Right-hand side of the smoothing inequality for the step CDF h."""
    v = _resolve_v(params, n)
    term_i = transform_gap_integral(h, params.a, v)
    term_ii = (2.0 * np.pi / v) * tail_integral(h, params.b)
    term_iii = modulus_term(v, params.tau)
    return params.prefactor * (term_i + term_ii + term_iii)


def verify_inequality(h: WeightedStepCDF, params: SmoothingInequalityParams, n: int):
    """(lhs, rhs, holds): Kolmogorov distance against the smoothing bound."""
    lhs = kolmogorov_to_semicircle(h).distance
    rhs = smoothing_rhs(h, params, n)
    return lhs, rhs, lhs <= rhs * (1.0 + RELATIVE_SLACK)
