"""Step distribution functions built from spectral data, and the centered
partial-sum (bridge) process of the eigenvector weights."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .spectral import SpectralData

NEGATIVE_WEIGHT_TOL = -1e-12


@dataclass
class WeightedStepCDF:
    """Right-continuous step CDF: jumps at distinct ascending points.

    cum_weights[j] is the CDF value at and right of jump_points[j]; equal
    abscissae are merged into one jump, zero-weight jumps are dropped, so the
    representation is canonical and supports exact equality tests.
    """

    jump_points: np.ndarray
    cum_weights: np.ndarray
    n: int

    def evaluate(self, x) -> np.ndarray:
        """H(x), right-continuous."""
        idx = np.searchsorted(self.jump_points, np.asarray(x, dtype=float), side="right")
        padded = np.concatenate(([0.0], self.cum_weights))
        out = padded[idx]
        return out if out.ndim else float(out)

    def left_limit(self, x) -> np.ndarray:
        """H(x-)."""
        idx = np.searchsorted(self.jump_points, np.asarray(x, dtype=float), side="left")
        padded = np.concatenate(([0.0], self.cum_weights))
        out = padded[idx]
        return out if out.ndim else float(out)

    @property
    def jump_weights(self) -> np.ndarray:
        return np.diff(self.cum_weights, prepend=0.0)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["jump_point", "cum_weight"])
            for x, c in zip(self.jump_points, self.cum_weights):
                writer.writerow([repr(float(x)), repr(float(c))])

    @classmethod
    def from_csv(cls, path) -> "WeightedStepCDF":
        with open(Path(path), newline="") as fh:
            rows = list(csv.DictReader(fh))
        pts = np.array([float(r["jump_point"]) for r in rows])
        cums = np.array([float(r["cum_weight"]) for r in rows])
        return cls(pts, cums, len(pts))


@dataclass
class BridgePath:
    """The process t -> sqrt(n/2) * sum_{i <= nt} (w_i - 1/n) on t = i/n."""

    times: np.ndarray
    values: np.ndarray


def _step_from_pairs(points: np.ndarray, weights: np.ndarray, n: int) -> WeightedStepCDF:
    if np.any(weights < NEGATIVE_WEIGHT_TOL):
        raise ValueError(f"negative weight below {NEGATIVE_WEIGHT_TOL}")
    weights = np.clip(weights, 0.0, None)
    uniq, inverse = np.unique(points, return_inverse=True)
    merged = np.bincount(inverse, weights=weights, minlength=len(uniq))
    keep = merged > 0.0
    return WeightedStepCDF(uniq[keep], np.cumsum(merged[keep]), n)


def build_vesd(sd: SpectralData) -> WeightedStepCDF:
    """Step CDF placing mass |u_i* x|^2 at each eigenvalue."""
    return _step_from_pairs(np.asarray(sd.eigenvalues, dtype=float), np.asarray(sd.weights, dtype=float), sd.n)


def build_esd(sd: SpectralData) -> WeightedStepCDF:
    """Step CDF placing mass 1/n at each eigenvalue."""
    eigenvalues = np.asarray(sd.eigenvalues, dtype=float)
    return _step_from_pairs(eigenvalues, np.full(sd.n, 1.0 / sd.n), sd.n)


def empirical_stieltjes(cdf: WeightedStepCDF, z: complex) -> complex:
    """sum_j weight_j / (jump_j - z) for Im z > 0."""
    z = complex(z)
    if z.imag <= 0.0:
        raise ValueError("empirical_stieltjes requires Im z > 0")
    return complex(np.sum(cdf.jump_weights / (cdf.jump_points - z)))


def empirical_stieltjes_grid(cdf: WeightedStepCDF, zs: np.ndarray) -> np.ndarray:
    """Vectorized empirical_stieltjes over a grid of upper-half-plane points."""
    zs = np.asarray(zs, dtype=complex)
    if np.any(zs.imag <= 0.0):
        raise ValueError("empirical_stieltjes_grid requires Im z > 0")
    return (cdf.jump_weights[:, None] / (cdf.jump_points[:, None] - zs[None, :])).sum(axis=0)


def bridge_path(sd: SpectralData) -> BridgePath:
    """Centered cumulative weight process, weights in ascending-eigenvalue order.

    Starts and ends at 0: the weights sum to 1, so the final centered sum
    cancels up to roundoff.
    """
    n = sd.n
    partial = np.concatenate(([0.0], np.cumsum(np.asarray(sd.weights, dtype=float))))
    values = np.sqrt(n / 2.0) * (partial - np.arange(n + 1) / n)
    return BridgePath(np.arange(n + 1) / n, values)


def bridge_value(path: BridgePath, t: float) -> float:
    """Path value at [nt]/n (left-constant between grid times)."""
    n = len(path.times) - 1
    i = min(int(np.floor(n * t)), n)
    return float(path.values[i])


def bridge_relation_check(sd: SpectralData) -> float:
    """Max absolute gap in the identity Q(F(x)) = sqrt(n/2) (H(x) - F(x)).

    Both sides are evaluated at every distinct eigenvalue; the identity is
    algebraic, so anything beyond roundoff (1e-10) signals an ordering or
    merging bug.
    """
    n = sd.n
    vesd = build_vesd(sd)
    esd = build_esd(sd)
    path = bridge_path(sd)
    points = np.unique(np.asarray(sd.eigenvalues, dtype=float))
    h = vesd.evaluate(points)
    f = esd.evaluate(points)
    counts = np.rint(f * n).astype(int)
    lhs = path.values[counts]
    rhs = np.sqrt(n / 2.0) * (np.atleast_1d(h) - np.atleast_1d(f))
    return float(np.max(np.abs(lhs - rhs)))
