"""The semicircle distribution: density, CDF, and Stieltjes transform.

The limit law lives on [-2, 2] with density

    f(x) = sqrt(4 - x^2) / (2 pi),

CDF (closed form, obtained by integrating the density)

    F(x) = 1/2 + x sqrt(4 - x^2) / (4 pi) + arcsin(x/2) / pi,

and Stieltjes transform s(z) = int dF(x) / (x - z), which for Im z > 0 is
the root of s^2 + z s + 1 = 0 with positive imaginary part.  All functions
are stateless and accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SUPPORT = (-2.0, 2.0)


def semicircle_pdf(x):
    """Density sqrt(4 - x^2) / (2 pi) on [-2, 2], zero outside."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 2.0
    out = np.zeros_like(x)
    out[inside] = np.sqrt(4.0 - x[inside] ** 2) / (2.0 * np.pi)
    return out if out.ndim else float(out)


def semicircle_cdf(x):
    """Distribution function of the semicircle law, clamped to [0, 1].

    Evaluates the closed form on [-2, 2]; constant 0 below the support and
    1 above it.  Scalar in, scalar out; arrays are mapped elementwise.
    """
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, -2.0, 2.0)
    val = 0.5 + xc * np.sqrt(4.0 - xc**2) / (4.0 * np.pi) + np.arcsin(xc / 2.0) / np.pi
    out = np.clip(val, 0.0, 1.0)
    return out if out.ndim else float(out)


def semicircle_stieltjes(z):
    """Stieltjes transform s(z) for Im z > 0.

    Picks, among the two roots (-z +- sqrt(z^2 - 4))/2 of the fixed-point
    quadratic s^2 + z s + 1 = 0, the one with positive imaginary part (the
    roots multiply to 1, so exactly one lies in the upper half-plane when
    Im z > 0).  Selecting by sign of the imaginary part instead of by the
    principal square root avoids branch-cut artifacts near the real axis.

    Raises ValueError if any Im z <= 0.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0.0):
        raise ValueError("semicircle_stieltjes requires Im z > 0")
    w = np.sqrt(z * z - 4.0)
    r1 = (-z + w) / 2.0
    r2 = (-z - w) / 2.0
    out = np.where(r1.imag >= r2.imag, r1, r2)
    return out if out.ndim else complex(out)


def lipschitz_modulus(h):
    """Uniform bound |h| / pi on |F(x + h) - F(x)| over all x.

    The density is at most 1/pi (attained at x = 0), so the CDF increment
    over an interval of length |h| never exceeds |h| / pi.
    """
    h = np.asarray(h, dtype=float)
    out = np.abs(h) / np.pi
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class EvaluationDomain:
    """Rectangle in the upper half-plane on which transforms are compared.

    The imaginary part is pinned to the dimension through v(n) = c0 / sqrt(n);
    the real part runs over [u_min, u_max] with spacing u_step.
    """

    u_min: float = -16.0
    u_max: float = 16.0
    c0: float = 2.0
    u_step: float = 0.1

    def __post_init__(self):
        if not self.u_min < self.u_max:
            raise ValueError("u_min must be below u_max")
        if self.c0 <= 0.0:
            raise ValueError("c0 must be positive")
        if self.u_step <= 0.0:
            raise ValueError("u_step must be positive")

    def v(self, n: int) -> float:
        return self.c0 / np.sqrt(n)

    def u_grid(self) -> np.ndarray:
        count = int(np.floor((self.u_max - self.u_min) / self.u_step)) + 1
        return self.u_min + self.u_step * np.arange(count)

    def z_grid(self, n: int) -> np.ndarray:
        return self.u_grid() + 1j * self.v(n)
