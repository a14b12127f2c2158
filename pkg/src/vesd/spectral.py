"""Eigendecomposition of Hermitian samples and resolvent quadratic forms.

decompose() keeps only the n eigenvalues and the n projection weights
|u_i* x|^2 of a chosen unit vector x onto the eigenbasis; full eigenvector
matrices are never retained past the call.  resolvent_quadratic_form()
computes x* (W - zI)^{-1} x by a direct linear solve, giving an oracle that
is independent of the eigendecomposition route.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .ensemble import MatrixSample, UnitVectorSpec

WEIGHT_SUM_TOL = 1e-10


class EigensolverError(RuntimeError):
    """Eigensolver non-convergence, tagged with the sample's seed record."""

    def __init__(self, message: str, seed_record=None):
        super().__init__(message if seed_record is None else f"{message} (seed_record={seed_record})")
        self.seed_record = seed_record


class ResolventSolveError(RuntimeError):
    """Linear solve failure for W - zI (not expected for Im z > 0)."""


@dataclass
class SpectralData:
    """Ascending eigenvalues and the matching per-eigenvalue weights.

    weights[i] = |u_i* x|^2 for the eigenvector u_i of eigenvalues[i]; they
    are nonnegative and sum to 1 (unitarity).  For repeated eigenvalues the
    split of weight among the computed eigenvectors is solver-dependent, but
    every downstream statistic uses only the summed weight per distinct
    eigenvalue.
    """

    eigenvalues: np.ndarray
    weights: np.ndarray
    n: int
    vector_spec: UnitVectorSpec | None = None


def _entries(w) -> np.ndarray:
    return w.entries if isinstance(w, MatrixSample) else np.asarray(w)


def _seed_record(w):
    return w.seed_record if isinstance(w, MatrixSample) else None


def hermitian_eigensystem(w):
    """Full eigensystem (ascending eigenvalues, eigenvector columns)."""
    mat = _entries(w)
    try:
        return np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc), _seed_record(w)) from exc


def eigenvector_weights(eigenvectors: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Projection weights |u_i* x|^2 for the columns u_i."""
    y = eigenvectors.conj().T @ x
    return np.abs(y) ** 2


def decompose(w, x: np.ndarray, vector_spec: UnitVectorSpec | None = None) -> SpectralData:
    """Eigendecompose W and project x, returning eigenvalue/weight pairs.

    Requires Hermitian W and a unit vector x.  Raises EigensolverError on
    solver non-convergence; complains if the weights fail to sum to 1 within
    1e-10 (a unitarity loss that would poison every downstream CDF).
    """
    eigenvalues, eigenvectors = hermitian_eigensystem(w)
    weights = eigenvector_weights(eigenvectors, x)
    total = float(weights.sum())
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise EigensolverError(
            f"projection weights sum to {total!r}, not 1", _seed_record(w)
        )
    return SpectralData(eigenvalues, weights, len(eigenvalues), vector_spec)


def resolvent_quadratic_form(w, x: np.ndarray, z: complex) -> complex:
    """x* (W - zI)^{-1} x by direct solve, for Im z > 0.

    The shifted matrix is complex symmetric when W is real, which the solver
    exploits; the result always has positive imaginary part (Herglotz).
    """
    z = complex(z)
    if z.imag <= 0.0:
        raise ValueError("resolvent_quadratic_form requires Im z > 0")
    mat = _entries(w)
    n = mat.shape[0]
    shifted = mat - z * np.eye(n)
    assume = "gen" if np.iscomplexobj(mat) else "sym"
    try:
        y = scipy.linalg.solve(shifted, np.asarray(x, dtype=complex), assume_a=assume)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as exc:
        raise ResolventSolveError(f"solve failed at z={z!r}: {exc}") from exc
    return complex(np.vdot(x, y))
