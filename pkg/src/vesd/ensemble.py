"""Sampling of Wigner matrices and unit vectors with reproducible streams.

Every draw comes from a counter-based Philox generator keyed by
(master seed, replicate index, role), so replicates can be computed in any
order or in parallel without changing a single bit of output.  Matrix draws
and vector draws use distinct roles; distinct vector laws inside one
replicate use distinct sub-keys.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import erf

ROLE_MATRIX = 0
ROLE_VECTOR = 1

SYMMETRIES = ("real_symmetric", "complex_hermitian")
CONSTRUCTIONS = ("direct_entries", "gaussian_symmetrized")
ENTRY_LAW_KINDS = (
    "std_normal",
    "rademacher",
    "standardized_uniform",
    "standardized_exponential",
    "custom",
)
VECTOR_LAWS = (
    "uniform01",
    "std_normal",
    "poisson1",
    "binomial10_06",
    "canonical_basis",
    "constant",
)
# Stable per-law sub-keys: the vector drawn for (seed, replicate, law) must not
# depend on which other laws are configured in the same run.
_VECTOR_LAW_ORDINAL = {law: i for i, law in enumerate(VECTOR_LAWS)}

# Truncation moments are population constants of the entry law, estimated once
# per (law, threshold) with a fixed seed unrelated to any experiment seed.
_MOMENT_MC_SEED = 0x7C0FFEE
_MOMENT_MC_DRAWS = 1_000_000

_CUSTOM_SAMPLERS: dict[str, Callable[[np.random.Generator, int], np.ndarray]] = {}


class DegenerateTruncationError(ValueError):
    """Raised when the truncated entry variance collapses below 1e-6."""


class AllZeroVectorError(RuntimeError):
    """Raised after 100 consecutive all-zero draws of the raw vector z."""


def register_entry_sampler(sampler_id: str, fn: Callable[[np.random.Generator, int], np.ndarray]) -> None:
    """Register a custom standardized sampler, addressable as EntryLaw('custom', sampler_id).

    The callable receives (rng, size) and must return draws with mean 0 and
    variance 1.
    """
    _CUSTOM_SAMPLERS[sampler_id] = fn


@dataclass(frozen=True)
class EntryLaw:
    """A standardized (mean 0, variance 1) scalar law for matrix entries."""

    kind: str = "std_normal"
    custom_id: str | None = None

    def __post_init__(self):
        if self.kind not in ENTRY_LAW_KINDS:
            raise ValueError(f"unknown entry law kind {self.kind!r}")
        if self.kind == "custom" and not self.custom_id:
            raise ValueError("custom entry law needs a sampler id")

    @property
    def label(self) -> str:
        return f"custom:{self.custom_id}" if self.kind == "custom" else self.kind

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "std_normal":
            return rng.standard_normal(size)
        if self.kind == "rademacher":
            return rng.integers(0, 2, size).astype(float) * 2.0 - 1.0
        if self.kind == "standardized_uniform":
            return (rng.random(size) - 0.5) * np.sqrt(12.0)
        if self.kind == "standardized_exponential":
            return rng.standard_exponential(size) - 1.0
        return np.asarray(_CUSTOM_SAMPLERS[self.custom_id](rng, size), dtype=float)


def parse_entry_law(token: str) -> EntryLaw:
    if token.startswith("custom:"):
        return EntryLaw("custom", token.split(":", 1)[1])
    return EntryLaw(token)


@dataclass(frozen=True)
class TruncationPolicy:
    """Entry preprocessing: truncate at eps_n * n^(1/4), re-center, rescale.

    eps_n = n^(-epsilon_exponent); any exponent in (0, 1/4) makes eps_n
    vanish while eps_n * n^(1/4) grows.  remove_diagonal zeroes the diagonal
    and may be used with or without truncation.
    """

    enabled: bool = False
    epsilon_exponent: float = 0.05
    remove_diagonal: bool = False

    def __post_init__(self):
        if not 0.0 < self.epsilon_exponent < 0.25:
            raise ValueError("epsilon_exponent must lie in (0, 1/4)")

    def epsilon(self, n: int) -> float:
        return float(n) ** (-self.epsilon_exponent)

    def threshold(self, n: int) -> float:
        """Truncation level for the unscaled (sqrt(n)-scaled) entries."""
        return float(n) ** (0.25 - self.epsilon_exponent)


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for one Wigner matrix: dimension, symmetry class, entry law,
    construction route, and preprocessing policy."""

    n: int
    symmetry: str = "real_symmetric"
    entry_law: EntryLaw = field(default_factory=EntryLaw)
    preprocessing: TruncationPolicy = field(default_factory=TruncationPolicy)
    construction: str = "gaussian_symmetrized"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("ensemble dimension must be at least 2")
        if self.symmetry not in SYMMETRIES:
            raise ValueError(f"unknown symmetry {self.symmetry!r}")
        if self.construction not in CONSTRUCTIONS:
            raise ValueError(f"unknown construction {self.construction!r}")
        # The symmetrized route (M + M*)/sqrt(2n) only reproduces a standardized
        # Wigner ensemble for normal entries.
        if self.construction == "gaussian_symmetrized" and self.entry_law.kind != "std_normal":
            raise ValueError("gaussian_symmetrized construction requires std_normal entries")

    @property
    def tag(self) -> str:
        return f"{self.symmetry}:{self.construction}:{self.entry_law.label}"

    def with_n(self, n: int) -> "EnsembleSpec":
        return replace(self, n=n)


@dataclass(frozen=True)
class UnitVectorSpec:
    """Law of the raw vector z; the sampled vector is always z / ||z||."""

    law: str = "uniform01"
    k: int = 1  # 1-based coordinate, canonical_basis only

    def __post_init__(self):
        if self.law not in VECTOR_LAWS:
            raise ValueError(f"unknown unit-vector law {self.law!r}")
        if self.law == "canonical_basis" and self.k < 1:
            raise ValueError("canonical_basis index is 1-based")

    @property
    def label(self) -> str:
        return f"canonical_basis:{self.k}" if self.law == "canonical_basis" else self.law


def parse_vector_law(token: str) -> UnitVectorSpec:
    if token.startswith("canonical_basis:"):
        return UnitVectorSpec("canonical_basis", int(token.split(":", 1)[1]))
    return UnitVectorSpec(token)


@dataclass
class MatrixSample:
    """An n x n Hermitian draw together with the key that reproduces it."""

    entries: np.ndarray
    spec: EnsembleSpec
    seed_record: tuple[int, int]  # (master seed, replicate index)

    @property
    def n(self) -> int:
        return self.spec.n


def stream(master_seed: int, replicate: int, *role_key: int) -> np.random.Generator:
    """Counter-based generator for one (seed, replicate, role) cell."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(replicate, *role_key))
    return np.random.Generator(np.random.Philox(ss))


def _hermitize_upper(x_diag: np.ndarray, x_upper: np.ndarray, n: int, complex_entries: bool) -> np.ndarray:
    dtype = complex if complex_entries else float
    x = np.zeros((n, n), dtype=dtype)
    iu = np.triu_indices(n, k=1)
    x[iu] = x_upper
    x[(iu[1], iu[0])] = np.conj(x_upper)
    np.fill_diagonal(x, x_diag)
    return x


def sample_wigner(spec: EnsembleSpec, seed: int, replicate: int) -> MatrixSample:
    """Draw one Hermitian matrix W per the spec; deterministic in (seed, replicate).

    gaussian_symmetrized: W = (M + M*) / sqrt(2n) with M i.i.d. standard
    (complex) normal.  direct_entries: W = X / sqrt(n), upper-triangle
    entries i.i.d. from the entry law (complex case: (a + ib)/sqrt(2) with a,
    b i.i.d. from the law), real diagonal i.i.d. from the law.  When the
    preprocessing policy is enabled the truncation pipeline is applied before
    returning.
    """
    n = spec.n
    # n enters the key so that sweep dimensions draw independent streams.
    rng = stream(seed, replicate, ROLE_MATRIX, n)
    complex_entries = spec.symmetry == "complex_hermitian"

    if spec.construction == "gaussian_symmetrized":
        if complex_entries:
            m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            m /= np.sqrt(2.0)
            w = (m + m.conj().T) / np.sqrt(2.0 * n)
        else:
            m = rng.standard_normal((n, n))
            w = (m + m.T) / np.sqrt(2.0 * n)
    else:
        n_upper = n * (n - 1) // 2
        if complex_entries:
            upper = (spec.entry_law.sample(rng, n_upper) + 1j * spec.entry_law.sample(rng, n_upper)) / np.sqrt(2.0)
        else:
            upper = spec.entry_law.sample(rng, n_upper)
        diag = spec.entry_law.sample(rng, n)
        w = _hermitize_upper(diag, upper, n, complex_entries) / np.sqrt(n)

    out = MatrixSample(w, spec, (seed, replicate))
    if spec.preprocessing.enabled:
        out = preprocess_entries(out, spec.preprocessing)
    elif spec.preprocessing.remove_diagonal:
        np.fill_diagonal(out.entries, 0.0)
    return out


def truncated_entry_moments(law: EntryLaw, complex_entries: bool, threshold: float):
    """Population mean m and standard deviation sigma1 of X * I(|X| <= threshold).

    Closed forms for std_normal and rademacher; a fixed-seed 1e6-draw Monte
    Carlo for every other law.  The complex case refers to the composite
    entry (a + ib)/sqrt(2).
    """
    t = float(threshold)
    if law.kind == "std_normal":
        if complex_entries:
            # |X|^2 is Exp(1); E[X I] = 0 by circular symmetry.
            var = 1.0 - (1.0 + t * t) * np.exp(-t * t)
            return 0.0, float(np.sqrt(max(var, 0.0)))
        var = erf(t / np.sqrt(2.0)) - t * np.sqrt(2.0 / np.pi) * np.exp(-t * t / 2.0)
        return 0.0, float(np.sqrt(max(var, 0.0)))
    if law.kind == "rademacher":
        # |X| = 1 in both the real and the composite complex case.
        return 0.0, (1.0 if t >= 1.0 else 0.0)
    return _monte_carlo_moments(law, complex_entries, t)


@lru_cache(maxsize=64)
def _cached_mc_moments(kind: str, custom_id: str | None, complex_entries: bool, threshold: float):
    law = EntryLaw(kind, custom_id)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(_MOMENT_MC_SEED)))
    if complex_entries:
        draws = (law.sample(rng, _MOMENT_MC_DRAWS) + 1j * law.sample(rng, _MOMENT_MC_DRAWS)) / np.sqrt(2.0)
    else:
        draws = law.sample(rng, _MOMENT_MC_DRAWS)
    kept = draws * (np.abs(draws) <= threshold)
    m = kept.mean()
    var = float(np.mean(np.abs(kept - m) ** 2))
    m = complex(m) if complex_entries else float(np.real(m))
    return m, float(np.sqrt(var))


def _monte_carlo_moments(law: EntryLaw, complex_entries: bool, threshold: float):
    return _cached_mc_moments(law.kind, law.custom_id, complex_entries, threshold)


def preprocess_entries(raw: MatrixSample, policy: TruncationPolicy) -> MatrixSample:
    """Truncate, re-center, and rescale the off-diagonal entries of a sample.

    On the sqrt(n)-scaled entries X: X_hat = (X * I(|X| <= t) - m) / sigma1
    with t = eps_n * n^(1/4), m and sigma1 the population moments of the
    truncated entry.  The diagonal is zeroed when the policy says so and left
    untouched otherwise.  Output entries satisfy |sqrt(n) W_ij| <= 2t/sigma1.
    """
    if not policy.enabled:
        raise ValueError("preprocess_entries requires an enabled policy")
    spec = raw.spec
    n = spec.n
    t = policy.threshold(n)
    complex_entries = spec.symmetry == "complex_hermitian"
    m, sigma1 = truncated_entry_moments(spec.entry_law, complex_entries, t)
    if sigma1 <= 1e-6:
        raise DegenerateTruncationError(
            f"truncated entry std {sigma1:.3g} at threshold {t:.3g} is degenerate"
        )

    x = raw.entries * np.sqrt(n)
    iu = np.triu_indices(n, k=1)
    upper = (x[iu] * (np.abs(x[iu]) <= t) - m) / sigma1
    # Hermitian input has an exactly real diagonal.
    diag = np.zeros(n) if policy.remove_diagonal else np.real(x[np.diag_indices(n)])
    out = _hermitize_upper(diag, upper, n, complex_entries) / np.sqrt(n)
    return MatrixSample(out, spec, raw.seed_record)


def sample_unit_vector(spec: UnitVectorSpec, n: int, seed: int, replicate: int) -> np.ndarray:
    """Draw the unit vector x = z / ||z|| for the given law.

    Deterministic in (seed, replicate, law).  Poisson and binomial draws are
    used raw (not standardized); an all-zero z is redrawn, and 100 consecutive
    all-zero draws raise AllZeroVectorError.
    """
    if n < 1:
        raise ValueError("vector dimension must be at least 1")
    if spec.law == "canonical_basis":
        if spec.k > n:
            raise ValueError(f"canonical index {spec.k} exceeds dimension {n}")
        x = np.zeros(n)
        x[spec.k - 1] = 1.0
        return x
    if spec.law == "constant":
        return np.full(n, 1.0 / np.sqrt(n))

    rng = stream(seed, replicate, ROLE_VECTOR, n, _VECTOR_LAW_ORDINAL[spec.law])
    for _ in range(100):
        if spec.law == "uniform01":
            z = rng.random(n)
        elif spec.law == "std_normal":
            z = rng.standard_normal(n)
        elif spec.law == "poisson1":
            z = rng.poisson(1.0, n).astype(float)
        else:
            z = rng.binomial(10, 0.6, n).astype(float)
        norm = np.linalg.norm(z)
        if norm > 0.0:
            return z / norm
    raise AllZeroVectorError(f"law {spec.law}: 100 consecutive all-zero draws at n={n}")
