"""Monte Carlo experiment runner: dimension sweeps, distance aggregation,
rate fits, and the resolvent bias scan.

Replicates are independent jobs keyed by (master seed, replicate, role), so
they may run on any number of worker threads; records are re-assembled into
a fixed logical order (dimension, then vector law, then replicate) before
anything is emitted, which makes every output a pure function of the config.
Per-replicate wall times are measured only when timing is enabled, because
they are the one quantity that cannot be reproduced run to run.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .berry_esseen import SmoothingInequalityParams, verify_inequality
from .empirical import bridge_path, bridge_value, build_esd, build_vesd
from .ensemble import EnsembleSpec, UnitVectorSpec, sample_unit_vector, sample_wigner
from .metrics import fit_rate, kolmogorov_to_semicircle
from .semicircle import EvaluationDomain, semicircle_stieltjes
from .spectral import (
    EigensolverError,
    SpectralData,
    eigenvector_weights,
    hermitian_eigensystem,
    resolvent_quadratic_form,
)

CSV_HEADER = [
    "n",
    "replicate",
    "vector_law",
    "ensemble",
    "seed",
    "delta_vesd",
    "delta_esd",
    "be_lhs",
    "be_rhs",
    "wall_time_ms",
]

RECORDS_CSV = "records.csv"
SUMMARY_JSON = "summary.json"
BIAS_CSV = "bias_scan.csv"
BRIDGE_CSV = "bridge_paths.csv"


@dataclass
class ExperimentConfig:
    ensemble: EnsembleSpec
    vector_specs: list[UnitVectorSpec]
    n_values: list[int]
    replicates: int
    master_seed: int
    out_dir: Path | None = None
    out_format: str = "csv"
    berry: SmoothingInequalityParams | None = None
    bias_domain: EvaluationDomain | None = None
    bias_u_values: list[float] | None = None
    emit_step_cdfs: bool = False
    timing: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if not self.n_values or sorted(self.n_values) != list(self.n_values):
            raise ValueError("n_values must be a nonempty ascending list")
        if not self.vector_specs:
            raise ValueError("at least one vector law is required")
        if self.out_format != "csv":
            raise ValueError(f"unsupported output format {self.out_format!r}")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


@dataclass
class ExperimentRecord:
    n: int
    replicate: int
    vector_law: str
    ensemble_tag: str
    seed: str
    delta_vesd: float | None
    delta_esd: float | None
    be_lhs: float | None = None
    be_rhs: float | None = None
    wall_time_ms: int | None = None
    error: str | None = None

    def to_row(self) -> list[str]:
        def num(x):
            return "" if x is None else repr(float(x))

        return [
            str(self.n),
            str(self.replicate),
            self.vector_law,
            self.ensemble_tag,
            self.seed,
            num(self.delta_vesd),
            num(self.delta_esd),
            num(self.be_lhs),
            num(self.be_rhs),
            "" if self.wall_time_ms is None else str(self.wall_time_ms),
        ]

    @classmethod
    def from_row(cls, row: dict) -> "ExperimentRecord":
        def num(s):
            return None if s == "" else float(s)

        wall = row["wall_time_ms"]
        return cls(
            int(row["n"]),
            int(row["replicate"]),
            row["vector_law"],
            row["ensemble"],
            row["seed"],
            num(row["delta_vesd"]),
            num(row["delta_esd"]),
            num(row["be_lhs"]),
            num(row["be_rhs"]),
            None if wall == "" else int(wall),
        )


def _sanitize(label: str) -> str:
    return label.replace(":", "_")


def _replicate_job(cfg: ExperimentConfig, n: int, rep: int):
    """All per-(n, replicate) work: one matrix, one decomposition, all laws."""
    ens = cfg.ensemble.with_n(n)
    t0 = time.perf_counter()
    seed_str = f"{cfg.master_seed}:{rep}"
    try:
        sample = sample_wigner(ens, cfg.master_seed, rep)
        eigenvalues, eigenvectors = hermitian_eigensystem(sample)
    except EigensolverError as exc:
        return [
            ExperimentRecord(n, rep, vs.label, ens.tag, seed_str, None, None, error=str(exc))
            for vs in cfg.vector_specs
        ], None

    esd_sd = SpectralData(eigenvalues, np.full(n, 1.0 / n), n)
    esd = build_esd(esd_sd)
    delta_esd = kolmogorov_to_semicircle(esd).distance

    records = []
    cdfs = {} if cfg.emit_step_cdfs and rep == 0 else None
    if cdfs is not None:
        cdfs[f"cdf_esd_n{n}.csv"] = esd
    for vs in cfg.vector_specs:
        x = sample_unit_vector(vs, n, cfg.master_seed, rep)
        weights = eigenvector_weights(eigenvectors, x)
        sd = SpectralData(eigenvalues, weights, n, vs)
        vesd = build_vesd(sd)
        delta_vesd = kolmogorov_to_semicircle(vesd).distance
        be_lhs = be_rhs = None
        if cfg.berry is not None:
            be_lhs, be_rhs, _ = verify_inequality(vesd, cfg.berry, n)
        if cdfs is not None:
            cdfs[f"cdf_vesd_n{n}_{_sanitize(vs.label)}.csv"] = vesd
        records.append(
            ExperimentRecord(n, rep, vs.label, ens.tag, seed_str, delta_vesd, delta_esd, be_lhs, be_rhs)
        )
    wall_ms = int(round((time.perf_counter() - t0) * 1000.0))
    if cfg.timing:
        for rec in records:
            rec.wall_time_ms = wall_ms
    return records, cdfs


def run_experiment(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    """Run the sweep and return records in deterministic logical order.

    Eigensolver failures become records carrying an error and empty
    distances; they are reported, not dropped.  Step-CDF files for replicate
    0 of each (n, law) are written when emit_step_cdfs is set and an output
    directory is configured.
    """
    jobs = [(n, rep) for n in cfg.n_values for rep in range(cfg.replicates)]
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = dict(zip(jobs, pool.map(lambda j: _replicate_job(cfg, *j), jobs)))
    else:
        results = {job: _replicate_job(cfg, *job) for job in jobs}

    if cfg.emit_step_cdfs and cfg.out_dir is not None:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        for (_, rep), (_, cdfs) in sorted(results.items()):
            if rep == 0 and cdfs:
                for name, cdf in sorted(cdfs.items()):
                    cdf.to_csv(cfg.out_dir / name)

    by_key = {}
    for (n, rep), (records, _) in results.items():
        for rec in records:
            by_key[(n, rec.vector_law, rep)] = rec
    ordered = []
    for n in cfg.n_values:
        for vs in cfg.vector_specs:
            for rep in range(cfg.replicates):
                ordered.append(by_key[(n, vs.label, rep)])
    return ordered


def write_records_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(rec.to_row())


def read_records_csv(path) -> list[ExperimentRecord]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path}: {reader.fieldnames}")
        return [ExperimentRecord.from_row(row) for row in reader]


def _law_summary(ns, means_by_n):
    means = [means_by_n[n] for n in ns]
    fit = fit_rate(ns, means)
    return {
        "mean_distance": {str(n): means_by_n[n] for n in ns},
        "slope": fit.slope,
        "log_coefficient": fit.log_coefficient,
        "fixed_exponent_coefficient": fit.fixed_exponent_coefficient,
        "r_squared": fit.r_squared,
    }


def aggregate_and_fit(records) -> dict:
    """Per-law mean distances and rate fits, plus the ESD fit.

    Requires at least 3 distinct dimensions.  The ESD column repeats across
    vector laws within a replicate (one matrix serves every law), so the ESD
    aggregate is taken from the first law's rows.
    """
    laws = []
    vesd_sums: dict = {}
    esd_sums: dict = {}
    for rec in records:
        if rec.error is not None or rec.delta_vesd is None:
            continue
        if rec.vector_law not in laws:
            laws.append(rec.vector_law)
        key = (rec.vector_law, rec.n)
        s, c = vesd_sums.get(key, (0.0, 0))
        vesd_sums[key] = (s + rec.delta_vesd, c + 1)
        if rec.vector_law == laws[0] and rec.delta_esd is not None:
            s, c = esd_sums.get(rec.n, (0.0, 0))
            esd_sums[rec.n] = (s + rec.delta_esd, c + 1)

    ns = sorted({n for (_, n) in vesd_sums})
    if len(ns) < 3:
        raise ValueError("aggregation needs at least 3 distinct dimensions")

    summary = {"laws": {}, "esd": None}
    for law in laws:
        means = {n: vesd_sums[(law, n)][0] / vesd_sums[(law, n)][1] for n in ns if (law, n) in vesd_sums}
        summary["laws"][law] = _law_summary(sorted(means), means)
    esd_means = {n: s / c for n, (s, c) in esd_sums.items()}
    summary["esd"] = _law_summary(sorted(esd_means), esd_means)
    return summary


def write_summary_json(summary: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class BiasPoint:
    """Deviation of the replicate-averaged resolvent form from the limit
    transform at one grid point, against the 1/(nv) reference scale."""

    n: int
    u: float
    v: float
    bias: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.bias / self.bound


def bias_scan(cfg: ExperimentConfig, domain: EvaluationDomain, u_values=None) -> list[BiasPoint]:
    """Average the direct-solve resolvent form over replicates on a z-grid.

    For each dimension n the grid sits at height v = c0/sqrt(n); the scan
    reports |mean - s(z)| next to the reference bound 1/(nv).  The unit
    vector is the first configured law.
    """
    us = np.asarray(domain.u_grid() if u_values is None else list(u_values), dtype=float)
    if us.size == 0:
        raise ValueError("bias scan needs a nonempty z-grid")
    vs = cfg.vector_specs[0]

    points = []
    for n in cfg.n_values:
        ens = cfg.ensemble.with_n(n)
        v = domain.v(n)
        zs = us + 1j * v

        def one_rep(rep):
            sample = sample_wigner(ens, cfg.master_seed, rep)
            x = sample_unit_vector(vs, n, cfg.master_seed, rep)
            return np.array([resolvent_quadratic_form(sample, x, z) for z in zs])

        reps = range(cfg.replicates)
        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                per_rep = list(pool.map(one_rep, reps))
        else:
            per_rep = [one_rep(rep) for rep in reps]
        mean = np.sum(per_rep, axis=0) / cfg.replicates
        limit = semicircle_stieltjes(zs)
        bound = 1.0 / (n * v)
        for u, m, s in zip(us, mean, np.atleast_1d(limit)):
            points.append(BiasPoint(n, float(u), v, float(abs(m - s)), bound))
    return points


def write_bias_csv(points, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "u", "v", "bias", "bound", "ratio"])
        for p in points:
            writer.writerow([p.n, repr(p.u), repr(p.v), repr(p.bias), repr(p.bound), repr(p.ratio)])


def bridge_sweep(cfg: ExperimentConfig):
    """Bridge paths for every (n, law, replicate) plus the variance of the
    path value at t = 1/2.

    Returns (rows, summary): rows are (n, law, replicate, t, value) tuples
    for CSV export; summary maps law -> str(n) -> sample variance and count.
    """
    rows = []
    summary: dict = {}
    for n in cfg.n_values:
        ens = cfg.ensemble.with_n(n)
        halves = {vs.label: [] for vs in cfg.vector_specs}
        paths = {vs.label: [] for vs in cfg.vector_specs}
        for rep in range(cfg.replicates):
            sample = sample_wigner(ens, cfg.master_seed, rep)
            eigenvalues, eigenvectors = hermitian_eigensystem(sample)
            for vs in cfg.vector_specs:
                x = sample_unit_vector(vs, n, cfg.master_seed, rep)
                sd = SpectralData(eigenvalues, eigenvector_weights(eigenvectors, x), n, vs)
                path = bridge_path(sd)
                halves[vs.label].append(bridge_value(path, 0.5))
                paths[vs.label].append((rep, path))
        for vs in cfg.vector_specs:
            for rep, path in paths[vs.label]:
                rows.extend((n, vs.label, rep, float(t), float(q)) for t, q in zip(path.times, path.values))
            vals = halves[vs.label]
            summary.setdefault(vs.label, {})[str(n)] = {
                "variance_at_half": float(np.var(vals, ddof=1)) if len(vals) > 1 else 0.0,
                "replicates": len(vals),
            }
    return rows, summary


def write_bridge_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "vector_law", "replicate", "t", "value"])
        for n, law, rep, t, q in rows:
            writer.writerow([n, law, rep, repr(t), repr(q)])
