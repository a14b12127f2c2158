"""Experiment configuration: a flat INI file with one section per concern,
command-line overrides applied on top, everything validated against a fixed
key set so typos fail fast with a section.key diagnostic."""

from __future__ import annotations

import configparser
from pathlib import Path

from .berry_esseen import derive_constants
from .ensemble import EnsembleSpec, TruncationPolicy, parse_entry_law, parse_vector_law
from .harness import ExperimentConfig
from .semicircle import EvaluationDomain


class ConfigError(ValueError):
    """Malformed configuration; rendered to stderr and mapped to exit code 2."""


DEFAULTS = {
    "ensemble": {
        "n": "",
        "symmetry": "real_symmetric",
        "entry_law": "std_normal",
        "construction": "gaussian_symmetrized",
        "truncate": "false",
        "epsilon_exponent": "0.05",
        "remove_diagonal": "false",
    },
    "vectors": {
        "laws": "uniform01",
    },
    "sweep": {
        "n_values": "50, 100, 200, 400, 800",
        "replicates": "200",
        "master_seed": "2024",
    },
    "output": {
        "dir": "",
        "format": "csv",
        "emit_step_cdfs": "false",
        "timing": "false",
    },
    "berry_esseen": {
        "enabled": "false",
        "a": "16",
        "b": "3",
        "tau": "2",
        "v": "0",
    },
    "bias_scan": {
        "enabled": "false",
        "u_min": "-16",
        "u_max": "16",
        "c0": "2.0",
        "u_step": "0.1",
        "u_values": "",
    },
}

ENSEMBLE_PRESETS = {
    "goe": {"symmetry": "real_symmetric", "construction": "gaussian_symmetrized", "entry_law": "std_normal"},
    "gue": {"symmetry": "complex_hermitian", "construction": "gaussian_symmetrized", "entry_law": "std_normal"},
}


def default_config() -> dict:
    return {section: dict(keys) for section, keys in DEFAULTS.items()}


def load_config(path) -> dict:
    """Read an INI file over the defaults; unknown sections/keys are errors."""
    cfg = default_config()
    if path is None:
        return cfg
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(Path(path)) as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    for section in parser.sections():
        if section not in cfg:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in cfg[section]:
                raise ConfigError(f"unknown config key {section}.{key}")
            cfg[section][key] = value
    return cfg


def apply_overrides(cfg: dict, overrides) -> dict:
    """Apply section.key=value pairs; unknown keys are rejected."""
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        dotted, value = item.split("=", 1)
        if "." not in dotted:
            raise ConfigError(f"override key {dotted!r} is not of the form section.key")
        section, key = dotted.split(".", 1)
        if section not in cfg or key not in cfg[section]:
            raise ConfigError(f"unknown override key {section}.{key}")
        cfg[section][key] = value
    return cfg


def apply_ensemble_preset(cfg: dict, preset: str) -> dict:
    token = preset.strip().lower()
    if token in ENSEMBLE_PRESETS:
        cfg["ensemble"].update(ENSEMBLE_PRESETS[token])
        return cfg
    if token.startswith("direct:"):
        parts = token.split(":")
        cfg["ensemble"]["construction"] = "direct_entries"
        cfg["ensemble"]["entry_law"] = parts[1]
        cfg["ensemble"]["symmetry"] = parts[2] if len(parts) > 2 else "real_symmetric"
        return cfg
    raise ConfigError(f"unknown ensemble preset {preset!r} (use goe, gue, or direct:<law>[:<symmetry>])")


def _parse(section, key, raw, conv, what):
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}.{key}: {raw!r} is not a valid {what}") from exc


def _parse_bool(section, key, raw):
    token = raw.strip().lower()
    if token in ("1", "true", "yes", "on"):
        return True
    if token in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{section}.{key}: {raw!r} is not a boolean")


def _parse_list(raw):
    return [tok.strip() for tok in raw.split(",") if tok.strip()]


def build_experiment_config(cfg: dict, threads: int = 1) -> ExperimentConfig:
    """Turn the validated string map into a typed ExperimentConfig."""
    ens = cfg["ensemble"]
    n_values = [_parse("sweep", "n_values", tok, int, "integer") for tok in _parse_list(cfg["sweep"]["n_values"])]
    if ens["n"].strip():
        single_n = _parse("ensemble", "n", ens["n"], int, "integer")
        if not n_values:
            n_values = [single_n]

    try:
        ensemble = EnsembleSpec(
            n=n_values[0] if n_values else 2,
            symmetry=ens["symmetry"].strip(),
            entry_law=parse_entry_law(ens["entry_law"].strip()),
            preprocessing=TruncationPolicy(
                enabled=_parse_bool("ensemble", "truncate", ens["truncate"]),
                epsilon_exponent=_parse("ensemble", "epsilon_exponent", ens["epsilon_exponent"], float, "number"),
                remove_diagonal=_parse_bool("ensemble", "remove_diagonal", ens["remove_diagonal"]),
            ),
            construction=ens["construction"].strip(),
        )
        vector_specs = [parse_vector_law(tok) for tok in _parse_list(cfg["vectors"]["laws"])]
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc

    berry = None
    if _parse_bool("berry_esseen", "enabled", cfg["berry_esseen"]["enabled"]):
        try:
            berry = derive_constants(
                _parse("berry_esseen", "a", cfg["berry_esseen"]["a"], float, "number"),
                _parse("berry_esseen", "b", cfg["berry_esseen"]["b"], float, "number"),
                _parse("berry_esseen", "tau", cfg["berry_esseen"]["tau"], float, "number"),
                _parse("berry_esseen", "v", cfg["berry_esseen"]["v"], float, "number"),
            )
        except ValueError as exc:
            raise ConfigError(f"berry_esseen: {exc}") from exc

    bias_domain = None
    bias_u_values = None
    if _parse_bool("bias_scan", "enabled", cfg["bias_scan"]["enabled"]):
        try:
            bias_domain = EvaluationDomain(
                u_min=_parse("bias_scan", "u_min", cfg["bias_scan"]["u_min"], float, "number"),
                u_max=_parse("bias_scan", "u_max", cfg["bias_scan"]["u_max"], float, "number"),
                c0=_parse("bias_scan", "c0", cfg["bias_scan"]["c0"], float, "number"),
                u_step=_parse("bias_scan", "u_step", cfg["bias_scan"]["u_step"], float, "number"),
            )
        except ValueError as exc:
            raise ConfigError(f"bias_scan: {exc}") from exc
        raw_us = _parse_list(cfg["bias_scan"]["u_values"])
        if raw_us:
            bias_u_values = [_parse("bias_scan", "u_values", tok, float, "number") for tok in raw_us]

    out_dir = cfg["output"]["dir"].strip()
    try:
        return ExperimentConfig(
            ensemble=ensemble,
            vector_specs=vector_specs,
            n_values=n_values,
            replicates=_parse("sweep", "replicates", cfg["sweep"]["replicates"], int, "integer"),
            master_seed=_parse("sweep", "master_seed", cfg["sweep"]["master_seed"], int, "integer"),
            out_dir=Path(out_dir) if out_dir else None,
            out_format=cfg["output"]["format"].strip(),
            berry=berry,
            bias_domain=bias_domain,
            bias_u_values=bias_u_values,
            emit_step_cdfs=_parse_bool("output", "emit_step_cdfs", cfg["output"]["emit_step_cdfs"]),
            timing=_parse_bool("output", "timing", cfg["output"]["timing"]),
            threads=threads,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
