"""Experiment configuration: dataclass, profiles, and INI round-tripping."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .state import MAX_QUBITS, MIN_QUBITS

EXPERIMENTS = (
    "ggm-growth",
    "ipr-growth",
    "clifford-compare",
    "rmps-sweep",
    "weak-sweep",
)
DEFAULT_D_GRID = (1, 2, 4, 8, 12, 16, 24, 32, 40, 48, 56, 64)
DEFAULT_LAMBDA_GRID = tuple(round(0.05 * k, 2) for k in range(1, 21))

# ci keeps a full experiment under a minute of desk time; paper matches the
# published ensemble sizes (hours of single-core time for the full suite)
PROFILES = {
    "ci": {"num_qubits": 8, "realizations": 50, "t_max": 30},
    "paper": {"num_qubits": 12, "realizations": 200, "t_max": 50},
}


@dataclass
class ExperimentConfig:
    experiment: str = "ggm-growth"
    layout: str = "brick"
    num_qubits: int = 12
    n_list: tuple[int, ...] = ()
    t_max: int = 50
    realizations: int = 200
    master_seed: int = 20240
    metrics: tuple[str, ...] = ("ggm",)
    saturation_decimals: int = 3
    out: str = ""
    workers: int = 1
    profile: str = ""
    rmps_flavor: str = "unitary"
    rmps_d_grid: tuple[int, ...] = DEFAULT_D_GRID
    weak_lambda_grid: tuple[float, ...] = DEFAULT_LAMBDA_GRID
    weak_trials: int = 100
    weak_mode: str = "independent"
    weak_t_equil: int = 50

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}, expected one of {EXPERIMENTS}")
        if self.layout not in ("brick", "star", "allpairs", "clifford"):
            raise ValueError(f"unknown layout {self.layout!r}")
        for n in (self.num_qubits, *self.n_list):
            if not MIN_QUBITS <= n <= MAX_QUBITS:
                raise ValueError(f"qubit count {n} outside [{MIN_QUBITS}, {MAX_QUBITS}]")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        bad = set(self.metrics) - {"ggm", "ipr"}
        if bad or not self.metrics:
            raise ValueError(f"metrics must be a nonempty subset of {{ggm, ipr}}, got {self.metrics}")
        if self.rmps_flavor not in ("unitary", "ginibre"):
            raise ValueError(f"unknown RMPS flavor {self.rmps_flavor!r}")
        if self.weak_mode not in ("independent", "sequential"):
            raise ValueError(f"unknown weak-measurement mode {self.weak_mode!r}")
        if not all(0.0 < l <= 1.0 for l in self.weak_lambda_grid):
            raise ValueError("lambda grid values must lie in (0, 1]")
        return self

    def with_profile(self, profile: str) -> "ExperimentConfig":
        if profile not in PROFILES:
            raise ValueError(f"unknown profile {profile!r}, expected one of {tuple(PROFILES)}")
        cfg = ExperimentConfig(**{f.name: getattr(self, f.name) for f in fields(self)})
        cfg.profile = profile
        for key, value in PROFILES[profile].items():
            setattr(cfg, key, value)
        return cfg


_SECTIONS = {
    "run": (
        "experiment",
        "layout",
        "num_qubits",
        "n_list",
        "t_max",
        "realizations",
        "master_seed",
        "metrics",
        "saturation_decimals",
        "out",
        "workers",
        "profile",
    ),
    "rmps": ("rmps_flavor", "rmps_d_grid"),
    "weak": ("weak_lambda_grid", "weak_trials", "weak_mode", "weak_t_equil"),
}


def _encode(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_encode(v) for v in value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def config_to_ini(cfg: ExperimentConfig, path: str | Path) -> None:
    parser = configparser.ConfigParser()
    for section, names in _SECTIONS.items():
        parser[section] = {name.removeprefix(f"{section}_"): _encode(getattr(cfg, name)) for name in names}
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)


def config_from_ini(path: str | Path) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    kwargs = {}
    types = {f.name: f for f in fields(ExperimentConfig)}
    defaults = ExperimentConfig()
    for section, names in _SECTIONS.items():
        for name in names:
            key = name.removeprefix(f"{section}_")
            if not parser.has_option(section, key):
                continue
            raw = parser.get(section, key)
            default = getattr(defaults, name)
            if isinstance(default, tuple):
                if raw == "":
                    kwargs[name] = ()
                else:
                    elem = float if name == "weak_lambda_grid" else (int if name != "metrics" else str)
                    kwargs[name] = tuple(elem(tok) for tok in raw.split(","))
            elif isinstance(default, bool):
                kwargs[name] = parser.getboolean(section, key)
            elif isinstance(default, int):
                kwargs[name] = int(raw)
            elif isinstance(default, float):
                kwargs[name] = float(raw)
            else:
                kwargs[name] = raw
    return ExperimentConfig(**kwargs).validate()
