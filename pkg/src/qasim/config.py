"""YAML run configurations: schema, validation, and input resolution.

A config names a molecular system (FCIDUMP plus optional kinetic/potential
sidecar), an initial superposition, the time-evolved basis, the reporting
grid, a shot model, and experiment-specific sections.  Integral files are
resolved relative to the config file first, then against the fixtures
packaged under ``qasim/data``.  The config hash folds in the file contents
rather than their paths, so a run is identified by what it computes.
"""

from __future__ import annotations

import hashlib
import importlib.resources
import json
import os
from dataclasses import dataclass
from pathlib import Path

import yaml

from .engine import BasisSpec
from .resources import ALGORITHMS

KINDS = (
    "dynamics",
    "variance-scan",
    "trotter-scan",
    "resource-table",
    "lindep-report",
)

OBSERVABLE_GROUPS = ("populations", "energies")

MAX_GRID_STEPS = 10_000_000

OUT_DIR_ENV = "QASIM_OUT_DIR"


class ConfigError(ValueError):
    pass


def _section(raw: dict, name: str, required: bool = True) -> dict:
    value = raw.get(name)
    if value is None:
        if required:
            raise ConfigError(f"missing section {name!r}")
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    return value


def _get(section: dict, sec_name: str, key: str, kind, required=True, default=None):
    if key not in section or section[key] is None:
        if required:
            raise ConfigError(f"missing {sec_name}.{key}")
        return default
    value = section[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is not None and (not isinstance(value, kind) or isinstance(value, bool)):
        raise ConfigError(f"{sec_name}.{key} must be of type {kind.__name__}")
    return value


def packaged_fixture(name: str) -> Path | None:
    candidate = importlib.resources.files("qasim").joinpath("data", name)
    path = Path(str(candidate))
    return path if path.is_file() else None


def resolve_input_path(value: str, base_dir: Path) -> Path:
    """Resolve an integral-file reference: explicit path first, then fixtures."""
    direct = Path(value)
    if direct.is_absolute():
        if direct.is_file():
            return direct
        raise ConfigError(f"input file not found: {value}")
    local = base_dir / direct
    if local.is_file():
        return local
    packaged = packaged_fixture(value)
    if packaged is not None:
        return packaged
    raise ConfigError(
        f"input file {value!r} not found relative to the config or in the "
        "packaged fixtures"
    )


@dataclass(frozen=True)
class SystemConfig:
    fcidump: Path
    splits: Path | None
    orbital_labels: tuple[str, ...] | None


@dataclass(frozen=True)
class InitialStateConfig:
    n_electrons: int
    ms2: int
    eigenstates: tuple[int, ...]
    amplitudes: tuple[complex, ...] | None


@dataclass(frozen=True)
class TimeGrid:
    total: float
    step: float

    @property
    def n_steps(self) -> int:
        return int(round(self.total / self.step))


@dataclass(frozen=True)
class ShotConfig:
    per_component: int | None
    samples: int
    master_seed: int


@dataclass(frozen=True)
class OutputConfig:
    directory: str | None
    figures: bool


@dataclass(frozen=True)
class VarianceScanConfig:
    shot_grid: tuple[int, ...]


@dataclass(frozen=True)
class TrotterScanConfig:
    step_grid: tuple[int, ...]
    shot_grid: tuple[int | None, ...]


@dataclass(frozen=True)
class ResourceTableConfig:
    algorithm: str
    epsilon: float
    step_grid: tuple[int, ...]
    trotter_order: int


@dataclass(frozen=True)
class LindepConfig:
    sweep_points: int


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    system: SystemConfig
    initial_state: InitialStateConfig
    basis: BasisSpec
    time: TimeGrid
    shots: ShotConfig
    observables: tuple[str, ...]
    output: OutputConfig
    gamma: float
    variance_scan: VarianceScanConfig | None
    trotter_scan: TrotterScanConfig | None
    resource_table: ResourceTableConfig | None
    lindep: LindepConfig | None
    source_path: Path | None


def _parse_amplitudes(raw_list) -> tuple[complex, ...]:
    out = []
    for entry in raw_list:
        if isinstance(entry, (int, float)) and not isinstance(entry, bool):
            out.append(complex(float(entry), 0.0))
        elif (
            isinstance(entry, (list, tuple))
            and len(entry) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
        ):
            out.append(complex(float(entry[0]), float(entry[1])))
        else:
            raise ConfigError(
                "initial_state.amplitudes entries must be numbers or [re, im] pairs"
            )
    return tuple(out)


def load_config(path, seed_override: int | None = None) -> ExperimentConfig:
    """Load and validate a YAML experiment configuration."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    return parse_config(raw, base_dir=path.parent, source_path=path,
                        seed_override=seed_override)


def parse_config(
    raw: dict,
    base_dir: Path,
    source_path: Path | None = None,
    seed_override: int | None = None,
) -> ExperimentConfig:
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")

    sec = _section(raw, "system")
    fcidump = resolve_input_path(_get(sec, "system", "fcidump", str), base_dir)
    splits_name = _get(sec, "system", "splits", str, required=False)
    splits = resolve_input_path(splits_name, base_dir) if splits_name else None
    labels_raw = _get(sec, "system", "orbital_labels", list, required=False)
    labels = None
    if labels_raw is not None:
        if not all(isinstance(x, str) for x in labels_raw):
            raise ConfigError("system.orbital_labels must be strings")
        labels = tuple(labels_raw)
    system = SystemConfig(fcidump=fcidump, splits=splits, orbital_labels=labels)

    sec = _section(raw, "initial_state")
    eig_raw = _get(sec, "initial_state", "eigenstates", list)
    if not eig_raw or not all(
        isinstance(x, int) and not isinstance(x, bool) for x in eig_raw
    ):
        raise ConfigError("initial_state.eigenstates must be a list of integers")
    amp_raw = _get(sec, "initial_state", "amplitudes", list, required=False)
    initial_state = InitialStateConfig(
        n_electrons=_get(sec, "initial_state", "electrons", int),
        ms2=_get(sec, "initial_state", "ms2", int, required=False, default=0),
        eigenstates=tuple(eig_raw),
        amplitudes=_parse_amplitudes(amp_raw) if amp_raw is not None else None,
    )
    if initial_state.n_electrons < 1:
        raise ConfigError("initial_state.electrons must be positive")

    sec = _section(raw, "basis")
    times_raw = _get(sec, "basis", "times", list)
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in times_raw):
        raise ConfigError("basis.times must be numbers")
    propagation = _get(sec, "basis", "propagation", str, required=False, default="exact")
    trotter_steps = _get(sec, "basis", "trotter_steps", int, required=False)
    try:
        basis = BasisSpec(
            times=tuple(float(t) for t in times_raw),
            propagation=propagation,
            trotter_steps=trotter_steps,
        )
    except ValueError as exc:
        raise ConfigError(f"basis: {exc}") from None

    sec = _section(raw, "time")
    time_grid = TimeGrid(
        total=_get(sec, "time", "total", float),
        step=_get(sec, "time", "step", float),
    )
    if time_grid.total <= 0 or time_grid.step <= 0:
        raise ConfigError("time.total and time.step must be positive")
    if time_grid.total / time_grid.step > MAX_GRID_STEPS:
        raise ConfigError(f"time grid exceeds {MAX_GRID_STEPS} steps; refusing")
    if time_grid.total < time_grid.step:
        raise ConfigError("time.total must cover at least one step")

    sec = _section(raw, "shots", required=False)
    per_component = _get(sec, "shots", "per_component", int, required=False)
    if per_component is not None and per_component < 1:
        raise ConfigError("shots.per_component must be positive")
    samples = _get(sec, "shots", "samples", int, required=False, default=100)
    if samples < 1:
        raise ConfigError("shots.samples must be positive")
    master_seed = _get(sec, "shots", "master_seed", int, required=False, default=0)
    if seed_override is not None:
        master_seed = seed_override
    if not 0 <= master_seed < 2**64:
        raise ConfigError("shots.master_seed must fit in 64 bits")
    shots = ShotConfig(
        per_component=per_component, samples=samples, master_seed=master_seed
    )

    obs_raw = raw.get("observables", ["populations"])
    if not isinstance(obs_raw, list) or not obs_raw:
        raise ConfigError("observables must be a non-empty list")
    for group in obs_raw:
        if group not in OBSERVABLE_GROUPS:
            raise ConfigError(
                f"unknown observable group {group!r}; choose from {OBSERVABLE_GROUPS}"
            )
    if "energies" in obs_raw and system.splits is None:
        raise ConfigError(
            "observable group 'energies' needs system.splits (the kinetic/"
            "potential sidecar)"
        )

    sec = _section(raw, "output", required=False)
    output = OutputConfig(
        directory=_get(sec, "output", "directory", str, required=False),
        figures=bool(sec.get("figures", True)),
    )

    gamma = raw.get("gamma", 6.0)
    if not isinstance(gamma, (int, float)) or isinstance(gamma, bool) or gamma <= 0:
        raise ConfigError("gamma must be a positive number")
    gamma = float(gamma)

    variance_scan = trotter_scan = resource_table = lindep = None
    if kind == "variance-scan":
        sec = _section(raw, "variance_scan")
        grid_raw = _get(sec, "variance_scan", "shot_grid", list)
        if len(grid_raw) < 2:
            raise ConfigError("variance_scan.shot_grid needs at least two settings")
        if not all(isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in grid_raw):
            raise ConfigError("variance_scan.shot_grid entries must be positive integers")
        variance_scan = VarianceScanConfig(shot_grid=tuple(grid_raw))
    elif kind == "trotter-scan":
        sec = _section(raw, "trotter_scan")
        steps_raw = _get(sec, "trotter_scan", "step_grid", list)
        if not steps_raw or not all(
            isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in steps_raw
        ):
            raise ConfigError("trotter_scan.step_grid entries must be positive integers")
        shots_raw = sec.get("shot_grid", [None])
        if not isinstance(shots_raw, list) or not shots_raw:
            raise ConfigError("trotter_scan.shot_grid must be a non-empty list")
        for x in shots_raw:
            if x is not None and (not isinstance(x, int) or isinstance(x, bool) or x < 1):
                raise ConfigError(
                    "trotter_scan.shot_grid entries must be positive integers or null"
                )
        trotter_scan = TrotterScanConfig(
            step_grid=tuple(steps_raw), shot_grid=tuple(shots_raw)
        )
    elif kind == "resource-table":
        sec = _section(raw, "resource_table")
        algorithm = _get(sec, "resource_table", "algorithm", str)
        if algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown propagator algorithm {algorithm!r}")
        epsilon = _get(sec, "resource_table", "epsilon", float)
        if not 0 < epsilon < 1:
            raise ConfigError("resource_table.epsilon must be in (0, 1)")
        steps_raw = _get(sec, "resource_table", "step_grid", list)
        if not steps_raw or not all(
            isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in steps_raw
        ):
            raise ConfigError("resource_table.step_grid entries must be positive integers")
        trotter_order = _get(sec, "resource_table", "trotter_order", int,
                             required=False, default=1)
        if trotter_order < 1:
            raise ConfigError("resource_table.trotter_order must be at least 1")
        resource_table = ResourceTableConfig(
            algorithm=algorithm,
            epsilon=epsilon,
            step_grid=tuple(steps_raw),
            trotter_order=trotter_order,
        )
    elif kind == "lindep-report":
        sec = _section(raw, "lindep_report", required=False)
        sweep_points = _get(sec, "lindep_report", "sweep_points", int,
                            required=False, default=400)
        if sweep_points < 2:
            raise ConfigError("lindep_report.sweep_points must be at least 2")
        lindep = LindepConfig(sweep_points=sweep_points)

    return ExperimentConfig(
        kind=kind,
        system=system,
        initial_state=initial_state,
        basis=basis,
        time=time_grid,
        shots=shots,
        observables=tuple(obs_raw),
        output=output,
        gamma=gamma,
        variance_scan=variance_scan,
        trotter_scan=trotter_scan,
        resource_table=resource_table,
        lindep=lindep,
        source_path=source_path,
    )


def _file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def config_fingerprint(cfg: ExperimentConfig) -> str:
    """Content hash identifying the computation (files by digest, not path)."""
    payload = {
        "kind": cfg.kind,
        "fcidump": _file_digest(cfg.system.fcidump),
        "splits": _file_digest(cfg.system.splits) if cfg.system.splits else None,
        "orbital_labels": cfg.system.orbital_labels,
        "initial_state": {
            "electrons": cfg.initial_state.n_electrons,
            "ms2": cfg.initial_state.ms2,
            "eigenstates": cfg.initial_state.eigenstates,
            "amplitudes": [
                [a.real, a.imag] for a in cfg.initial_state.amplitudes
            ]
            if cfg.initial_state.amplitudes is not None
            else None,
        },
        "basis": {
            "times": cfg.basis.times,
            "propagation": cfg.basis.propagation,
            "trotter_steps": cfg.basis.trotter_steps,
        },
        "time": [cfg.time.total, cfg.time.step],
        "shots": [cfg.shots.per_component, cfg.shots.samples, cfg.shots.master_seed],
        "observables": cfg.observables,
        "gamma": cfg.gamma,
        "variance_scan": cfg.variance_scan.shot_grid if cfg.variance_scan else None,
        "trotter_scan": [cfg.trotter_scan.step_grid, cfg.trotter_scan.shot_grid]
        if cfg.trotter_scan
        else None,
        "resource_table": [
            cfg.resource_table.algorithm,
            cfg.resource_table.epsilon,
            cfg.resource_table.step_grid,
            cfg.resource_table.trotter_order,
        ]
        if cfg.resource_table
        else None,
        "lindep": cfg.lindep.sweep_points if cfg.lindep else None,
    }
    blob = json.dumps(payload, sort_keys=True, default=list)
    return hashlib.sha256(blob.encode()).hexdigest()


def resolve_output_dir(cfg: ExperimentConfig, cli_out: str | None) -> Path:
    """Precedence: --out flag, then config, then $QASIM_OUT_DIR, then ./qasim-out."""
    if cli_out:
        return Path(cli_out)
    if cfg.output.directory:
        base = Path(cfg.output.directory)
        if not base.is_absolute() and cfg.source_path is not None:
            base = cfg.source_path.parent / base
        return base
    env = os.environ.get(OUT_DIR_ENV)
    stem = cfg.source_path.stem if cfg.source_path is not None else cfg.kind
    if env:
        return Path(env) / stem
    return Path.cwd() / "qasim-out" / stem
