"""Experiment runners: turn a validated config into CSV/JSON/PNG outputs.

Every runner writes its data files plus a ``manifest.json`` recording the
config fingerprint, seeds, schema tags, and a sha256 per output, so a rerun
with the same config and seed must reproduce every byte.  Sampling ensembles
fan out over worker processes in seed order; results are concatenated
deterministically, so worker count never changes the numbers.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .chemistry import build_hamiltonian, build_initial_state, build_observables, load_integrals
from .config import ExperimentConfig, config_fingerprint
from .engine import (
    BasisSpec,
    ShotModel,
    build_basis,
    derive_seeds,
    dominant_frequency,
    exact_matrices,
    lin_independence_report,
    min_error_overlap,
    observable_trajectory,
    quadratic_form_series,
    sample_matrices,
    solve_dynamics,
    solve_dynamics_stack,
    subspace_state,
)
from .resources import (
    CostFormula,
    ScenarioParams,
    crossover_heuristic,
    crossover_threshold,
    max_matrix_element,
    one_norm,
    propagator_cost,
    qas_cost,
    standard_method_cost,
)
from .statevector import ExactPropagator

MANIFEST_SCHEMA = "qasim-manifest/1"


@dataclass
class RunResult:
    kind: str
    out_dir: Path
    outputs: list[Path]
    manifest: Path
    wall_clock: float


# ---------------------------------------------------------------------------
# Shared plumbing.


def _unit(label: str) -> str:
    return "hartree" if label.startswith("E_") else "1"


def _sq_unit(label: str) -> str:
    return "hartree^2" if label.startswith("E_") else "1"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> Path:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(
    out_dir: Path,
    cfg: ExperimentConfig,
    outputs: list[Path],
    seeds: list[int],
    workers: int,
    wall_clock: float,
    schemas: dict[str, str],
    extra: dict | None = None,
) -> Path:
    payload = {
        "schema": MANIFEST_SCHEMA,
        "tool_version": __version__,
        "kind": cfg.kind,
        "config_fingerprint": config_fingerprint(cfg),
        "config_source": str(cfg.source_path) if cfg.source_path else None,
        "master_seed": cfg.shots.master_seed,
        "shots_per_component": cfg.shots.per_component,
        "samples": cfg.shots.samples,
        "seeds": seeds,
        "workers": workers,
        "wall_clock_seconds": wall_clock,
        "csv_schemas": schemas,
        "outputs": {p.name: _sha256(p) for p in sorted(outputs)},
        "extra": extra or {},
    }
    return write_json(out_dir / "manifest.json", payload)


def verify_manifest(out_dir: Path) -> list[str]:
    """Names of recorded outputs whose checksum no longer matches."""
    manifest = json.loads((Path(out_dir) / "manifest.json").read_text())
    bad = []
    for name, digest in manifest["outputs"].items():
        path = Path(out_dir) / name
        if not path.is_file() or _sha256(path) != digest:
            bad.append(name)
    return bad


@dataclass
class LoadedSystem:
    integrals: object
    hamiltonian: object
    observables: dict
    prepared: object

    @property
    def psi0(self):
        return self.prepared.state

    @property
    def spectral_gaps(self) -> list[float]:
        vals = self.prepared.eigenvalues
        return [
            float(abs(vals[a] - vals[b]))
            for a in range(len(vals))
            for b in range(a + 1, len(vals))
        ]


def load_system(cfg: ExperimentConfig, with_observables: bool = True) -> LoadedSystem:
    integrals = load_integrals(cfg.system.fcidump, cfg.system.splits)
    hamiltonian = build_hamiltonian(integrals)
    observables = {}
    if with_observables:
        observables = build_observables(
            integrals,
            orbital_labels=list(cfg.system.orbital_labels)
            if cfg.system.orbital_labels
            else None,
            populations="populations" in cfg.observables,
            energies="energies" in cfg.observables,
        )
    amplitudes = (
        np.asarray(cfg.initial_state.amplitudes, dtype=complex)
        if cfg.initial_state.amplitudes is not None
        else None
    )
    prepared = build_initial_state(
        hamiltonian,
        cfg.initial_state.n_electrons,
        cfg.initial_state.ms2,
        cfg.initial_state.eigenstates,
        amplitudes,
    )
    return LoadedSystem(integrals, hamiltonian, observables, prepared)


def _chunk(seq: list, workers: int) -> list[list]:
    workers = max(1, min(workers, len(seq)))
    size = -(-len(seq) // workers)
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def _sampled_series_chunk(args):
    matrices, shots, seeds, total, step, labels = args
    overlaps, hams = [], []
    obs = {label: [] for label in labels}
    draws = 0
    for seed in seeds:
        noisy = sample_matrices(matrices, ShotModel(shots, seed))
        overlaps.append(noisy.overlap)
        hams.append(noisy.hamiltonian)
        for label in labels:
            obs[label].append(noisy.observables[label])
        draws = noisy.sample_draws
    _, alphas = solve_dynamics_stack(
        np.stack(overlaps), np.stack(hams), total, step
    )
    series = {}
    resid = 0.0
    for label in labels:
        vals, r = quadratic_form_series(np.stack(obs[label]), alphas)
        series[label] = vals
        resid = max(resid, r)
    return series, draws, resid


def _ensemble_series(matrices, shots, seeds, total, step, labels, workers):
    """Per-seed observable trajectories, stacked (n_seeds, n_times) per label."""
    chunks = _chunk(list(seeds), workers)
    args = [(matrices, shots, c, total, step, labels) for c in chunks]
    if len(args) == 1:
        parts = [_sampled_series_chunk(args[0])]
    else:
        with ProcessPoolExecutor(max_workers=len(args)) as pool:
            parts = list(pool.map(_sampled_series_chunk, args))
    series = {
        label: np.concatenate([p[0][label] for p in parts], axis=0)
        for label in labels
    }
    return series, parts[0][1], max(p[2] for p in parts)


# ---------------------------------------------------------------------------
# dynamics


def run_dynamics(cfg: ExperimentConfig, out_dir: Path, workers: int = 1) -> RunResult:
    t0 = time.perf_counter()
    system = load_system(cfg)
    labels = list(system.observables)
    basis = build_basis(system.psi0, system.hamiltonian, cfg.basis)
    matrices = exact_matrices(basis, system.hamiltonian, system.observables)
    traj = solve_dynamics(matrices, cfg.time.total, cfg.time.step)
    times = traj.times

    propagator = ExactPropagator(system.hamiltonian)
    psi_grid = propagator.evolve_grid(times, system.psi0)
    reference = {}
    for label, op in system.observables.items():
        dense = op.dense()
        vals = np.einsum("ti,ij,tj->t", psi_grid.conj(), dense, psi_grid)
        reference[label] = vals.real

    subspace = {}
    imag_resid = 0.0
    for label in labels:
        series = observable_trajectory(matrices, traj, label)
        subspace[label] = series.values
        imag_resid = max(imag_resid, series.max_imag_residual)
    eps = min_error_overlap(matrices, traj)

    seeds: list[int] = []
    sampled = None
    draws = None
    if cfg.shots.per_component is not None:
        seeds = derive_seeds(cfg.shots.master_seed, cfg.shots.samples)
        sampled, draws, _ = _ensemble_series(
            matrices, cfg.shots.per_component, seeds,
            cfg.time.total, cfg.time.step, labels, workers,
        )

    columns: list[tuple[str, np.ndarray]] = [("time[1/hartree]", times)]
    for label in labels:
        u = _unit(label)
        columns.append((f"{label}_ref[{u}]", reference[label]))
        columns.append((f"{label}_qas[{u}]", subspace[label]))
        if sampled is not None:
            stack = sampled[label]
            columns.append((f"{label}_mean[{u}]", stack.mean(axis=0)))
            columns.append((f"{label}_sd[{u}]", stack.std(axis=0, ddof=1)))
            columns.append((f"{label}_min[{u}]", stack.min(axis=0)))
            columns.append((f"{label}_max[{u}]", stack.max(axis=0)))
    columns.append(("eps_min[hartree^2]", eps))

    outputs = [
        write_csv(
            out_dir / "dynamics.csv",
            [name for name, _ in columns],
            zip(*[data for _, data in columns]),
        )
    ]
    if cfg.output.figures:
        from . import figures

        outputs += figures.render_dynamics(
            out_dir, times, labels, reference, subspace, sampled
        )

    extra = {
        "selected_eigenvalues": system.prepared.eigenvalues,
        "spectral_gaps": system.spectral_gaps,
        "rows": len(times),
        "observable_imag_residual_exact": imag_resid,
        "sample_draws_per_run": draws,
        "dominant_frequency_qas": {
            label: dominant_frequency(subspace[label], cfg.time.step)
            for label in labels
        },
    }
    manifest = write_manifest(
        out_dir, cfg, outputs, seeds, workers,
        time.perf_counter() - t0, {"dynamics.csv": "qasim-dynamics/1"}, extra,
    )
    return RunResult(cfg.kind, out_dir, outputs, manifest, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# variance-scan


def run_variance_scan(cfg: ExperimentConfig, out_dir: Path, workers: int = 1) -> RunResult:
    t0 = time.perf_counter()
    system = load_system(cfg)
    labels = list(system.observables)
    basis = build_basis(system.psi0, system.hamiltonian, cfg.basis)
    matrices = exact_matrices(basis, system.hamiltonian, system.observables)

    grid = cfg.variance_scan.shot_grid
    samples = cfg.shots.samples
    all_seeds = derive_seeds(cfg.shots.master_seed, samples * len(grid))
    var_tmean = {label: [] for label in labels}
    var_tmax = {label: [] for label in labels}
    for i, shots in enumerate(grid):
        seeds = all_seeds[i * samples : (i + 1) * samples]
        series, _, _ = _ensemble_series(
            matrices, shots, seeds, cfg.time.total, cfg.time.step, labels, workers
        )
        for label in labels:
            var_t = series[label].var(axis=0, ddof=1)
            var_tmean[label].append(float(var_t.mean()))
            var_tmax[label].append(float(var_t.max()))

    slopes = {}
    intercepts = {}
    log_grid = np.log(np.asarray(grid, dtype=float))
    for label in labels:
        coeff = np.polyfit(log_grid, np.log(var_tmean[label]), 1)
        slopes[label] = float(coeff[0])
        intercepts[label] = float(coeff[1])

    header = ["shots[1]"]
    for label in labels:
        header += [f"{label}_var_tmean[{_sq_unit(label)}]",
                   f"{label}_var_tmax[{_sq_unit(label)}]"]
    rows = []
    for i, shots in enumerate(grid):
        row = [shots]
        for label in labels:
            row += [var_tmean[label][i], var_tmax[label][i]]
        rows.append(row)
    outputs = [write_csv(out_dir / "variance_scan.csv", header, rows)]
    outputs.append(
        write_csv(
            out_dir / "variance_slopes.csv",
            ["observable", "loglog_slope[1]", "loglog_intercept[1]"],
            [[label, slopes[label], intercepts[label]] for label in labels],
        )
    )
    if cfg.output.figures:
        from . import figures

        outputs += figures.render_variance(
            out_dir, grid, {lb: var_tmean[lb] for lb in labels}, slopes
        )
    manifest = write_manifest(
        out_dir, cfg, outputs, all_seeds, workers, time.perf_counter() - t0,
        {"variance_scan.csv": "qasim-variance/1",
         "variance_slopes.csv": "qasim-variance-slopes/1"},
        {"slopes": slopes},
    )
    return RunResult(cfg.kind, out_dir, outputs, manifest, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# trotter-scan


def _trotter_chunk(args):
    matrices, basis_matrix, truth, shots, seeds, total, step = args
    overlaps, hams = [], []
    for seed in seeds:
        noisy = sample_matrices(matrices, ShotModel(shots, seed))
        overlaps.append(noisy.overlap)
        hams.append(noisy.hamiltonian)
    _, alphas = solve_dynamics_stack(np.stack(overlaps), np.stack(hams), total, step)
    final = alphas[:, -1, :]
    states = final @ basis_matrix
    overlap_truth = states @ truth.conj()
    norms = np.einsum("si,si->s", states.conj(), states).real
    return (1.0 - np.abs(overlap_truth) ** 2 / norms).tolist()


def _state_infidelity(truth_amps: np.ndarray, state_amps: np.ndarray) -> float:
    num = abs(np.vdot(truth_amps, state_amps)) ** 2
    den = float(np.vdot(state_amps, state_amps).real)
    return float(1.0 - num / den)


def run_trotter_scan(cfg: ExperimentConfig, out_dir: Path, workers: int = 1) -> RunResult:
    t0 = time.perf_counter()
    system = load_system(cfg, with_observables=False)
    truth = ExactPropagator(system.hamiltonian).evolve(cfg.time.total, system.psi0)
    truth_amps = truth.amplitudes / np.linalg.norm(truth.amplitudes)

    scan = cfg.trotter_scan
    sampled_settings = [s for s in scan.shot_grid if s is not None]
    samples = cfg.shots.samples
    needed = samples * len(sampled_settings) * len(scan.step_grid)
    all_seeds = derive_seeds(cfg.shots.master_seed, needed) if needed else []
    seed_cursor = 0

    rows = []
    for steps in scan.step_grid:
        spec = BasisSpec(times=cfg.basis.times, propagation="trotter1",
                         trotter_steps=steps)
        basis = build_basis(system.psi0, system.hamiltonian, spec)
        matrices = exact_matrices(basis, system.hamiltonian, {})
        basis_matrix = np.stack([s.amplitudes for s in basis])
        for shots in scan.shot_grid:
            if shots is None:
                traj = solve_dynamics(matrices, cfg.time.total, cfg.time.step)
                state = subspace_state(basis, traj.alphas[-1])
                infid = _state_infidelity(truth_amps, state.amplitudes)
                rows.append({"steps": steps, "shots": None, "mean": infid,
                             "sd": None, "samples": 1})
            else:
                seeds = all_seeds[seed_cursor : seed_cursor + samples]
                seed_cursor += samples
                chunks = _chunk(seeds, workers)
                args = [
                    (matrices, basis_matrix, truth_amps, shots, c,
                     cfg.time.total, cfg.time.step)
                    for c in chunks
                ]
                if len(args) == 1:
                    parts = [_trotter_chunk(args[0])]
                else:
                    with ProcessPoolExecutor(max_workers=len(args)) as pool:
                        parts = list(pool.map(_trotter_chunk, args))
                infids = np.concatenate([np.asarray(p) for p in parts])
                rows.append({
                    "steps": steps, "shots": shots,
                    "mean": float(infids.mean()),
                    "sd": float(infids.std(ddof=1)) if len(infids) > 1 else None,
                    "samples": len(infids),
                })

    outputs = [
        write_csv(
            out_dir / "trotter_scan.csv",
            ["trotter_steps[1]", "shots[1]", "infidelity_mean[1]",
             "infidelity_sd[1]", "samples[1]"],
            [[r["steps"], r["shots"], r["mean"], r["sd"], r["samples"]]
             for r in rows],
        )
    ]
    if cfg.output.figures:
        from . import figures

        outputs += figures.render_trotter(out_dir, rows)
    manifest = write_manifest(
        out_dir, cfg, outputs, all_seeds, workers, time.perf_counter() - t0,
        {"trotter_scan.csv": "qasim-trotter/1"}, {},
    )
    return RunResult(cfg.kind, out_dir, outputs, manifest, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# resource-table


def run_resource_table(cfg: ExperimentConfig, out_dir: Path, workers: int = 1) -> RunResult:
    t0 = time.perf_counter()
    system = load_system(cfg, with_observables=False)
    table = cfg.resource_table
    n_terms = len(system.hamiltonian)
    h_max = max_matrix_element(system.hamiltonian)
    lam = one_norm(system.hamiltonian)

    rows = []
    threshold = heuristic = None
    for m in table.step_grid:
        dt = cfg.time.total / m
        params = ScenarioParams(
            n_states=cfg.basis.size,
            pauli_terms=n_terms,
            total_time=cfg.time.total,
            dt=dt,
            gamma=cfg.gamma,
            epsilon=table.epsilon,
        )
        formula = CostFormula(
            algorithm=table.algorithm,
            pauli_terms=n_terms,
            time=dt,
            error=table.epsilon,
            h_max=h_max,
            lam=lam,
            trotter_order=table.trotter_order,
        )
        threshold = crossover_threshold(params)
        heuristic = crossover_heuristic(params)
        standard = standard_method_cost(params, formula)
        bound = qas_cost(params, formula)
        exact = qas_cost(params, formula, cfg.basis.times)
        rows.append({
            "steps": m,
            "dt": dt,
            "poly_u": propagator_cost(formula),
            "standard": standard,
            "bound": bound,
            "exact": exact,
            "ratio_bound": standard / bound,
            "ratio_exact": standard / exact if exact > 0 else None,
            "beyond": m > threshold,
        })

    outputs = [
        write_csv(
            out_dir / "resource_table.csv",
            ["steps[1]", "dt[1/hartree]", "propagator_cost[queries]",
             "standard_cost[queries]", "qas_cost_bound[queries]",
             "qas_cost_exact[queries]", "ratio_bound[1]", "ratio_exact[1]",
             "beyond_crossover[bool]"],
            [[r["steps"], r["dt"], r["poly_u"], r["standard"], r["bound"],
              r["exact"], r["ratio_bound"], r["ratio_exact"], r["beyond"]]
             for r in rows],
        ),
        write_json(
            out_dir / "resource_summary.json",
            {
                "algorithm": table.algorithm,
                "epsilon": table.epsilon,
                "gamma": cfg.gamma,
                "n_states": cfg.basis.size,
                "pauli_terms": n_terms,
                "h_max": h_max,
                "lambda": lam,
                "crossover_threshold": threshold,
                "crossover_heuristic": heuristic,
                "basis_times": list(cfg.basis.times),
            },
        ),
    ]
    if cfg.output.figures:
        from . import figures

        outputs += figures.render_resource(
            out_dir,
            [r["steps"] for r in rows],
            [r["ratio_bound"] for r in rows],
            [r["ratio_exact"] for r in rows],
            threshold,
            heuristic,
        )
    manifest = write_manifest(
        out_dir, cfg, outputs, [], workers, time.perf_counter() - t0,
        {"resource_table.csv": "qasim-resource/1"},
        {"crossover_threshold": threshold, "crossover_heuristic": heuristic},
    )
    return RunResult(cfg.kind, out_dir, outputs, manifest, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# lindep-report


def run_lindep_report(cfg: ExperimentConfig, out_dir: Path, workers: int = 1) -> RunResult:
    t0 = time.perf_counter()
    system = load_system(cfg, with_observables=False)
    basis = build_basis(system.psi0, system.hamiltonian, cfg.basis)
    matrices = exact_matrices(basis, system.hamiltonian, {})
    report = lin_independence_report(
        matrices.overlap,
        eigengaps=system.spectral_gaps,
        basis_times=cfg.basis.times,
        horizon=cfg.time.total,
    )
    outputs = [
        write_json(
            out_dir / "lindep_report.json",
            {
                "eigenvalues": report.eigenvalues,
                "determinant": report.determinant,
                "condition_number": report.condition_number,
                "cutoff": report.cutoff,
                "passed": report.passed,
                "basis_times": report.basis_times,
                "forbidden_times": [
                    {"gap": gap, "times": times}
                    for gap, times in report.forbidden_times
                ],
            },
        )
    ]

    sweep = None
    if cfg.basis.size == 2:
        # det F(s) for a two-state basis reduces to 1 - |<psi0|U(s)|psi0>|^2.
        points = cfg.lindep.sweep_points if cfg.lindep else 400
        prop = ExactPropagator(system.hamiltonian)
        weights = np.abs(prop.eigenvectors.conj().T @ system.psi0.amplitudes) ** 2
        s_grid = np.linspace(cfg.time.total / points, cfg.time.total, points)
        z = np.exp(-1j * np.outer(s_grid, prop.eigenvalues)) @ weights
        dets = 1.0 - np.abs(z) ** 2
        min_eigs = 1.0 - np.abs(z)
        cutoff_ratio = 1e-8
        sweep_rows = [
            [s, d, e, bool(e > cutoff_ratio * (1.0 + abs(z_i)))]
            for s, d, e, z_i in zip(s_grid, dets, min_eigs, np.abs(z))
        ]
        outputs.append(
            write_csv(
                out_dir / "lindep_sweep.csv",
                ["s[1/hartree]", "det_f[1]", "min_eigenvalue[1]", "passed[bool]"],
                sweep_rows,
            )
        )
        sweep = (s_grid, dets)

    if cfg.output.figures and sweep is not None:
        from . import figures

        outputs += figures.render_lindep(
            out_dir, sweep[0], sweep[1], report.forbidden_times, cfg.basis.times
        )
    manifest = write_manifest(
        out_dir, cfg, outputs, [], workers, time.perf_counter() - t0,
        {"lindep_sweep.csv": "qasim-lindep-sweep/1"} if sweep is not None else {},
        {"passed": report.passed},
    )
    return RunResult(cfg.kind, out_dir, outputs, manifest, time.perf_counter() - t0)


RUNNERS = {
    "dynamics": run_dynamics,
    "variance-scan": run_variance_scan,
    "trotter-scan": run_trotter_scan,
    "resource-table": run_resource_table,
    "lindep-report": run_lindep_report,
}


def run_experiment(cfg: ExperimentConfig, out_dir, workers: int = 1) -> RunResult:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return RUNNERS[cfg.kind](cfg, out_dir, workers)
