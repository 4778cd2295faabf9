"""Figure rendering for experiment outputs (PNGs written next to the CSVs)."""

from __future__ import annotations

from math import ceil
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def _series_panel(ax, times, ref, qas, band):
    (line,) = ax.plot(times, qas, lw=1.2, label="subspace")
    ax.plot(times, ref, ls="--", lw=1.0, color="black", alpha=0.6, label="exact")
    if band is not None:
        mean = band.mean(axis=0)
        sd = band.std(axis=0, ddof=1)
        ax.fill_between(times, mean - sd, mean + sd, color=line.get_color(),
                        alpha=0.25, lw=0, label="sampled mean +/- sd")


def render_dynamics(out_dir: Path, times, labels, ref, qas, sampled=None):
    paths = []
    pops = [lb for lb in labels if lb.startswith("pop_")]
    if pops:
        fig, ax = plt.subplots(figsize=(7.2, 4.4))
        for label in pops:
            (line,) = ax.plot(times, qas[label], lw=1.2, label=label)
            ax.plot(times, ref[label], ls="--", lw=0.9, color=line.get_color(),
                    alpha=0.65)
            if sampled is not None and label in sampled:
                mean = sampled[label].mean(axis=0)
                sd = sampled[label].std(axis=0, ddof=1)
                ax.fill_between(times, mean - sd, mean + sd,
                                color=line.get_color(), alpha=0.22, lw=0)
        ax.set_xlabel("time (1/hartree)")
        ax.set_ylabel("orbital population")
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        paths.append(_save(fig, out_dir / "populations.png"))
    energies = [lb for lb in labels if lb.startswith("E_")]
    if energies:
        nrows = ceil(len(energies) / 2)
        fig, axes = plt.subplots(nrows, 2, figsize=(9.2, 3.1 * nrows),
                                 squeeze=False, sharex=True)
        for ax, label in zip(axes.flat, energies):
            band = sampled.get(label) if sampled is not None else None
            _series_panel(ax, times, ref[label], qas[label], band)
            ax.set_title(label, fontsize=10)
            ax.set_ylabel("energy (hartree)")
        for ax in axes.flat[len(energies):]:
            ax.set_visible(False)
        for ax in axes[-1]:
            ax.set_xlabel("time (1/hartree)")
        axes.flat[0].legend(fontsize=8)
        fig.tight_layout()
        paths.append(_save(fig, out_dir / "energies.png"))
    return paths


def render_variance(out_dir: Path, shot_grid, var_mean, slopes):
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    grid = np.asarray(shot_grid, dtype=float)
    for label, values in var_mean.items():
        ax.loglog(grid, values, marker="o", ms=4, lw=1.2,
                  label=f"{label} (slope {slopes[label]:+.2f})")
    anchor = next(iter(var_mean.values()))[0]
    ax.loglog(grid, anchor * grid[0] / grid, ls=":", color="gray", lw=1.0,
              label="1/N_s reference")
    ax.set_xlabel("shots per component")
    ax.set_ylabel("across-seed variance (time mean)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return [_save(fig, out_dir / "variance_scan.png")]


def render_trotter(out_dir: Path, rows):
    groups: dict = {}
    for row in rows:
        groups.setdefault(row["shots"], []).append((row["steps"], row["mean"]))
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for shots, points in groups.items():
        points.sort()
        steps = [p[0] for p in points]
        vals = [max(p[1], 1e-18) for p in points]
        label = "exact matrices" if shots is None else f"N_s = {shots:g}"
        ax.loglog(steps, vals, marker="o", ms=4, lw=1.2, label=label)
    ax.set_xlabel("Trotter steps per basis state")
    ax.set_ylabel("infidelity at final time")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return [_save(fig, out_dir / "trotter_scan.png")]


def render_resource(out_dir: Path, steps, ratio_bound, ratio_exact,
                    threshold, heuristic):
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.loglog(steps, ratio_bound, marker="o", ms=4, lw=1.2,
              label="standard / subspace (bound)")
    ax.loglog(steps, ratio_exact, marker="s", ms=4, lw=1.2,
              label="standard / subspace (exact times)")
    ax.axhline(1.0, color="gray", lw=0.8, ls=":")
    ax.axvline(threshold, color="tab:red", lw=0.9, ls="--",
               label=f"crossover {threshold:g}")
    ax.axvline(heuristic, color="tab:orange", lw=0.9, ls="-.",
               label=f"heuristic {heuristic:g}")
    ax.set_xlabel("reporting steps T/dt")
    ax.set_ylabel("cost ratio")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return [_save(fig, out_dir / "resource_table.png")]


def render_lindep(out_dir: Path, s_grid, dets, forbidden, basis_times):
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.plot(s_grid, dets, lw=1.2)
    for gap, times in forbidden:
        for i, t in enumerate(times):
            ax.axvline(t, color="tab:red", ls="--", lw=0.9,
                       label="degenerate basis time" if i == 0 else None)
    for t in basis_times:
        if t > 0:
            ax.axvline(t, color="tab:green", ls=":", lw=1.0,
                       label=f"chosen s = {t:g}")
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.set_xlabel("second basis time s (1/hartree)")
    ax.set_ylabel("det F")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return [_save(fig, out_dir / "lindep_sweep.png")]
