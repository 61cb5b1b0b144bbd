"""Figure rendering for the CLI report path.

Every report command drops a PNG next to its CSV unless asked not to.  The
core simulation modules stay matplotlib-free; only this module and the CLI
touch it.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def plot_quantum_run(result, path: str) -> None:
    """Six panels: energy, entropy, the three rates, spectral positivity, free energy."""
    recs = result.records
    t = np.array([r.t for r in recs])
    fig, axes = plt.subplots(2, 3, figsize=(12, 6.5))
    ax = axes[0, 0]
    ax.plot(t, [r.energy for r in recs], color="C0")
    ax.axhline(result.summary["target_energy"], color="k", lw=0.8, ls="--")
    ax.set_ylabel("energy")
    ax = axes[0, 1]
    ax.plot(t, [r.entropy for r in recs], color="C1")
    ax.set_ylabel("entropy")
    ax = axes[0, 2]
    ax.plot(t, [r.ds_dt for r in recs], label="dS/dt", lw=0.9)
    ax.plot(t, [r.dsp_dt for r in recs], label="dSp/dt", lw=0.9)
    ax.plot(t, [r.dsf_dt for r in recs], label="dSf/dt", lw=0.9)
    ax.axhline(0.0, color="k", lw=0.5)
    ax.legend(fontsize=8)
    ax.set_ylabel("entropy rates")
    ax = axes[1, 0]
    ax.plot(t, [r.min_eig for r in recs], color="C3", lw=0.9, label="min eig")
    ax2 = ax.twinx()
    ax2.plot(t, [r.neg_count for r in recs], color="C7", lw=0.8, label="neg count")
    ax2.set_ylabel("negative eigenvalues")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_ylabel("min eigenvalue")
    ax.set_xlabel("t")
    ax = axes[1, 1]
    ax.plot(t, [r.free_energy for r in recs], color="C4")
    ax.set_ylabel("free energy")
    ax.set_xlabel("t")
    ax = axes[1, 2]
    ax.plot(t, [r.rel_entropy for r in recs], color="C5")
    ax.set_ylabel("relative entropy")
    ax.set_xlabel("t")
    model = result.config.model
    fig.suptitle(f"{model}, initial {result.config.initial.label()}", fontsize=10)
    _save(fig, path)


def plot_lindblad_region(rows, boundary, path: str) -> None:
    """Scatter of grid points in the (m^2 w^2 beta_q, beta_p) plane per xi,
    colored by the analytic verdict, with the two boundary lines."""
    rows = np.asarray(rows, dtype=float)
    boundary = np.asarray(boundary, dtype=float)
    xis = sorted(set(rows[:, 0]))
    n = len(xis)
    fig, axes = plt.subplots(1, n, figsize=(3.2 * n, 3.2), squeeze=False)
    for k, xi in enumerate(xis):
        ax = axes[0, k]
        sel = rows[rows[:, 0] == xi]
        bsel = boundary[boundary[:, 0] == xi]
        x_axis = sel[:, 2]  # beta_q; unit mass and frequency make the rate equal
        ok = (sel[:, 10] > 0) & (sel[:, 11] > 0) & (sel[:, 12] > 0)
        ax.scatter(x_axis[ok], sel[ok, 1], s=14, color="C2", label="Lindblad")
        ax.scatter(x_axis[~ok], sel[~ok, 1], s=14, color="C3", marker="x", label="not CP")
        ax.plot(bsel[:, 1], bsel[:, 2], color="k", lw=0.8)
        ax.plot(bsel[:, 1], bsel[:, 3], color="k", lw=0.8)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_title(f"xi = {xi:g}", fontsize=9)
        ax.set_xlabel("beta_q")
        if k == 0:
            ax.set_ylabel("beta_p")
            ax.legend(fontsize=7)
    _save(fig, path)


def plot_classical_run(run, rows, path: str) -> None:
    rows = np.asarray(rows, dtype=float)
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.4))
    kt = run.params.kt
    ax = axes[0]
    ax.plot(run.times, run.mean_E, lw=0.9, color="C0")
    ax.fill_between(
        run.times, run.mean_E - run.sem_E, run.mean_E + run.sem_E, alpha=0.3, color="C0"
    )
    ax.axhline(kt, color="k", lw=0.8, ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel("mean energy")
    ax = axes[1]
    ax.plot(run.times, run.mean_p2_over_m, lw=0.9, label="<p^2>/m")
    ax.plot(run.times, run.mean_mw2q2, lw=0.9, label="m w^2 <q^2>")
    ax.axhline(kt, color="k", lw=0.8, ls="--")
    ax.legend(fontsize=8)
    ax.set_xlabel("t")
    ax = axes[2]
    ax.errorbar(rows[:, 0], rows[:, 4], yerr=rows[:, 8], fmt="o", ms=3, capsize=2)
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("t")
    ax.set_ylabel("first-law residual")
    _save(fig, path)


def plot_sweep(results: dict, path: str, quantity: str = "energy") -> None:
    """Overlay one record quantity across sweep cells."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, result in results.items():
        t = [r.t for r in result.records]
        ax.plot(t, [getattr(r, quantity) for r in result.records], lw=0.9, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel(quantity)
    ax.legend(fontsize=8)
    _save(fig, path)
