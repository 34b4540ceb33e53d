"""Figure rendering for the CLI report path.

Renders matplotlib figures to files next to the delimited output; kept
out of the computational modules so library users never pay the
matplotlib import cost unless they ask for plots.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import numpy as np
import matplotlib.pyplot as plt

from .spectrum import SpectrumTable
from .stability import StabilityMap


def _masked(table: SpectrumTable, name: str) -> np.ndarray:
    return np.array([getattr(r, name) if r.status == "ok" else np.nan
                     for r in table.rows], dtype=float)


def save_spectrum_plot(tables: dict[str, SpectrumTable], path,
                       title: str | None = None) -> None:
    """Overlay P1 and P2 for a set of labelled tables.  Markovian
    reference tables (label containing 'markov') are drawn dashed.
    Singular grid points show up as gaps, never interpolated over."""
    fig, axes = plt.subplots(2, 1, figsize=(7.0, 6.0), sharex=True)
    for label, table in tables.items():
        omega = np.array([r.omega for r in table.rows])
        style = "--" if "markov" in label else "-"
        axes[0].plot(omega, _masked(table, "p1"), style, label=label, lw=1.2)
        axes[1].plot(omega, _masked(table, "p2"), style, label=label, lw=1.2)
    for ax, name in zip(axes, (r"$P_1$ (waveguide)", r"$P_2$ (mirror M2)")):
        ax.axhline(1.0, color="0.6", lw=0.8, zorder=0)  # quantum noise limit
        ax.set_ylabel(name)
        ax.legend(fontsize=8)
    axes[1].set_xlabel(r"detuning $\omega$ (ns$^{-1}$)")
    if title:
        axes[0].set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_map_plot(smap: StabilityMap, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    x = np.array(smap.gamma1_tau)
    a = np.array(smap.alpha_tilde)
    s = np.array(smap.s1w).T  # rows = alpha, cols = gamma1_tau
    pc = ax.pcolormesh(x, a, np.sign(s) * np.log1p(np.abs(s)),
                       shading="nearest", cmap="RdBu_r",
                       vmin=-3, vmax=3)
    if smap.boundary:
        bx, ba = zip(*smap.boundary)
        ax.plot(bx, ba, "k-", lw=1.5, label="stability boundary")
        ax.legend(fontsize=8)
    ax.set_xscale("log")
    ax.set_xlabel(r"$\gamma_1 \tau$")
    ax.set_ylabel(r"$\tilde\alpha$")
    ax.set_title(f"{smap.interference} interference")
    fig.colorbar(pc, ax=ax, label=r"sign-log of $\tau\,\mathrm{Re}\,s_1$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_trace_plot(trace, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(trace.t, np.maximum(trace.norm, 1e-300), lw=1.2)
    ax.set_xlabel("t (ns)")
    ax.set_ylabel(r"$\|v(t)\|$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
