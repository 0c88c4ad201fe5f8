"""Figures for suite reports, rendered off-screen with the Agg backend."""

from __future__ import annotations

import math
import os
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import arch, summation  # noqa: E402
from .report import SuiteReport  # noqa: E402


def _errors(rep: SuiteReport, path: str) -> str:
    names, errs = [], []
    for c in rep.checks:
        e = c.rel_err if c.rel_err is not None else c.abs_err
        if e is None or c.status == "FINDING":
            continue
        names.append(c.name)
        errs.append(max(float(e), 1e-17))
    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.22 * len(names) + 1)))
    colors = ["tab:red" if c.status == "FAIL" else "tab:blue"
              for c in rep.checks if c.status != "FINDING" and (c.rel_err is not None or c.abs_err is not None)]
    ax.barh(range(len(names)), errs, color=colors)
    ax.set_xscale("log")
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=6)
    ax.invert_yaxis()
    ax.set_xlabel("error (relative where defined)")
    ax.set_title(f"{rep.suite}: residual per check")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _dual_terms(phi, s: float, path: str, n_max: int = 400) -> str:
    """Magnitude of the dual-side terms w(n) H phi(n)."""
    table = summation._TermTable(phi, lambda x: summation.oppenheim_kernel(x, s), 1200)
    ns = np.arange(1, n_max + 1)
    if s == 0.5:
        w = np.array([len(summation.divisors(int(k))) for k in ns], dtype=float)
    else:
        w = np.array([summation.divisor_sigma(int(k), 2 * s - 1) * k ** (0.5 - s) for k in ns])
    t = np.abs(w * table(ns.astype(float)))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(ns, np.maximum(t, 1e-300), ".", ms=2)
    ax.set_xlabel("n")
    ax.set_ylabel("|dual term|")
    ax.set_title(f"dual-side terms, s = {s:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _kernel_curves(svals, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    a = np.linspace(-1.5, 4.0, 800)
    a = a[a != 0]
    for s in svals:
        if 0 < s <= 0.5:
            ax.plot(a, arch.kernel_value(a, s), lw=1, label=f"s = {s:g}")
    ax.axhline(0, color="0.6", lw=0.5)
    ax.set_ylim(-6, 6)
    ax.set_xlabel("a")
    ax.set_ylabel("K(a, s)")
    ax.set_title("real-place kernel")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _basic_curves(svals, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    x = np.linspace(0.02, 2.5, 400)
    for s in svals:
        ax.semilogy(x, arch.basic_arch_value(x, s), lw=1, label=f"s = {s:g}")
    ax.set_xlabel("x")
    ax.set_ylabel("basic function")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render(rep: SuiteReport, directory: str) -> List[str]:
    """Write the figures for one suite into `directory`; returns the paths."""
    os.makedirs(directory, exist_ok=True)
    out = [_errors(rep, os.path.join(directory, f"{rep.suite}_residuals.png"))]
    if rep.suite == "voronoi" and "phi" in rep.artifacts:
        out.append(_dual_terms(rep.artifacts["phi"], 0.5, os.path.join(directory, "voronoi_dual_terms.png")))
    if rep.suite == "arch":
        svals = rep.artifacts.get("svals", [0.3, 0.45, 0.5])
        out.append(_kernel_curves(svals, os.path.join(directory, "arch_kernel.png")))
        out.append(_basic_curves(svals, os.path.join(directory, "arch_basic.png")))
    return out
