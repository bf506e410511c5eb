"""Headless figure rendering for the report bundles.

Every function writes a PNG to the given path and returns the path.  The Agg
backend is forced at import so these work in batch jobs with no display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def ambiguity_heatmap(values: np.ndarray, path, label: str = "") -> Path:
    mags = np.abs(values)
    p = mags.shape[0]
    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    im = ax.imshow(mags, origin="lower", cmap="viridis", vmin=0.0)
    ax.set_xlabel("w")
    ax.set_ylabel("tau")
    title = f"|table| p={p}"
    if label:
        title = f"{label}   {title}"
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label="magnitude")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)


def _hist(ax, values, color="#33699c"):
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi - lo < 1e-9:  # degenerate spread (exactly-flat families) breaks bins=40
        pad = max(1e-6, abs(hi) * 1e-3)
        ax.hist(values, bins=np.linspace(lo - pad, hi + pad, 11), color=color)
    else:
        ax.hist(values, bins=40, color=color)


def bound_panels(report, path) -> Path:
    """Off-peak auto, peak magnitude, and PAPR distributions with their bounds."""
    fig, axes = plt.subplots(1, 3, figsize=(12.0, 3.6))
    panels = [
        (axes[0], report.auto_per_signal, report.auto_bound, "off-peak auto max"),
        (axes[1], report.sup_per_signal, report.sup_bound, "peak magnitude"),
        (axes[2], report.papr_per_signal, None, "PAPR"),
    ]
    for ax, values, bound, name in panels:
        _hist(ax, values)
        if bound is not None:
            ax.axvline(bound, color="#c23b22", linestyle="--", label=f"bound {bound:.4f}")
            ax.legend(fontsize=8)
        ax.set_title(name, fontsize=10)
    fig.suptitle(f"{report.family} p={report.p}, {report.n_signals} signals", fontsize=11)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)


def closure_overlap_hist(report, path) -> Path:
    overlaps = report.overlaps()
    fig, ax = plt.subplots(figsize=(5.6, 3.8))
    _hist(ax, overlaps)
    ax.axvline(1.0 - report.tolerance, color="#c23b22", linestyle="--", label="match threshold")
    ax.set_xlabel("best overlap with the predicted transformed set")
    ax.set_ylabel("signals")
    ax.set_title(f"spectral closure, p={report.p} ({report.n_matched}/{report.n_signals} matched)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)


def radar_panel(report, path) -> Path:
    labels = [ident for ident, _ in report.per_signal]
    rates = [rate for _, rate in report.per_signal]
    fig, ax = plt.subplots(figsize=(max(5.6, 0.5 * len(labels)), 3.8))
    ax.bar(range(len(rates)), rates, color="#33699c")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("recovery rate")
    ax.set_title(
        f"radar p={report.p}, snr={report.snr_db}, overall {report.success_rate:.3f}", fontsize=10
    )
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)


def cdma_panel(report, path) -> Path:
    fig, ax = plt.subplots(figsize=(5.6, 3.8))
    ax.bar(range(report.n_users), report.per_user_ser, color="#33699c")
    ax.set_xticks(range(report.n_users))
    ax.set_xticklabels(report.user_ids, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("symbol error rate")
    ax.set_title(
        f"cdma p={report.p} {report.scenario} codebook={report.codebook} "
        f"aggregate {report.ser:.4f}",
        fontsize=10,
    )
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)
