"""Figure rendering for CLI reports. Figures are derived artifacts only."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_coranking_heatmap(counts: np.ndarray, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 4.5))
    with np.errstate(divide="ignore"):
        img = np.log10(counts.astype(float) + 1.0)
    im = ax.imshow(img, origin="upper", cmap="Reds", aspect="auto")
    ax.set_xlabel("latent-space rank")
    ax.set_ylabel("original-space rank")
    ax.set_title("co-ranking matrix (log10 counts)")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_tc_curves(ks, trust, cont, path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(ks, trust, marker="o", ms=3, label="trustworthiness")
    ax.plot(ks, cont, marker="s", ms=3, label="continuity")
    ax.set_xlabel("neighborhood size k")
    ax.set_ylabel("score")
    ax.set_ylim(0.0, 1.02)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_spectrum(cumulative, path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(np.arange(1, len(cumulative) + 1), cumulative, marker="o", ms=3)
    ax.set_xlabel("number of components")
    ax.set_ylabel("cumulative explained variance")
    ax.set_ylim(0.0, 1.02)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_noise_sweep(ps, accuracies, path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(ps, accuracies, marker="o")
    ax.set_xlabel("depolarizing probability p")
    ax.set_ylabel("test accuracy")
    ax.set_ylim(0.0, 1.02)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_dsweep(dims, errors, path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(dims, errors, marker="o")
    ax.set_xlabel("latent dimension D")
    ax.set_ylabel("geodesic reconstruction MSE")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_loss_history(history, path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(np.arange(1, len(history) + 1), history, marker="o", ms=3)
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean BCE loss")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
