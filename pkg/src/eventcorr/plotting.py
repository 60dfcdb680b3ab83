"""Figure rendering for sweep and comparison reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_AXIS_LABELS = {
    "h": "polarizer height h (m)",
    "d_t": "temporal scale d_t (m)",
    "mass_length": "mass length M (m)",
    "chi_max": "chi_max",
    "alpha_max": "alpha_max",
    "k0": "carrier wave number k0 (1/m)",
    "sigma_k": "spectral width sigma_k (1/m)",
}


def _axis_label(name: str) -> str:
    return _AXIS_LABELS.get(name, name)


def render_sweep_figure(axis_name: str, rows: list[dict], path: str) -> None:
    """Coincidence and smearing factor against the swept parameter."""
    xs = [r[axis_name] for r in rows]
    fig, (ax_c, ax_s) = plt.subplots(2, 1, sharex=True, figsize=(6.4, 6.0))
    ax_c.plot(xs, [r["C"] for r in rows], color="tab:blue")
    ax_c.set_ylabel("coincidence rate C")
    ax_c.grid(True, alpha=0.3)
    ax_s.plot(xs, [r["smearing_factor"] for r in rows], color="tab:red")
    ax_s.set_ylabel("smearing factor")
    ax_s.set_xlabel(_axis_label(axis_name))
    ax_s.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_compare_figure(axis_name: str, mode_rows: list[dict], event_rows: list[dict], path: str) -> None:
    """Mode vs event coincidence curves against the swept parameter."""
    xs = [r[axis_name] for r in mode_rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(xs, [r["C"] for r in mode_rows], label="mode formalism", color="tab:blue")
    ax.plot(xs, [r["C"] for r in event_rows], label="event formalism", color="tab:red", ls="--")
    ax.set_xlabel(_axis_label(axis_name))
    ax.set_ylabel("coincidence rate C")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
