"""Profile-function figures rendered to SVG files with matplotlib."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def plot_profiles(times, values, path, name, tbounds, ybounds):
    """Write one line per run of ``values`` (runs x times) to ``path``.

    Axes are fixed to ``tbounds`` x ``ybounds`` so the design region is the
    whole plotting area.
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    try:
        for i, row in enumerate(values):
            ax.plot(times, row, linewidth=1.2, label=f"run {i + 1}", clip_on=False)
        ax.set_xlim(*tbounds)
        ax.set_ylim(*ybounds)
        ax.set_xlabel("t")
        ax.set_ylabel(f"{name}(t)")
        ax.set_title(f"Profile factor {name}")
        if len(values) <= 12:
            ax.legend(fontsize="x-small", ncol=2, loc="center left", bbox_to_anchor=(1.0, 0.5))
        fig.savefig(path, format="svg", bbox_inches="tight")
    finally:
        plt.close(fig)
    return path
