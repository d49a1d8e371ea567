"""Static SVG figures: report curves and partition ribbons."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .oscillation import MINUS, PLUS, SignedPartition  # noqa: E402
from .reports import FunctionalReport  # noqa: E402
from .special_functions import zeta_sq_values  # noqa: E402

_RC = {"svg.hashsalt": "zll", "svg.fonttype": "none", "path.simplify": False}


def _save(fig, path):
    try:
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    except OSError as exc:
        raise OSError(f"cannot write plot to {path}: {exc}") from exc
    finally:
        plt.close(fig)


def plot_report(report: FunctionalReport, path):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        if report.values:
            ax.plot(report.grid, report.values, "o-", label="value", gid="values")
            targets = [report.target_at(i) for i in range(len(report.values))]
            ax.plot(report.grid, targets, "--", color="grey", label="target", gid="target")
            ax.legend()
        ax.set_xlabel("parameter")
        ax.set_ylabel(report.name)
        ax.set_title(report.name)
        _save(fig, path)


def plot_partition(partition: SignedPartition, path, cfg=None, samples=4000):
    t = np.linspace(min(1.0, partition.upper) * 1e-3, partition.upper, samples)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(8, 4))
        for i, (a, b, s) in enumerate(partition.segments):
            colour = "#f4c7c3" if s == PLUS else "#c6dbef"
            name = "plus" if s == PLUS else "minus"
            ax.axvspan(a, b, color=colour, lw=0, gid=f"segment-{name}-{i}")
        ax.plot(t, zeta_sq_values(t, cfg), color="black", lw=0.8, label="|zeta(1/2+it)|^2", gid="zeta-sq")
        ax.plot(t, np.log(t), color="red", lw=1.0, label="log t", gid="log-t")
        ax.set_xlim(0, partition.upper)
        ax.set_xlabel("t")
        ax.legend(loc="upper left")
        ax.set_title(f"(0, {partition.upper:g}]: + where log t > Z^2, - otherwise")
        _save(fig, path)


def emit_plot(obj, path, cfg=None):
    if isinstance(obj, SignedPartition):
        plot_partition(obj, path, cfg)
    elif isinstance(obj, FunctionalReport):
        plot_report(obj, path)
    else:
        raise TypeError(f"cannot plot {type(obj).__name__}")


__all__ = ["emit_plot", "plot_partition", "plot_report", "MINUS", "PLUS"]
