"""SVG line charts of calibration curves, threshold tables and trend fits.

Every plotted series carries an SVG group id ``series-<k>`` so files can be
checked structurally. Output is byte-stable for identical input.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import ContractError  # noqa: E402
from .pipeline import PAPER_TABLE, SweepCurve, ThresholdTable, TrendFit  # noqa: E402

_RC = {"svg.hashsalt": "pcm-threshold", "svg.fonttype": "none", "font.size": 10}


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def _series(ax, x, y, k, label, **kw):
    (line,) = ax.plot(x, y, marker=kw.pop("marker", "o"), markersize=3, label=label, **kw)
    line.set_gid(f"series-{k}")
    return line


def _require(curve: SweepCurve):
    if len(curve.points) < 2:
        raise ContractError("plotting needs a curve with at least two points")


def render_plot(curve: SweepCurve, path) -> None:
    """Worst deviation, worst inconsistency and worst consistency against relative error, all in percent."""
    _require(curve)
    deltas, dev, imin = curve.arrays()
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        x = 100 * deltas
        _series(ax, x, dev, 1, "(1) max deviation Δ, %")
        _series(ax, x, 100 * (1 - imin), 2, "(2) max inconsistency 100 − I, %")
        _series(ax, x, 100 * imin, 3, "(3) min consistency I, %")
        ax.set_xlabel("relative error of comparisons δ, %")
        ax.set_ylabel("%")
        ax.grid(alpha=0.3)
        ax.legend()
        _save(fig, path)


def render_threshold_graphs(curve: SweepCurve, path) -> None:
    """The two curves read together to get a threshold: Δ(δ) on the left axis, I(δ) on the right."""
    _require(curve)
    deltas, dev, imin = curve.arrays()
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        _series(ax, 100 * deltas, dev, 1, "Δ(δ), %", color="tab:blue")
        ax.set_xlabel("relative error of comparisons δ, %")
        ax.set_ylabel("max deviation Δ, %")
        ax2 = ax.twinx()
        _series(ax2, 100 * deltas, imin, 2, "I(δ)", color="tab:red")
        ax2.set_ylabel("min consistency index I")
        ax.grid(alpha=0.3)
        fig.legend(loc="upper center", ncol=2)
        _save(fig, path)


def render_threshold_table(table: ThresholdTable, path, with_reference: bool = True) -> None:
    """Threshold against required deviation, optionally beside the published values."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        _series(ax, table.requirements, table.thresholds, 1, "generated I(Δ)")
        if with_reference:
            ref = np.array(sorted(PAPER_TABLE.items()))
            _series(ax, ref[:, 0], ref[:, 1], 2, "published reference", linestyle="--", marker="s")
        ax.set_xlabel("required deviation Δ, %")
        ax.set_ylabel("consistency threshold I")
        ax.grid(alpha=0.3)
        ax.legend()
        _save(fig, path)


def render_trend(points, fit: TrendFit, path) -> None:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        _series(ax, pts[:, 0], pts[:, 1], 1, "threshold, %", linestyle="none")
        xs = np.array([pts[:, 0].min(), pts[:, 0].max()])
        sign = "−" if fit.intercept < 0 else "+"
        _series(ax, xs, fit(xs), 2, f"I = {fit.slope:.4f} Δ {sign} {abs(fit.intercept):.3f}", marker="none")
        ax.set_xlabel("required deviation Δ, %")
        ax.set_ylabel("consistency threshold I, %")
        ax.grid(alpha=0.3)
        ax.legend()
        _save(fig, path)
