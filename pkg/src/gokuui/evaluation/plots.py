"""SVG figures: NRMSE curves with standard-error bands, box plots, N-identification heatmaps."""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..errors import InvalidArgumentError  # noqa: E402
from .report import aggregate  # noqa: E402


def _numeric(v):
    try:
        float(v)
        return True
    except (TypeError, ValueError):
        return False


def plot_curves(summary, task, path, xlabel):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for variant in sorted({r["variant"] for r in summary}):
        rows = sorted(
            (r for r in summary if r["variant"] == variant and r["task"] == task), key=lambda r: float(r["value"])
        )
        if not rows:
            continue
        x = np.array([float(r["value"]) for r in rows])
        y = np.array([r["median"] for r in rows])
        se = np.array([r["stderr"] if r["stderr"] is not None else 0.0 for r in rows])
        ax.plot(x, y, marker="o", label=variant)
        ax.fill_between(x, y - se, y + se, alpha=0.25)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(f"median NRMSE ({task})")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def plot_boxes(rows, task, path):
    groups = {}
    for r in rows:
        if r["task"] == task:
            label = r["variant"] if r.get("value") in (None, "") else f"{r['variant']}\n{r['value']}"
            groups.setdefault(label, []).append(float(r["nrmse"]))
    labels = sorted(groups)
    fig, ax = plt.subplots(figsize=(max(4, 1.2 * len(labels)), 3.5))
    ax.boxplot([groups[k] for k in labels])
    ax.set_xticks(range(1, len(labels) + 1), labels, fontsize=7)
    ax.set_ylabel(f"NRMSE ({task})")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def plot_heatmap(summary, task, path):
    rows = [r for r in summary if r["task"] == task and r.get("data_n_oscillators") not in (None, "")]
    true_n = sorted({int(r["data_n_oscillators"]) for r in rows})
    model_n = sorted({int(r["value"]) for r in rows})
    grid = np.full((len(true_n), len(model_n)), np.nan)
    for r in rows:
        grid[true_n.index(int(r["data_n_oscillators"])), model_n.index(int(r["value"]))] = r["median"]
    fig, ax = plt.subplots(figsize=(1 + 0.8 * len(model_n), 1 + 0.8 * len(true_n)))
    im = ax.imshow(grid, origin="lower", cmap="viridis")
    ax.set_xticks(range(len(model_n)), model_n)
    ax.set_yticks(range(len(true_n)), true_n)
    ax.set_xlabel("model N")
    ax.set_ylabel("true N")
    fig.colorbar(im, ax=ax, label=f"median NRMSE ({task})")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def emit_plots(report, out_dir):
    """Write every applicable figure for ``report`` into ``out_dir``; returns the paths."""
    rows = report.rows if hasattr(report, "rows") else report
    if not rows:
        raise InvalidArgumentError("empty report")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = aggregate(rows)
    tasks = sorted({r["task"] for r in rows})
    params = {r.get("param") for r in rows}
    param = next(iter(params)) if len(params) == 1 else None
    paths = []
    for task in tasks:
        paths.append(plot_boxes(rows, task, out_dir / f"box_{task}.svg"))
        values = {r.get("value") for r in rows}
        if param and len(values) > 1 and all(_numeric(v) for v in values):
            paths.append(plot_curves(summary, task, out_dir / f"curve_{task}.svg", param))
        if param == "model_n_oscillators":
            paths.append(plot_heatmap(summary, task, out_dir / f"heatmap_{task}.svg"))
    return paths
