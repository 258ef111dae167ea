"""Figures for cost sweeps and size-sweep benchmarks (log-scale Y)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (6.0, 3.8),
    "savefig.dpi": 150,
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-stable for PNG/SVG/PDF
    metadata = {"Software": None} if path.suffix.lower() == ".png" else {}
    fig.savefig(path, metadata=metadata)
    plt.close(fig)
    return path


def plot_cost_sweep(rows: Sequence, path, title: str | None = None) -> Path:
    """E_noindex and E_index against the number of cells."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        cells = [r.cells for r in rows]
        ax.plot(cells, [r.e_noindex for r in rows], marker="o", ms=3, label="without index")
        ax.plot(cells, [r.e_index for r in rows], marker="s", ms=3, label="with join index")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("number of cells")
        ax.set_ylabel("cost (node visits)")
        if title:
            ax.set_title(title)
        ax.grid(True, which="major", alpha=0.3)
        ax.legend()
        return _save(fig, path)


def plot_size_sweep(reports: Sequence, path, query_id: str | None = None) -> Path:
    """Median execution time against warehouse size, both paths."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        qids = sorted({e.query_id for r in reports for e in r.entries})
        if query_id is not None:
            qids = [query_id]
        for qid in qids:
            entries = [e for r in reports for e in r.entries if e.query_id == qid]
            cells = [e.cells for e in entries]
            suffix = f" ({qid})" if len(qids) > 1 else ""
            ax.plot(cells, [e.t_noindex_ms for e in entries], marker="o", ms=3, label="without index" + suffix)
            ax.plot(cells, [e.t_index_ms for e in entries], marker="s", ms=3, label="with join index" + suffix)
            if any(e.t_memo_ms is not None for e in entries):
                ax.plot(
                    cells,
                    [e.t_memo_ms for e in entries],
                    marker="^",
                    ms=3,
                    linestyle="--",
                    label="hash join baseline" + suffix,
                )
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("warehouse size (cells)")
        ax.set_ylabel("execution time (ms)")
        ax.grid(True, which="major", alpha=0.3)
        ax.legend()
        return _save(fig, path)
