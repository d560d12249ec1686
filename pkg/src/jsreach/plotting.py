"""Figures and delimited tables for batch summaries."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .classifier import VERDICT_ORDER, ClassificationReport  # noqa: E402
from .corpus import ConfusionMatrix, Summary  # noqa: E402

__all__ = ["write_tables", "plot_verdicts", "plot_clean_percent", "plot_confusion", "write_figures"]

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
    "savefig.bbox": "tight",
}
COLORS = {
    "Reached": "#c0392b",
    "Clean": "#27ae60",
    "ListedOnly": "#7f8c8d",
    "NoData": "#bdc3c7",
    "NotListed": "#34495e",
}
# fixed metadata keeps repeated renders byte-identical
_PNG_META = {"Software": None}


def _save(fig, path: Path) -> Path:
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)
    return path


def write_tables(summary: Summary, reports: Sequence[ClassificationReport], out_dir: Path) -> List[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    verdicts = [v.value for v in VERDICT_ORDER]

    per_path = out_dir / "per_advisory.csv"
    with open(per_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["advisory", *verdicts, "reached_percent", "clean_percent"])
        for s in summary.per_advisory:
            w.writerow([
                s.advisory_id, *(s.counts[v] for v in verdicts),
                "" if s.reached_percent is None else f"{s.reached_percent:.2f}",
                "" if s.clean_percent is None else f"{s.clean_percent:.2f}",
            ])

    reports_path = out_dir / "reports.csv"
    with open(reports_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["client", "advisory", "verdict", "version_affected", "imports_found", "call_sites"])
        for r in reports:
            affected = "" if r.version_affected is None else str(r.version_affected).lower()
            w.writerow([r.client, r.advisory_id, r.verdict.value, affected, r.imports_found, len(r.call_sites)])
    return [per_path, reports_path]


def plot_verdicts(summary: Summary, path: Path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        names = [v.value for v in VERDICT_ORDER]
        counts = [summary.totals[n] for n in names]
        bars = ax.bar(names, counts, color=[COLORS[n] for n in names])
        ax.bar_label(bars, padding=2)
        ax.set_ylabel("clients")
        ax.set_title(f"Client classifications (n={summary.total})")
        return _save(fig, path)


def plot_clean_percent(summary: Summary, path: Path) -> Optional[Path]:
    rows = [s for s in summary.per_advisory if s.clean_percent is not None]
    if not rows:
        return None
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 0.3 * len(rows) + 1.2))
        labels = [s.advisory_id for s in rows]
        clean = [s.clean_percent for s in rows]
        reached = [s.reached_percent for s in rows]
        ax.barh(labels, clean, color=COLORS["Clean"], label="Clean")
        ax.barh(labels, reached, left=clean, color=COLORS["Reached"], label="Reached")
        if summary.median_clean_percent is not None:
            ax.axvline(summary.median_clean_percent, color="black", lw=0.8, ls="--",
                       label=f"median clean {summary.median_clean_percent:.2f}%")
        ax.set_xlim(0, 100)
        ax.set_xlabel("% of importing clients")
        ax.invert_yaxis()
        ax.legend(loc="lower right", fontsize=7, frameon=False)
        return _save(fig, path)


def plot_confusion(matrix: ConfusionMatrix, path: Path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(3.2, 3))
        cells = [[matrix.tp, matrix.fn], [matrix.fp, matrix.tn]]
        ax.imshow(cells, cmap="Blues")
        for i in range(2):
            for j in range(2):
                ax.text(j, i, str(cells[i][j]), ha="center", va="center")
        ax.set_xticks([0, 1], ["Reached", "not Reached"])
        ax.set_yticks([0, 1], ["reached", "not-reached"])
        ax.set_xlabel("tool verdict")
        ax.set_ylabel("label")
        ax.set_title(f"n={matrix.n}")
        return _save(fig, path)


def write_figures(summary: Summary, reports: Sequence[ClassificationReport], out_dir, matrix=None) -> List[Path]:
    """Write CSV tables and PNG figures into ``out_dir``; returns the written paths."""
    out_dir = Path(out_dir)
    written = write_tables(summary, reports, out_dir)
    written.append(plot_verdicts(summary, out_dir / "verdicts.png"))
    clean = plot_clean_percent(summary, out_dir / "clean_percent.png")
    if clean is not None:
        written.append(clean)
    if matrix is not None and matrix.n:
        written.append(plot_confusion(matrix, out_dir / "confusion.png"))
    return written
