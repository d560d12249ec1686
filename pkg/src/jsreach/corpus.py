"""Batch runs over a corpus of (client, advisory) pairs, with aggregate statistics."""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .advisories import Advisory
from .classifier import VERDICT_ORDER, ClassificationReport, Verdict
from .pipeline import analyze_pair

__all__ = [
    "CorpusError",
    "CorpusEntry",
    "ConfusionMatrix",
    "Rates",
    "VulnerabilitySummary",
    "Summary",
    "load_manifest",
    "run_corpus",
    "summarize",
    "confusion",
    "metrics",
    "summary_to_json",
]

MANIFEST_HEADER = ("client_path", "advisory_id", "label")
LABELS = ("reached", "not-reached")


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    client_path: str
    advisory_id: str
    label: Optional[str] = None
    base: Optional[Path] = None

    @property
    def key(self) -> Tuple[str, str]:
        return (self.client_path, self.advisory_id)

    def resolved_path(self) -> Path:
        path = Path(self.client_path)
        if self.base is not None and not path.is_absolute():
            path = self.base / path
        return path


def load_manifest(source: Union[str, Path, io.TextIOBase], base: Optional[Path] = None) -> List[CorpusEntry]:
    """Read the corpus CSV. Relative client paths resolve against ``base``
    (by default the manifest file's directory)."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        base = path.parent if base is None else base
        with open(path, newline="", encoding="utf-8") as fh:
            return load_manifest(fh, base)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != MANIFEST_HEADER:
        raise CorpusError(f"manifest header must be {','.join(MANIFEST_HEADER)}, got {header!r}")
    entries = []
    seen = set()
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise CorpusError(f"manifest line {lineno}: expected 3 columns, got {len(row)}")
        client, aid, label = (c.strip() for c in row)
        if not client or not aid:
            raise CorpusError(f"manifest line {lineno}: empty client_path or advisory_id")
        if label and label not in LABELS:
            raise CorpusError(f"manifest line {lineno}: label must be one of {LABELS} or empty, got {label!r}")
        if (client, aid) in seen:
            raise CorpusError(f"manifest line {lineno}: duplicate entry {client},{aid}")
        seen.add((client, aid))
        entries.append(CorpusEntry(client, aid, label or None, base))
    return entries


def run_corpus(manifest: Sequence[CorpusEntry], store: Sequence[Advisory], jobs: int = 1) -> List[ClassificationReport]:
    """One report per entry, in manifest order. Unknown advisory ids fail before any work."""
    by_id = {a.id: a for a in store}
    missing = sorted({e.advisory_id for e in manifest if e.advisory_id not in by_id})
    if missing:
        raise CorpusError(f"manifest references unknown advisory ids: {', '.join(missing)}")

    def run(entry: CorpusEntry) -> ClassificationReport:
        return analyze_pair(entry.resolved_path(), by_id[entry.advisory_id], client=entry.client_path)

    if jobs > 1 and len(manifest) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, manifest))
    return [run(e) for e in manifest]


@dataclass(frozen=True)
class VulnerabilitySummary:
    advisory_id: str
    counts: Dict[str, int]

    @property
    def analyzable(self) -> int:
        return self.counts[Verdict.REACHED.value] + self.counts[Verdict.CLEAN.value]

    @property
    def reached_percent(self) -> Optional[float]:
        if not self.analyzable:
            return None
        return 100.0 * self.counts[Verdict.REACHED.value] / self.analyzable

    @property
    def clean_percent(self) -> Optional[float]:
        if not self.analyzable:
            return None
        return 100.0 * self.counts[Verdict.CLEAN.value] / self.analyzable


@dataclass(frozen=True)
class Summary:
    totals: Dict[str, int]
    per_advisory: Tuple[VulnerabilitySummary, ...]
    median_clean_percent: Optional[float]

    @property
    def total(self) -> int:
        return sum(self.totals.values())


def _empty_counts() -> Dict[str, int]:
    return {v.value: 0 for v in VERDICT_ORDER}


def summarize(reports: Sequence[ClassificationReport]) -> Summary:
    totals = _empty_counts()
    per: Dict[str, Dict[str, int]] = {}
    for r in reports:
        totals[r.verdict.value] += 1
        per.setdefault(r.advisory_id, _empty_counts())[r.verdict.value] += 1
    summaries = tuple(VulnerabilitySummary(aid, per[aid]) for aid in sorted(per))
    defined = [s.clean_percent for s in summaries if s.clean_percent is not None]
    median = statistics.median(defined) if defined else None
    return Summary(totals, summaries, median)


@dataclass(frozen=True)
class ConfusionMatrix:
    n: int
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")
        if self.tp + self.fp + self.tn + self.fn != self.n:
            raise ValueError(f"tp+fp+tn+fn must equal n={self.n}")


def confusion(reports: Sequence[ClassificationReport], labels: Mapping[Tuple[str, str], str]) -> ConfusionMatrix:
    """Tool verdicts against ground truth, positive class Reached.

    ``labels`` maps (client, advisory id) to ``reached``/``not-reached``;
    reports without a label are left out of ``n``.
    """
    by_key = {(r.client, r.advisory_id): r for r in reports}
    tp = fp = tn = fn = 0
    for key, label in sorted(labels.items()):
        if label not in LABELS:
            raise CorpusError(f"bad label {label!r} for {key}")
        report = by_key.get(key)
        if report is None:
            raise CorpusError(f"label for {key[0]},{key[1]} has no report")
        predicted = report.verdict is Verdict.REACHED
        actual = label == "reached"
        if predicted and actual:
            tp += 1
        elif predicted:
            fp += 1
        elif actual:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp + fp + tn + fn, tp, fp, tn, fn)


@dataclass(frozen=True)
class Rates:
    accuracy: float
    miss_rate: float
    tpr: Optional[float]
    fpr: Optional[float]
    tnr: Optional[float]
    fnr: Optional[float]

    def rounded(self, places: int = 3) -> Dict[str, Optional[float]]:
        return {k: (None if v is None else round(v, places)) for k, v in self.as_dict().items()}

    def as_dict(self) -> Dict[str, Optional[float]]:
        return {
            "accuracy": self.accuracy,
            "miss_rate": self.miss_rate,
            "tpr": self.tpr,
            "fpr": self.fpr,
            "tnr": self.tnr,
            "fnr": self.fnr,
        }


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def metrics(m: ConfusionMatrix) -> Rates:
    if m.n <= 0:
        raise CorpusError("metrics need at least one labeled entry (n > 0)")
    return Rates(
        accuracy=(m.tn + m.tp) / m.n,
        miss_rate=(m.fp + m.fn) / m.n,
        tpr=_ratio(m.tp, m.fn + m.tp),
        fpr=_ratio(m.fp, m.tn + m.fp),
        tnr=_ratio(m.tn, m.tn + m.fp),
        fnr=_ratio(m.fn, m.fn + m.tp),
    )


def summary_to_json(summary: Summary, matrix: Optional[ConfusionMatrix] = None) -> dict:
    return {
        "totals": dict(summary.totals),
        "per_advisory": [
            {"advisory": s.advisory_id, "counts": dict(s.counts), "clean_percent": s.clean_percent}
            for s in summary.per_advisory
        ],
        "median_clean_percent": summary.median_clean_percent,
        "confusion": None if matrix is None else {
            "n": matrix.n, "tp": matrix.tp, "fp": matrix.fp, "tn": matrix.tn, "fn": matrix.fn,
        },
        "rates": None if matrix is None or matrix.n == 0 else metrics(matrix).as_dict(),
    }
