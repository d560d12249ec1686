"""Analyze a client project against advisories."""

from __future__ import annotations

import time
from pathlib import Path
from typing import List, Optional, Sequence, Union

from .advisories import Advisory
from .classifier import ClassificationReport, Verdict, classify
from .extractor import scan_project
from .project import NoManifest, ProjectError, SourceSet, discover_sources, read_manifest, resolve_dependency

__all__ = ["analyze_project", "analyze_pair"]


def _no_data(client: str, advisory: Advisory, reason: str, elapsed: float) -> ClassificationReport:
    return classify(None, None, False, advisory, client=client, elapsed=elapsed, reason=reason)


def analyze_pair(
    root: Union[str, Path],
    advisory: Advisory,
    client: Optional[str] = None,
    jobs: int = 1,
    sources: Optional[SourceSet] = None,
) -> ClassificationReport:
    """Classify one client against one advisory. Never raises for project problems."""
    start = time.perf_counter()
    root = Path(root)
    client = str(root) if client is None else client
    manifest = read_manifest(root)
    if isinstance(manifest, NoManifest):
        reason = manifest.reason if root.is_dir() else "project directory not found"
        return _no_data(client, advisory, reason, time.perf_counter() - start)
    try:
        if sources is None:
            sources = discover_sources(root)
    except ProjectError as exc:
        return _no_data(client, advisory, str(exc), time.perf_counter() - start)
    resolution = resolve_dependency(manifest, advisory.package)
    scan = scan_project(sources, advisory, jobs=jobs)
    return classify(resolution, scan, True, advisory, client=client, elapsed=time.perf_counter() - start)


def analyze_project(
    root: Union[str, Path],
    advisories: Sequence[Advisory],
    client: Optional[str] = None,
    jobs: int = 1,
) -> List[ClassificationReport]:
    """Reports for every advisory whose package the project declares or imports.

    Without a readable manifest nothing can be said about any advisory, so
    each one gets a NoData report. A root that is not a readable directory
    raises :class:`ProjectError`.
    """
    root = Path(root)
    client = str(root) if client is None else client
    sources = discover_sources(root)
    manifest = read_manifest(root)
    ordered = sorted(advisories, key=lambda a: a.id)
    if isinstance(manifest, NoManifest):
        return [_no_data(client, a, manifest.reason, 0.0) for a in ordered]
    reports = []
    for advisory in ordered:
        report = analyze_pair(root, advisory, client=client, jobs=jobs, sources=sources)
        if report.verdict is not Verdict.NOT_LISTED:
            reports.append(report)
    return reports
