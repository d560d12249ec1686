"""Serialization of classification reports: JSON wire format and text blocks."""

from __future__ import annotations

import json
import re
from typing import Iterable, List, Sequence

from .advisories import ExportPath
from .classifier import ClassificationReport, Verdict
from .extractor import CallSite

__all__ = ["report_to_json", "report_from_json", "render_report", "dumps_json"]


def report_to_json(report: ClassificationReport, timing: bool = True) -> dict:
    return {
        "client": report.client,
        "advisory": report.advisory_id,
        "verdict": report.verdict.value,
        "version_affected": report.version_affected,
        "imports_found": report.imports_found,
        "call_sites": [
            {
                "file": c.file,
                "line": c.line,
                "column": c.column,
                "path": str(c.resolved_path),
                "snippet": c.snippet,
            }
            for c in report.call_sites
        ],
        "warnings": list(report.warnings),
        "parse_failures": list(report.parse_failures),
        "elapsed_seconds": report.elapsed if timing else 0.0,
    }


def report_from_json(obj: dict) -> ClassificationReport:
    calls = tuple(
        CallSite(c["file"], c["line"], c["column"], ExportPath.parse(c["path"]),
                 ExportPath.parse(c["path"]), c["snippet"])
        for c in obj["call_sites"]
    )
    return ClassificationReport(
        client=obj["client"],
        advisory_id=obj["advisory"],
        verdict=Verdict(obj["verdict"]),
        version_affected=obj["version_affected"],
        call_sites=calls,
        imports_found=obj["imports_found"],
        warnings=tuple(obj["warnings"]),
        parse_failures=tuple(obj["parse_failures"]),
        elapsed=obj["elapsed_seconds"],
    )


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _exposure_text(value) -> str:
    if value is None:
        return "unknown"
    return "affected version" if value else "not affected"


def _text_block(report: ClassificationReport) -> List[str]:
    lines = [
        f"== {report.client} :: {report.advisory_id}",
        f"verdict: {report.verdict.value}",
        f"version exposure: {_exposure_text(report.version_affected)}",
        f"imports found: {report.imports_found}",
    ]
    if report.call_sites:
        lines.append("call sites:")
        for c in report.call_sites:
            snippet = re.sub(r"\s+", " ", c.snippet)
            lines.append(f"  {c.file}:{c.line}:{c.column}  {snippet}")
    if report.parse_failures:
        lines.append(f"parse failures: {len(report.parse_failures)}")
        lines.extend(f"  {p}" for p in report.parse_failures)
    if report.warnings:
        lines.append("warnings:")
        lines.extend(f"  {w}" for w in report.warnings)
    return lines


def render_report(reports: Sequence[ClassificationReport], format: str = "text", timing: bool = True) -> bytes:
    """Render reports as ``text`` or ``json`` bytes; identical inputs give identical bytes."""
    if format == "json":
        return dumps_json([report_to_json(r, timing) for r in reports]).encode("utf-8")
    if format != "text":
        raise ValueError(f"unknown format {format!r}")
    if not reports:
        return b"no applicable advisories\n"
    blocks = ["\n".join(_text_block(r)) for r in reports]
    return ("\n\n".join(blocks) + "\n").encode("utf-8")
