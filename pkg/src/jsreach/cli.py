"""Command-line entry point.

    jsreach analyze --project DIR --advisories FILE [--format text|json] [--output FILE]
                    [--jobs N] [--lenient-advisories] [--no-timing]
    jsreach batch   --manifest CSV --advisories FILE [--jobs N] [--format text|json]
                    [--output FILE] [--reports FILE] [--figures DIR] [--no-timing]
    jsreach metrics --manifest CSV --advisories FILE [--format text|json] [--output FILE]

Exit codes for ``analyze``: 0 no Reached verdict, 2 at least one Reached,
3 every verdict NoData, 1 operational error. ``batch`` and ``metrics``
return 0 on success and 1 on error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from .advisories import AdvisoryError, load_advisory_file
from .classifier import VERDICT_ORDER, ClassificationReport, Verdict
from .corpus import CorpusError, confusion, load_manifest, metrics, run_corpus, summarize, summary_to_json
from .pipeline import analyze_project
from .project import ProjectError
from .report import dumps_json, render_report, report_to_json

log = logging.getLogger("jsreach")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REACHED = 2
EXIT_NO_DATA = 3


class _Parser(argparse.ArgumentParser):
    # usage errors are operational errors; 2 is reserved for Reached
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class CliConfig:
    command: str
    advisory_file: Path
    project_root: Optional[Path] = None
    manifest: Optional[Path] = None
    format: str = "text"
    lenient_advisories: bool = False
    jobs: int = 1
    output: Optional[Path] = None
    reports: Optional[Path] = None
    figures: Optional[Path] = None
    timing: bool = True


def _jobs(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("jobs must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jsreach", description="Vulnerable-function reachability for JavaScript clients.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--advisories", required=True, type=Path, help="advisory JSON file")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", type=Path, help="write the report here instead of stdout")
        p.add_argument("--jobs", type=_jobs, default=1, help="parallel workers (default 1)")
        p.add_argument("--lenient-advisories", action="store_true", help="ignore unknown advisory fields")
        p.add_argument("--no-timing", dest="timing", action="store_false",
                       help="report elapsed_seconds as 0 so output is byte-reproducible")

    analyze = sub.add_parser("analyze", help="analyze one project")
    analyze.add_argument("--project", required=True, type=Path, help="client project directory")
    common(analyze)

    for name, text in (("batch", "run a corpus manifest"), ("metrics", "confusion metrics against labels")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--manifest", required=True, type=Path, help="corpus CSV (client_path,advisory_id,label)")
        common(p)
        p.add_argument("--reports", type=Path, help="also write per-entry reports as JSON")
        p.add_argument("--figures", type=Path, help="write CSV tables and PNG figures into this directory")
    return parser


def _config(args: argparse.Namespace) -> CliConfig:
    return CliConfig(
        command=args.command,
        advisory_file=args.advisories,
        project_root=getattr(args, "project", None),
        manifest=getattr(args, "manifest", None),
        format=args.format,
        lenient_advisories=args.lenient_advisories,
        jobs=args.jobs,
        output=args.output,
        reports=getattr(args, "reports", None),
        figures=getattr(args, "figures", None),
        timing=args.timing,
    )


def _emit(data: bytes, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        output.write_bytes(data)


def exit_code(reports: Sequence[ClassificationReport]) -> int:
    verdicts = [r.verdict for r in reports]
    if Verdict.REACHED in verdicts:
        return EXIT_REACHED
    if verdicts and all(v is Verdict.NO_DATA for v in verdicts):
        return EXIT_NO_DATA
    return EXIT_OK


def run_analyze(config: CliConfig) -> int:
    store = load_advisory_file(config.advisory_file, strict=not config.lenient_advisories)
    for adv in store:
        for w in adv.warnings:
            log.warning(w)
    reports = analyze_project(config.project_root, store, client=str(config.project_root), jobs=config.jobs)
    _emit(render_report(reports, config.format, timing=config.timing), config.output)
    return exit_code(reports)


def _summary_text(doc: dict) -> str:
    lines = [f"clients: {sum(doc['totals'].values())}"]
    for v in VERDICT_ORDER:
        lines.append(f"  {v.value:<11}{doc['totals'][v.value]:>6}")
    if doc["per_advisory"]:
        lines.append("per advisory:")
        width = max(len(p["advisory"]) for p in doc["per_advisory"])
        for p in doc["per_advisory"]:
            counts = " ".join(f"{v.value}={p['counts'][v.value]}" for v in VERDICT_ORDER)
            clean = "n/a" if p["clean_percent"] is None else f"{p['clean_percent']:.2f}%"
            lines.append(f"  {p['advisory']:<{width}}  {counts}  clean {clean}")
    median = doc["median_clean_percent"]
    lines.append(f"median clean percent: {'n/a' if median is None else f'{median:.2f}%'}")
    if doc["confusion"] is not None:
        c = doc["confusion"]
        lines.append("confusion (positive = Reached):")
        for key in ("n", "tn", "fn", "fp", "tp"):
            lines.append(f"  {key.upper() if key != 'n' else 'n':<4}{c[key]:>6}")
    if doc["rates"] is not None:
        names = {
            "accuracy": "Accuracy", "miss_rate": "Miss-classification rate", "tpr": "TP rate",
            "fpr": "FP rate", "tnr": "TN rate", "fnr": "FN rate",
        }
        lines.append("rates:")
        for key, label in names.items():
            value = doc["rates"][key]
            lines.append(f"  {label:<26}{'n/a' if value is None else f'{value:.3f}'}")
    return "\n".join(lines) + "\n"


def run_corpus_command(config: CliConfig) -> int:
    store = load_advisory_file(config.advisory_file, strict=not config.lenient_advisories)
    entries = load_manifest(config.manifest)
    labels = {e.key: e.label for e in entries if e.label is not None}
    if config.command == "metrics" and not labels:
        raise CorpusError("metrics needs a manifest with at least one label")
    reports = run_corpus(entries, store, jobs=config.jobs)
    summary = summarize(reports)
    matrix = confusion(reports, labels) if labels else None
    doc = summary_to_json(summary, matrix)

    if config.reports is not None:
        config.reports.write_bytes(
            dumps_json([report_to_json(r, config.timing) for r in reports]).encode("utf-8"))
    if config.figures is not None:
        from .plotting import write_figures

        for path in write_figures(summary, reports, config.figures, matrix):
            log.info("wrote %s", path)
    if config.format == "json":
        data = dumps_json(doc).encode("utf-8")
    else:
        data = _summary_text(doc).encode("utf-8")
    _emit(data, config.output)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    config = _config(args)
    try:
        if config.command == "analyze":
            return run_analyze(config)
        return run_corpus_command(config)
    except (AdvisoryError, CorpusError, ProjectError, OSError) as exc:
        print(f"jsreach: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
