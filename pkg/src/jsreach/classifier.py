"""Client classification: Reached, Clean, ListedOnly, NoData (and NotListed)."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .advisories import Advisory
from .extractor import CallSite, ScanResult
from .project import DependencyResolution
from .semver import ranges_intersect, satisfies

__all__ = ["Verdict", "ClassificationReport", "decide", "exposure", "classify"]


class Verdict(str, enum.Enum):
    REACHED = "Reached"
    CLEAN = "Clean"
    LISTED_ONLY = "ListedOnly"
    NO_DATA = "NoData"
    # not part of the four-way taxonomy: the package is neither declared nor imported
    NOT_LISTED = "NotListed"

    def __str__(self) -> str:
        return self.value


VERDICT_ORDER = (Verdict.REACHED, Verdict.CLEAN, Verdict.LISTED_ONLY, Verdict.NO_DATA, Verdict.NOT_LISTED)


@dataclass(frozen=True)
class ClassificationReport:
    client: str
    advisory_id: str
    verdict: Verdict
    version_affected: Optional[bool] = None
    call_sites: Tuple[CallSite, ...] = ()
    imports_found: int = 0
    warnings: Tuple[str, ...] = ()
    parse_failures: Tuple[str, ...] = ()
    elapsed: float = field(default=0.0, compare=False)


def decide(manifest_present: bool, declared: bool, imports: int, calls: int, all_failed: bool) -> Verdict:
    """The decision order, as a pure function of the five observations."""
    if not manifest_present or (declared and all_failed):
        return Verdict.NO_DATA
    if not declared and imports == 0:
        return Verdict.NOT_LISTED
    if calls > 0:
        return Verdict.REACHED
    if imports > 0:
        return Verdict.CLEAN
    return Verdict.LISTED_ONLY


def exposure(resolution: Optional[DependencyResolution], advisory: Advisory) -> Optional[bool]:
    """Whether the client's dependency version falls inside the affected range.

    The installed copy wins when present; otherwise the declared range is
    intersected with the affected range. None when neither is usable.
    """
    if resolution is None:
        return None
    if resolution.installed_version is not None:
        return satisfies(resolution.installed_version, advisory.affected)
    if resolution.resolvable and resolution.declared_range is not None:
        return ranges_intersect(resolution.declared_range, advisory.affected)
    return None


def classify(
    resolution: Optional[DependencyResolution],
    scan: Optional[ScanResult],
    manifest_present: bool,
    advisory: Advisory,
    client: str = "",
    elapsed: float = 0.0,
    reason: Optional[str] = None,
) -> ClassificationReport:
    """Combine dependency resolution and a project scan into one report.

    ``reason`` explains a missing manifest; it heads the warning list of a
    NoData report so renderers can show why the client was not analyzable.
    """
    declared = resolution is not None and resolution.declared
    calls = scan.calls if scan is not None else ()
    imports = scan.imports_found if scan is not None else 0
    all_failed = scan.all_failed if scan is not None else False
    verdict = decide(manifest_present, declared, imports, len(calls), all_failed)

    warnings = list(scan.warnings) if scan is not None else []
    if verdict is Verdict.NO_DATA:
        if not manifest_present:
            why = f"no data: {reason or 'no readable package.json'}"
        else:
            why = f"no data: all {scan.files_scanned} source files failed to parse or decode"
        warnings.insert(0, why)
    elif verdict is Verdict.NOT_LISTED:
        warnings.insert(0, f"not listed: {advisory.package} is neither declared nor imported "
                           "(outside the four-way classification)")

    return ClassificationReport(
        client=client,
        advisory_id=advisory.id,
        verdict=verdict,
        version_affected=exposure(resolution, advisory),
        call_sites=tuple(calls) if verdict is Verdict.REACHED else (),
        imports_found=imports,
        warnings=tuple(warnings),
        parse_failures=tuple(scan.parse_failures) if scan is not None else (),
        elapsed=elapsed,
    )
