"""Curated vulnerability advisories: loading, validation and lookup."""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, List, Optional, Sequence, Tuple, Union

from .semver import SemverError, Version, VersionRange, parse_range, parse_version, satisfies

__all__ = [
    "AdvisoryError",
    "ExportPath",
    "Advisory",
    "load_advisories",
    "load_advisory_file",
    "dump_advisories",
    "find_advisories_for",
]

ADVISORY_FIELDS = ("id", "package", "affected", "symbols", "fixed")
_REQUIRED = ("id", "package", "affected", "symbols")
_PACKAGE_NAME = re.compile(r"^(?:@[a-z0-9][a-z0-9._~-]*/)?[a-z0-9._~-][a-z0-9._~-]*$")


class AdvisoryError(ValueError):
    """Schema or invariant violation in an advisory document."""

    def __init__(self, message: str, advisory_id: Optional[str] = None, field: Optional[str] = None):
        where = []
        if advisory_id is not None:
            where.append(f"advisory {advisory_id!r}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.advisory_id = advisory_id
        self.field = field


@dataclass(frozen=True)
class ExportPath:
    """Property names leading from a package's root export to a function.

    The empty path is the root export itself being called.
    """

    segments: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for seg in self.segments:
            if not isinstance(seg, str) or not seg or "." in seg:
                raise ValueError(f"invalid export path segment {seg!r}")

    @classmethod
    def parse(cls, text: str) -> "ExportPath":
        if text == ".":
            return cls(())
        if not text:
            raise ValueError("empty export path")
        return cls(tuple(text.split(".")))

    def __str__(self) -> str:
        return ".".join(self.segments) if self.segments else "."

    def __len__(self) -> int:
        return len(self.segments)

    def startswith(self, prefix: "ExportPath") -> bool:
        return self.segments[: len(prefix.segments)] == prefix.segments


@dataclass(frozen=True)
class Advisory:
    id: str
    package: str
    affected: VersionRange
    symbols: Tuple[ExportPath, ...]
    fixed: Optional[Version] = None
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "package": self.package,
            "affected": str(self.affected),
            "symbols": [str(s) for s in self.symbols],
        }
        if self.fixed is not None:
            out["fixed"] = str(self.fixed)
        return out


def _validate(obj: object, index: int, strict: bool) -> Advisory:
    if not isinstance(obj, dict):
        raise AdvisoryError(f"entry {index} is not a JSON object")
    raw_id = obj.get("id")
    if not isinstance(raw_id, str) or not raw_id:
        raise AdvisoryError(f"entry {index} has no string id", field="id")
    aid = raw_id
    for name in _REQUIRED:
        if name not in obj:
            raise AdvisoryError("missing required field", aid, name)
    if strict:
        unknown = sorted(set(obj) - set(ADVISORY_FIELDS))
        if unknown:
            raise AdvisoryError("unknown field (use lenient mode to ignore)", aid, unknown[0])

    warnings = []
    package = obj["package"]
    if not isinstance(package, str) or not package:
        raise AdvisoryError("package must be a non-empty string", aid, "package")
    if package != package.lower():
        warnings.append(f"advisory {aid}: package name {package!r} lowercased")
        package = package.lower()
    if not _PACKAGE_NAME.match(package):
        raise AdvisoryError(f"invalid npm package name {package!r}", aid, "package")

    if not isinstance(obj["affected"], str):
        raise AdvisoryError("affected must be a range string", aid, "affected")
    try:
        affected = parse_range(obj["affected"])
    except SemverError as exc:
        raise AdvisoryError(str(exc), aid, "affected") from None

    symbols_raw = obj["symbols"]
    if not isinstance(symbols_raw, list) or not symbols_raw:
        raise AdvisoryError("symbols must be a non-empty list", aid, "symbols")
    symbols: List[ExportPath] = []
    for s in symbols_raw:
        if not isinstance(s, str):
            raise AdvisoryError(f"symbol {s!r} is not a string", aid, "symbols")
        try:
            path = ExportPath.parse(s)
        except ValueError as exc:
            raise AdvisoryError(f"bad symbol {s!r}: {exc}", aid, "symbols") from None
        if path not in symbols:
            symbols.append(path)

    fixed = None
    if obj.get("fixed") is not None:
        if not isinstance(obj["fixed"], str):
            raise AdvisoryError("fixed must be a version string", aid, "fixed")
        try:
            fixed = parse_version(obj["fixed"])
        except SemverError as exc:
            raise AdvisoryError(str(exc), aid, "fixed") from None
        if satisfies(fixed, affected):
            raise AdvisoryError(f"fixed version {fixed} lies inside the affected range", aid, "fixed")

    return Advisory(aid, package, affected, tuple(symbols), fixed, tuple(warnings))


def load_advisories(source: Union[bytes, str, IO], strict: bool = True) -> List[Advisory]:
    """Load and validate advisories from a JSON document (object or array).

    ``source`` may be bytes, text, or a file object. With ``strict`` unknown
    fields are an error; otherwise they are ignored.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise AdvisoryError(f"advisory document is not UTF-8: {exc}") from None
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise AdvisoryError(f"invalid JSON: {exc}") from None
    entries = doc if isinstance(doc, list) else [doc]
    out: List[Advisory] = []
    seen = set()
    for i, entry in enumerate(entries):
        adv = _validate(entry, i, strict)
        if adv.id in seen:
            raise AdvisoryError("duplicate advisory id", adv.id, "id")
        seen.add(adv.id)
        out.append(adv)
    return out


def load_advisory_file(path: Union[str, Path], strict: bool = True) -> List[Advisory]:
    with open(path, "rb") as fh:
        return load_advisories(fh, strict=strict)


def dump_advisories(advisories: Iterable[Advisory]) -> str:
    return json.dumps([a.to_json() for a in advisories], indent=2, ensure_ascii=False) + "\n"


def find_advisories_for(package: str, store: Sequence[Advisory]) -> List[Advisory]:
    name = package.lower()
    return sorted((a for a in store if a.package == name), key=lambda a: a.id)
