"""Client project inspection: manifest, dependency resolution, source discovery."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

from .semver import SemverError, Version, VersionRange, parse_range, parse_version

__all__ = [
    "ProjectError",
    "ProjectManifest",
    "NoManifest",
    "DependencyResolution",
    "SourceSet",
    "read_manifest",
    "resolve_dependency",
    "discover_sources",
    "SOURCE_EXTENSIONS",
    "SIZE_LIMIT",
]

SOURCE_EXTENSIONS = (".js", ".mjs", ".cjs")
SIZE_LIMIT = 2 * 1024 * 1024
_ALWAYS_EXCLUDED = frozenset({"node_modules", ".git"})
_TOP_EXCLUDED = frozenset({"dist", "build"})
_NON_SEMVER_PREFIXES = (
    "git+", "git:", "git@", "github:", "gitlab:", "bitbucket:", "gist:",
    "http:", "https:", "file:", "link:", "npm:", "workspace:", "portal:", "patch:",
)


class ProjectError(OSError):
    """The project root itself cannot be read."""


@dataclass(frozen=True)
class ProjectManifest:
    name: str
    declared_dependencies: Dict[str, str]
    root: Path

    def declares(self, package: str) -> bool:
        return package.lower() in self.declared_dependencies


@dataclass(frozen=True)
class NoManifest:
    root: Path
    reason: str

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class DependencyResolution:
    package: str
    declared_range: Optional[VersionRange] = None
    installed_version: Optional[Version] = None
    resolvable: bool = False
    unresolvable_reason: Optional[str] = None
    specifier: Optional[str] = None

    @property
    def declared(self) -> bool:
        return self.specifier is not None


@dataclass(frozen=True)
class SourceSet:
    root: Path
    files: Tuple[str, ...] = ()
    skipped: Tuple[Tuple[str, str], ...] = ()


def _dependency_map(doc: dict, key: str) -> Dict[str, str]:
    deps = doc.get(key)
    if not isinstance(deps, dict):
        return {}
    return {str(k).lower(): v for k, v in deps.items() if isinstance(v, str)}


def read_manifest(root: Union[str, Path]) -> Union[ProjectManifest, NoManifest]:
    """Read ``package.json`` at ``root``.

    A missing, unreadable or unparseable manifest yields :class:`NoManifest`
    carrying the reason, never an exception.
    """
    root = Path(root)
    path = root / "package.json"
    if not path.is_file():
        return NoManifest(root, "package.json not found")
    try:
        doc = json.loads(path.read_bytes().decode("utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        return NoManifest(root, f"package.json unreadable: {exc}")
    if not isinstance(doc, dict):
        return NoManifest(root, "package.json is not a JSON object")
    declared = _dependency_map(doc, "devDependencies")
    declared.update(_dependency_map(doc, "dependencies"))
    name = doc.get("name") if isinstance(doc.get("name"), str) else ""
    return ProjectManifest(name, dict(sorted(declared.items())), root)


def _installed_version(root: Path, package: str) -> Optional[Version]:
    path = root.joinpath("node_modules", *package.split("/"), "package.json")
    try:
        doc = json.loads(path.read_bytes().decode("utf-8"))
        return parse_version(doc["version"])
    except (OSError, UnicodeDecodeError, ValueError, KeyError, TypeError):
        return None


def resolve_dependency(manifest: ProjectManifest, package: str) -> DependencyResolution:
    package = package.lower()
    installed = _installed_version(manifest.root, package)
    specifier = manifest.declared_dependencies.get(package)
    if specifier is None:
        return DependencyResolution(package, None, installed, False, "not declared")
    if specifier.strip().lower().startswith(_NON_SEMVER_PREFIXES):
        return DependencyResolution(package, None, installed, False, "non-semver specifier", specifier)
    try:
        declared = parse_range(specifier)
    except SemverError:
        # dist-tags ("latest"), "user/repo" shorthands and the like
        return DependencyResolution(package, None, installed, False, "non-semver specifier", specifier)
    return DependencyResolution(package, declared, installed, True, None, specifier)


def discover_sources(root: Union[str, Path]) -> SourceSet:
    """Collect JavaScript sources under ``root`` in lexicographic path order.

    ``node_modules`` and ``.git`` are pruned everywhere, ``dist``/``build``
    only directly under the root. Symlinks are never followed. Oversized or
    non-UTF-8 files are reported in ``skipped``.
    """
    root = Path(root)
    if not root.is_dir():
        raise ProjectError(f"project root is not a readable directory: {root}")
    try:
        os.listdir(root)
    except OSError as exc:
        raise ProjectError(f"project root is not readable: {exc}") from None

    files = []
    skipped = []

    def walk(directory: Path, rel: str, depth: int) -> None:
        try:
            entries = sorted(os.scandir(directory), key=lambda e: e.name)
        except OSError as exc:
            skipped.append((rel or ".", f"unreadable directory: {exc.strerror}"))
            return
        for entry in entries:
            rel_path = f"{rel}/{entry.name}" if rel else entry.name
            if entry.is_symlink():
                if entry.name.endswith(SOURCE_EXTENSIONS):
                    skipped.append((rel_path, "symlink"))
                continue
            if entry.is_dir():
                if entry.name in _ALWAYS_EXCLUDED:
                    continue
                if depth == 0 and entry.name in _TOP_EXCLUDED:
                    continue
                walk(Path(entry.path), rel_path, depth + 1)
            elif entry.is_file() and entry.name.endswith(SOURCE_EXTENSIONS):
                reason = _check_file(Path(entry.path))
                if reason:
                    skipped.append((rel_path, reason))
                else:
                    files.append(rel_path)

    walk(root, "", 0)
    return SourceSet(root, tuple(sorted(files)), tuple(sorted(skipped)))


def _check_file(path: Path) -> Optional[str]:
    try:
        if path.stat().st_size > SIZE_LIMIT:
            return "size limit"
        path.read_bytes().decode("utf-8")
    except UnicodeDecodeError:
        return "not valid UTF-8"
    except OSError as exc:
        return f"unreadable: {exc.strerror}"
    return None
