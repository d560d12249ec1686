"""npm-flavoured semantic versions and version ranges.

Versions follow SemVer 2.0.0 precedence. Ranges accept the npm surface
syntax (comparators, ``^``, ``~``, x-ranges, hyphen ranges, whitespace
conjunction and ``||`` disjunction) and are normalized into a disjunction
of comparator sets before evaluation. Prerelease matching follows npm: a
prerelease version only satisfies a comparator set that names a prerelease
of the same ``major.minor.patch``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Optional, Tuple, Union

__all__ = [
    "SemverError",
    "Version",
    "Comparator",
    "VersionRange",
    "parse_version",
    "compare",
    "parse_range",
    "satisfies",
    "ranges_intersect",
]

Identifier = Union[int, str]


class SemverError(ValueError):
    """Raised for malformed versions or ranges."""

    def __init__(self, message: str, text: str = "", position: Optional[int] = None):
        if position is not None:
            message = f"{message} at position {position} in {text!r}"
        elif text:
            message = f"{message}: {text!r}"
        super().__init__(message)
        self.text = text
        self.position = position


def _compare_identifiers(a: Identifier, b: Identifier) -> int:
    a_num = isinstance(a, int)
    b_num = isinstance(b, int)
    if a_num and b_num:
        return (a > b) - (a < b)
    if a_num:
        return -1
    if b_num:
        return 1
    return (a > b) - (a < b)


def _compare_prerelease(a: Tuple[Identifier, ...], b: Tuple[Identifier, ...]) -> int:
    # an empty prerelease (a release) outranks any prerelease
    if not a and not b:
        return 0
    if not a:
        return 1
    if not b:
        return -1
    for x, y in zip(a, b):
        c = _compare_identifiers(x, y)
        if c:
            return c
    return (len(a) > len(b)) - (len(a) < len(b))


@total_ordering
@dataclass(frozen=True)
class Version:
    major: int
    minor: int
    patch: int
    prerelease: Tuple[Identifier, ...] = ()
    build: Tuple[str, ...] = field(default=(), compare=False)

    def __str__(self) -> str:
        text = f"{self.major}.{self.minor}.{self.patch}"
        if self.prerelease:
            text += "-" + ".".join(str(p) for p in self.prerelease)
        if self.build:
            text += "+" + ".".join(self.build)
        return text

    @property
    def core(self) -> Tuple[int, int, int]:
        return (self.major, self.minor, self.patch)

    def release(self) -> "Version":
        return Version(self.major, self.minor, self.patch)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Version):
            return NotImplemented
        return self.core == other.core and self.prerelease == other.prerelease

    def __hash__(self) -> int:
        return hash((self.core, self.prerelease))

    def __lt__(self, other: "Version") -> bool:
        if not isinstance(other, Version):
            return NotImplemented
        return compare(self, other) < 0


def compare(a: Version, b: Version) -> int:
    """Return -1, 0 or 1 by SemVer precedence; build metadata is ignored."""
    if a.core != b.core:
        return -1 if a.core < b.core else 1
    return _compare_prerelease(a.prerelease, b.prerelease)


# -- version scanning ---------------------------------------------------------

_IDENT_CHARS = frozenset("0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ-")


class _Scanner:
    def __init__(self, text: str, pos: int = 0):
        self.text = text
        self.pos = pos

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, what: str) -> SemverError:
        if self.pos >= len(self.text):
            return SemverError(f"{what}: unexpected end of input", self.text, self.pos)
        return SemverError(f"{what}: unexpected character {self.text[self.pos]!r}", self.text, self.pos)

    def number(self, what: str) -> int:
        start = self.pos
        while self.peek().isdigit() and self.peek().isascii():
            self.pos += 1
        if start == self.pos:
            raise self.fail(f"expected {what}")
        digits = self.text[start:self.pos]
        if len(digits) > 1 and digits[0] == "0":
            raise SemverError(f"leading zero in {what}", self.text, start)
        return int(digits)

    def identifiers(self, what: str, numeric_check: bool) -> Tuple[str, ...]:
        parts = []
        while True:
            start = self.pos
            while self.peek() and self.peek() in _IDENT_CHARS:
                self.pos += 1
            if start == self.pos:
                raise self.fail(f"expected {what} identifier")
            part = self.text[start:self.pos]
            if numeric_check and part.isdigit() and len(part) > 1 and part[0] == "0":
                raise SemverError(f"leading zero in numeric {what} identifier", self.text, start)
            parts.append(part)
            if self.peek() != ".":
                return tuple(parts)
            self.pos += 1

    def tail(self) -> Tuple[Tuple[Identifier, ...], Tuple[str, ...]]:
        prerelease: Tuple[Identifier, ...] = ()
        build: Tuple[str, ...] = ()
        if self.peek() == "-":
            self.pos += 1
            prerelease = tuple(int(p) if p.isdigit() else p for p in self.identifiers("prerelease", True))
        if self.peek() == "+":
            self.pos += 1
            build = self.identifiers("build", False)
        return prerelease, build


def parse_version(text: str) -> Version:
    """Parse a concrete SemVer 2.0.0 version.

    One leading ``v`` or ``=`` is tolerated. Anything else that is not valid
    SemVer raises :class:`SemverError` naming the offending position.
    """
    if not isinstance(text, str):
        raise SemverError(f"version must be a string, got {type(text).__name__}")
    scan = _Scanner(text)
    if scan.peek() in ("v", "="):
        scan.pos += 1
    major = scan.number("major version")
    if scan.peek() != ".":
        raise scan.fail("expected '.' after major version")
    scan.pos += 1
    minor = scan.number("minor version")
    if scan.peek() != ".":
        raise scan.fail("expected '.' after minor version")
    scan.pos += 1
    patch = scan.number("patch version")
    prerelease, build = scan.tail()
    if scan.pos != len(text):
        raise scan.fail("trailing input")
    return Version(major, minor, patch, prerelease, build)


# -- ranges ---------------------------------------------------------------

_OPERATORS = ("<", "<=", ">", ">=", "=")


@dataclass(frozen=True)
class Comparator:
    operator: str
    version: Version

    def __post_init__(self) -> None:
        if self.operator not in _OPERATORS:
            raise SemverError(f"unknown comparator operator {self.operator!r}")

    def __str__(self) -> str:
        return f"{self.operator}{self.version}"

    def test(self, v: Version) -> bool:
        c = compare(v, self.version)
        op = self.operator
        if op == "<":
            return c < 0
        if op == "<=":
            return c <= 0
        if op == ">":
            return c > 0
        if op == ">=":
            return c >= 0
        return c == 0


ComparatorSet = Tuple[Comparator, ...]

# matches nothing: no version sorts below 0.0.0-0
_NOTHING = Comparator("<", Version(0, 0, 0, (0,)))


@dataclass(frozen=True)
class VersionRange:
    """A disjunction of comparator sets. An empty set matches every release."""

    sets: Tuple[ComparatorSet, ...]

    def __str__(self) -> str:
        return " || ".join(" ".join(str(c) for c in s) if s else "*" for s in self.sets)

    def __contains__(self, v: Version) -> bool:
        return satisfies(v, self)


def _set_allows_prerelease(comparators: ComparatorSet, v: Version) -> bool:
    return any(c.version.prerelease and c.version.core == v.core for c in comparators)


def _set_satisfied(comparators: ComparatorSet, v: Version) -> bool:
    if not all(c.test(v) for c in comparators):
        return False
    if v.prerelease and not _set_allows_prerelease(comparators, v):
        return False
    return True


def satisfies(v: Version, r: VersionRange) -> bool:
    return any(_set_satisfied(s, v) for s in r.sets)


# Partial versions as they appear inside ranges: missing or wildcard
# components are None.
_PARTIAL = re.compile(
    r"""^v?
    (?P<major>0|[1-9]\d*|[xX*])
    (?:\.(?P<minor>0|[1-9]\d*|[xX*])
      (?:\.(?P<patch>0|[1-9]\d*|[xX*])
        (?P<tail>[-+].*)?
      )?
    )?$""",
    re.VERBOSE,
)
_OP_PREFIX = re.compile(r"^(~>|~|\^|<=|>=|<|>|=)?")
_OP_GAP = re.compile(r"(~>|~|\^|<=|>=|<|>|=)\s+")
_HYPHEN = re.compile(r"^(\S+)\s+-\s+(\S+)$")


@dataclass(frozen=True)
class _Partial:
    major: Optional[int]
    minor: Optional[int]
    patch: Optional[int]
    prerelease: Tuple[Identifier, ...] = ()

    @property
    def wild(self) -> bool:
        return self.major is None

    def floor(self) -> Version:
        return Version(self.major or 0, self.minor or 0, self.patch or 0, self.prerelease)


def _wild(part: Optional[str]) -> Optional[int]:
    if part is None or part in ("x", "X", "*"):
        return None
    return int(part)


def _parse_partial(token: str, whole: str) -> _Partial:
    if token == "":
        return _Partial(None, None, None)
    m = _PARTIAL.match(token)
    if not m:
        raise SemverError("malformed version in range", whole)
    major, minor, patch = _wild(m["major"]), _wild(m["minor"]), _wild(m["patch"])
    # a concrete number after a wildcard (1.x.3) is meaningless
    if major is None:
        minor = patch = None
    elif minor is None:
        patch = None
    prerelease: Tuple[Identifier, ...] = ()
    if m["tail"]:
        if patch is None:
            raise SemverError("prerelease on a partial version", whole)
        try:
            prerelease = parse_version(f"{major}.{minor}.{patch}{m['tail']}").prerelease
        except SemverError as exc:
            raise SemverError(f"malformed prerelease in range ({exc})", whole) from None
    return _Partial(major, minor, patch, prerelease)


def _bump(p: _Partial) -> Version:
    """Smallest version above every version matched by the partial ``p``."""
    if p.minor is None:
        return Version(p.major + 1, 0, 0)
    return Version(p.major, p.minor + 1, 0)


def _x_range(op: str, p: _Partial) -> ComparatorSet:
    if p.wild:
        return (_NOTHING,) if op in ("<", ">") else ()
    full = p.patch is not None
    if full:
        if op in ("", "="):
            return (Comparator("=", p.floor()),)
        return (Comparator(op, p.floor()),)
    if op in ("", "="):
        return (Comparator(">=", p.floor()), Comparator("<", _bump(p)))
    if op == ">":
        return (Comparator(">=", _bump(p)),)
    if op == ">=":
        return (Comparator(">=", p.floor()),)
    if op == "<":
        return (Comparator("<", p.floor()),)
    return (Comparator("<", _bump(p)),)  # "<="


def _caret(p: _Partial) -> ComparatorSet:
    if p.wild:
        return ()
    lo = Comparator(">=", p.floor())
    if p.major > 0 or p.minor is None:
        hi = Version(p.major + 1, 0, 0)
    elif p.minor > 0 or p.patch is None:
        hi = Version(0, p.minor + 1, 0)
    else:
        hi = Version(0, 0, p.patch + 1)
    return (lo, Comparator("<", hi))


def _tilde(p: _Partial) -> ComparatorSet:
    if p.wild:
        return ()
    return (Comparator(">=", p.floor()), Comparator("<", _bump(_Partial(p.major, p.minor, None))))


def _hyphen(lo_text: str, hi_text: str, whole: str) -> ComparatorSet:
    lo, hi = _parse_partial(lo_text, whole), _parse_partial(hi_text, whole)
    out = []
    if not lo.wild:
        out.append(Comparator(">=", lo.floor()))
    if not hi.wild:
        if hi.patch is not None:
            out.append(Comparator("<=", hi.floor()))
        else:
            out.append(Comparator("<", _bump(hi)))
    return tuple(out)


def _comparator_set(text: str, whole: str) -> ComparatorSet:
    text = text.strip()
    m = _HYPHEN.match(text)
    if m:
        return _hyphen(m[1], m[2], whole)
    text = _OP_GAP.sub(r"\1", text)
    out = []
    for token in text.split():
        op = _OP_PREFIX.match(token)[1] or ""
        rest = token[len(op):]
        if rest[:1] in ("<", ">", "=", "~", "^"):
            raise SemverError("doubled operator in range", whole)
        if op != "" and rest == "":
            raise SemverError("operator without a version in range", whole)
        p = _parse_partial(rest, whole)
        if op == "^":
            out.extend(_caret(p))
        elif op in ("~", "~>"):
            out.extend(_tilde(p))
        else:
            out.extend(_x_range(op, p))
    return tuple(out)


def parse_range(text: str) -> VersionRange:
    """Parse an npm range expression into normalized disjunctive form.

    >>> str(parse_range("^1.2.3"))
    '>=1.2.3 <2.0.0'
    >>> str(parse_range("~0.2.3"))
    '>=0.2.3 <0.3.0'
    """
    if not isinstance(text, str):
        raise SemverError(f"range must be a string, got {type(text).__name__}")
    parts = text.split("||")
    sets = []
    for part in parts:
        if not part.strip() and len(parts) > 1 and text.strip():
            # "1.x || " style: npm treats an empty alternative as match-all
            sets.append(())
            continue
        sets.append(_comparator_set(part, text))
    return VersionRange(tuple(sets))


# -- intersection -------------------------------------------------------------

def _bounds(comparators: Iterable[Comparator]):
    """Collapse comparators into (lower, lower_inclusive, upper, upper_inclusive)."""
    lo: Optional[Version] = None
    lo_inc = True
    hi: Optional[Version] = None
    hi_inc = True
    for c in comparators:
        v = c.version
        if c.operator in (">", ">=", "="):
            inc = c.operator != ">"
            if lo is None or compare(v, lo) > 0 or (compare(v, lo) == 0 and not inc):
                lo, lo_inc = v, inc
        if c.operator in ("<", "<=", "="):
            inc = c.operator != "<"
            if hi is None or compare(v, hi) < 0 or (compare(v, hi) == 0 and not inc):
                hi, hi_inc = v, inc
    return lo, lo_inc, hi, hi_inc


def _below(v: Version, hi: Optional[Version], hi_inc: bool) -> bool:
    if hi is None:
        return True
    c = compare(v, hi)
    return c < 0 or (c == 0 and hi_inc)


def _least_release(lo: Optional[Version], lo_inc: bool) -> Version:
    if lo is None:
        return Version(0, 0, 0)
    if lo.prerelease:
        # every prerelease sorts below its own release
        return lo.release()
    if lo_inc:
        return lo
    return Version(lo.major, lo.minor, lo.patch + 1)


def _least_prerelease(core: Tuple[int, int, int], lo: Optional[Version], lo_inc: bool) -> Optional[Version]:
    """Smallest prerelease of ``core`` at or above the lower bound, if any."""
    if lo is None or lo.core < core:
        return Version(*core, (0,))
    if lo.core > core or not lo.prerelease:
        return None
    if lo_inc:
        return lo
    # the immediate successor of a prerelease appends a zero identifier
    return Version(*core, lo.prerelease + (0,))


def _sets_intersect(a: ComparatorSet, b: ComparatorSet) -> bool:
    lo, lo_inc, hi, hi_inc = _bounds(a + b)
    if _below(_least_release(lo, lo_inc), hi, hi_inc):
        return True
    cores_a = {c.version.core for c in a if c.version.prerelease}
    cores_b = {c.version.core for c in b if c.version.prerelease}
    for core in sorted(cores_a & cores_b):
        candidate = _least_prerelease(core, lo, lo_inc)
        if candidate is not None and _below(candidate, hi, hi_inc):
            return True
    return False


def ranges_intersect(a: VersionRange, b: VersionRange) -> bool:
    """True iff some version satisfies both ranges, decided by interval algebra."""
    return any(_sets_intersect(x, y) for x in a.sets for y in b.sets)
