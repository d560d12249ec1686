"""Static extraction of dependency imports and call sites from JavaScript.

Each file is parsed with tree-sitter and walked once. The walk builds a
lexical scope tree (function scopes for ``var`` and parameters, block scopes
for ``let``/``const``/classes) and records every call expression and every
assignment to a plain identifier. Resolution happens after the walk, so
hoisted declarations are visible to references that precede them in source
order.

A callee resolves when it is a chain of static property accesses rooted at
a local bound to the package (``require``, ``import`` or a ``const`` alias
of those) or at an inline ``require('pkg')``. A local declaration of the
same name in an inner scope shadows the binding. Resolution never guesses:
anything dynamic ends the chain and, where it touches the package, leaves a
warning instead of a call site.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import tree_sitter_javascript
from tree_sitter import Language, Node, Parser, Query, QueryCursor, Tree

from .advisories import Advisory, ExportPath
from .project import SourceSet

__all__ = [
    "BINDING_KINDS",
    "ImportBinding",
    "CallSite",
    "JSParseError",
    "ParsedFile",
    "FileScan",
    "ScanResult",
    "parse_js",
    "extract_bindings",
    "extract_calls",
    "scan_file",
    "scan_project",
]

log = logging.getLogger(__name__)

JS_LANGUAGE = Language(tree_sitter_javascript.language())
_JSX = Query(JS_LANGUAGE, "[(jsx_element) (jsx_self_closing_element)] @jsx")

# "touch" marks a binding-less use of the package: `import 'p'`, a bare
# `require('p');` statement, `export ... from 'p'` or a dynamic import().
BINDING_KINDS = ("cjs-require", "esm-default", "esm-named", "esm-namespace", "alias", "touch")

_FUNCTIONS = frozenset({
    "function_declaration", "generator_function_declaration",
    "function_expression", "function", "generator_function",
    "arrow_function", "method_definition",
})
_BLOCKS = frozenset({"statement_block", "switch_body", "for_statement", "for_in_statement", "class_body"})
_SOURCE_SUFFIXES = (".js", ".cjs", ".mjs")
# subtrees the walk never needs to enter: literals and leaf tokens
_INERT = frozenset({
    "string", "comment", "regex", "number", "hash_bang_line", "html_comment",
    "identifier", "property_identifier", "shorthand_property_identifier",
    "shorthand_property_identifier_pattern", "private_property_identifier", "statement_identifier",
    "this", "super", "true", "false", "null", "undefined", "string_fragment", "escape_sequence",
})
_HANDLED = _FUNCTIONS | _BLOCKS | {
    "class_declaration", "class", "catch_clause", "variable_declaration", "lexical_declaration",
    "import_statement", "export_statement", "call_expression", "new_expression",
    "assignment_expression", "augmented_assignment_expression", "update_expression", "with_statement",
}


def _kind_ids(names) -> frozenset:
    # one node type can own several symbol ids (aliases), so scan them all
    return frozenset(
        i for i in range(JS_LANGUAGE.node_kind_count)
        if JS_LANGUAGE.node_kind_is_named(i) and JS_LANGUAGE.node_kind_for_id(i) in names
    )


# integer kind ids let the walk skip most nodes without building type strings
_HANDLED_IDS = _kind_ids(_HANDLED)
_INERT_IDS = _kind_ids(_INERT)


class JSParseError(Exception):
    """The file is not valid JavaScript within the supported grammar."""


@dataclass(frozen=True)
class ImportBinding:
    local_name: Optional[str]
    package: str
    path: ExportPath
    kind: str
    declaring_scope: str
    file: str
    line: int
    column: int = 1


@dataclass(frozen=True)
class CallSite:
    file: str
    line: int
    column: int
    resolved_path: ExportPath
    matched_symbol: ExportPath
    snippet: str


# -- scopes -------------------------------------------------------------------

class _Scope:
    __slots__ = ("parent", "kind", "label", "names")

    def __init__(self, parent: Optional["_Scope"], kind: str, label: str):
        self.parent = parent
        self.kind = kind
        self.label = label
        self.names: Dict[str, _Symbol] = {}

    def hoist_target(self) -> "_Scope":
        scope = self
        while scope.kind == "block":
            scope = scope.parent
        return scope

    def lookup(self, name: str) -> Optional["_Symbol"]:
        scope = self
        while scope is not None:
            sym = scope.names.get(name)
            if sym is not None:
                return sym
            scope = scope.parent
        return None


class _Symbol:
    __slots__ = (
        "name", "kind", "decl", "scope", "node", "init", "init_scope", "pattern",
        "path", "binding_kind", "namespace", "reassigned", "conflict",
        "value", "state", "origin",
    )

    def __init__(self, name: str, kind: str, scope: _Scope, node: Node, decl: Optional[str] = None):
        self.name = name
        self.kind = kind  # import | declarator | param | function | class | catch | other
        self.decl = decl  # const | let | var for declarators
        self.scope = scope
        self.node = node
        self.init: Optional[Node] = None
        self.init_scope: Optional[_Scope] = None
        # static destructuring path inside the initializer; None = not static
        self.pattern: Optional[Tuple[str, ...]] = ()
        self.path: Optional[Tuple[str, ...]] = None
        self.binding_kind: Optional[str] = None
        self.namespace = False
        self.reassigned = False
        self.conflict = False
        self.value: Optional[Tuple[str, ...]] = None
        self.state = 0  # 0 unevaluated, 1 in progress, 2 done
        self.origin: Optional[str] = None


def _scope_label(kind: str, node: Node) -> str:
    if kind == "module":
        return "module"
    row, col = node.start_point
    return f"{kind}@{row + 1}:{col + 1}"


# -- literals ---------------------------------------------------------------

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v", "0": "\0"}


def _string_value(node: Node) -> Optional[str]:
    """Value of a string literal or substitution-free template, else None."""
    if node.type == "string":
        raw = node.text.decode("utf-8")[1:-1]
    elif node.type == "template_string":
        if any(c.type == "template_substitution" for c in node.named_children):
            return None
        raw = node.text.decode("utf-8")[1:-1]
    else:
        return None
    if "\\" not in raw:
        return raw
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch != "\\" or i + 1 >= len(raw):
            out.append(ch)
            i += 1
            continue
        nxt = raw[i + 1]
        if nxt == "x" and i + 3 < len(raw):
            out.append(chr(int(raw[i + 2:i + 4], 16)))
            i += 4
        elif nxt == "u" and raw[i + 2:i + 3] == "{":
            end = raw.index("}", i)
            out.append(chr(int(raw[i + 3:end], 16)))
            i = end + 1
        elif nxt == "u":
            out.append(chr(int(raw[i + 2:i + 6], 16)))
            i += 6
        elif nxt == "\n":
            i += 2
        else:
            out.append(_ESCAPES.get(nxt, nxt))
            i += 2
    return "".join(out)


def _static_key(node: Node) -> Optional[str]:
    if node.type in ("string", "template_string"):
        return _string_value(node)
    if node.type == "number":
        return node.text.decode("utf-8")
    return None


def _subpath(specifier: str, package: str) -> Optional[Tuple[str, ...]]:
    """Export path implied by a module specifier, or None if it names another module."""
    if specifier == package:
        return ()
    if not specifier.startswith(package + "/"):
        return None
    parts = [p for p in specifier[len(package) + 1:].split("/") if p]
    if parts and parts[-1].endswith(_SOURCE_SUFFIXES):
        parts[-1] = parts[-1].rsplit(".", 1)[0]
    return tuple(parts)


def _valid_path(path: Optional[Tuple[str, ...]]) -> bool:
    return path is not None and all(seg and "." not in seg for seg in path)


# -- parsing ----------------------------------------------------------------

@dataclass
class ParsedFile:
    """A successfully parsed source file plus per-package analysis cache."""

    file: str
    source: bytes
    tree: Tree
    _cache: Dict[str, "_Analysis"] = field(default_factory=dict, repr=False)

    def analysis(self, package: str) -> "_Analysis":
        result = self._cache.get(package)
        if result is None:
            result = self._cache[package] = _Analysis(self, package)
        return result


def _first_error(node: Node) -> Optional[Node]:
    stack = [node]
    while stack:
        n = stack.pop()
        if n.is_missing or n.type == "ERROR":
            return n
        if n.has_error:
            stack.extend(reversed(n.children))
    return None


def parse_js(text: str, file: str = "<input>") -> ParsedFile:
    """Parse JavaScript source. Syntax errors and JSX raise :class:`JSParseError`."""
    source = text.encode("utf-8")
    tree = Parser(JS_LANGUAGE).parse(source)
    root = tree.root_node
    if root.has_error:
        bad = _first_error(root)
        if bad is not None:
            row, col = bad.start_point
            what = f"missing {bad.type!r}" if bad.is_missing else "syntax error"
            raise JSParseError(f"{file}:{row + 1}:{col + 1}: {what}")
        raise JSParseError(f"{file}: syntax error")
    # every JSX element starts with "<", so sources without one skip the query
    jsx = QueryCursor(_JSX).captures(root).get("jsx") if b"<" in source else None
    if jsx:
        row, col = min(n.start_point for n in jsx)
        raise JSParseError(f"{file}:{row + 1}:{col + 1}: JSX is not supported")
    return ParsedFile(file, source, tree)


# -- per-file analysis --------------------------------------------------------

class _Analysis:
    """Scope tree, bindings, warnings and resolvable calls for one package."""

    def __init__(self, parsed: ParsedFile, package: str):
        self.parsed = parsed
        self.package = package
        self.file = parsed.file
        self.source = parsed.source
        self._warnings: Dict[Tuple[int, int, str], str] = {}
        self._calls: List[Tuple[Node, _Scope]] = []
        self._assignments: List[Tuple[str, _Scope]] = []
        self._requires: List[Tuple[Node, _Scope]] = []
        self._consumed: set = set()
        self._symbols: List[_Symbol] = []
        self._touches: List[ImportBinding] = []
        self._exports: List[Tuple[Node, Node, _Scope]] = []
        self._dynamic: List[Tuple[Node, _Scope, str]] = []
        self._walk(parsed.tree.root_node)
        self._apply_assignments()
        self.bindings = self._collect_bindings()
        self.resolved = self._resolve_calls()

    # positions and diagnostics

    def position(self, node: Node) -> Tuple[int, int]:
        start = node.start_byte
        line_start = self.source.rfind(b"\n", 0, start) + 1
        column = len(self.source[line_start:start].decode("utf-8", "replace")) + 1
        return node.start_point[0] + 1, column

    def warn(self, node: Node, message: str) -> None:
        line, col = self.position(node)
        self._warnings.setdefault((line, col, message), f"{self.file}:{line}:{col}: {message}")

    @property
    def warnings(self) -> List[str]:
        return [self._warnings[k] for k in sorted(self._warnings)]

    # declarations

    def _declare(self, scope: _Scope, name: str, kind: str, node: Node, decl: Optional[str] = None) -> _Symbol:
        sym = _Symbol(name, kind, scope, node, decl)
        existing = scope.names.get(name)
        if existing is None:
            scope.names[name] = sym
            self._symbols.append(sym)
            return sym
        if existing.kind == "fname":
            # a function expression's own name yields to parameters and locals
            scope.names[name] = sym
            self._symbols.append(sym)
            return sym
        # redeclaration in one scope (var twice, var over a parameter, ...)
        existing.conflict = True
        return existing

    def _declare_pattern(self, pattern: Node, scope: _Scope, kind: str, decl: Optional[str],
                         init: Optional[Node], init_scope: Optional[_Scope],
                         prefix: Optional[Tuple[str, ...]] = ()) -> None:
        t = pattern.type
        if t == "identifier":
            sym = self._declare(scope, pattern.text.decode("utf-8"), kind, pattern, decl)
            if sym.node is pattern and init is not None:
                sym.init = init
                sym.init_scope = init_scope
                sym.pattern = prefix
            return
        if t == "shorthand_property_identifier_pattern":
            name = pattern.text.decode("utf-8")
            sub = None if prefix is None else prefix + (name,)
            sym = self._declare(scope, name, kind, pattern, decl)
            if sym.node is pattern and init is not None:
                sym.init, sym.init_scope, sym.pattern = init, init_scope, sub
            return
        if t == "object_pattern":
            for child in pattern.named_children:
                if child.type == "pair_pattern":
                    key_node = child.child_by_field_name("key")
                    value = child.child_by_field_name("value")
                    key = None
                    if key_node.type in ("property_identifier", "identifier"):
                        key = key_node.text.decode("utf-8")
                    elif key_node.type in ("string", "number"):
                        key = _static_key(key_node)
                    sub = None if prefix is None or key is None else prefix + (key,)
                    self._declare_pattern(value, scope, kind, decl, init, init_scope, sub)
                elif child.type == "object_assignment_pattern":
                    self._declare_pattern(child.child_by_field_name("left"), scope, kind, decl,
                                          init, init_scope, prefix)
                elif child.type == "rest_pattern":
                    self._declare_pattern(child.named_children[0], scope, kind, decl, None, None, None)
                else:
                    self._declare_pattern(child, scope, kind, decl, init, init_scope, prefix)
            return
        if t == "assignment_pattern":
            self._declare_pattern(pattern.child_by_field_name("left"), scope, kind, decl,
                                  init, init_scope, prefix)
            return
        if t in ("array_pattern", "rest_pattern"):
            for child in pattern.named_children:
                self._declare_pattern(child, scope, kind, decl, None, None, None)
            return
        # member expressions in for-in heads and the like bind nothing

    def _declare_params(self, params: Optional[Node], scope: _Scope) -> None:
        if params is None:
            return
        if params.type == "identifier":
            self._declare(scope, params.text.decode("utf-8"), "param", params)
            return
        for child in params.named_children:
            if child.type != "comment":
                self._declare_pattern(child, scope, "param", None, None, None, None)

    def _declare_import(self, node: Node, scope: _Scope) -> None:
        source = node.child_by_field_name("source")
        specifier = _string_value(source) if source is not None else None
        base = _subpath(specifier, self.package) if specifier is not None else None
        if base is None:
            return
        clause = next((c for c in node.named_children if c.type == "import_clause"), None)
        if clause is None or not _valid_path(base):
            self._touch(node, scope)
            return
        for child in clause.named_children:
            if child.type == "identifier":
                sym = self._declare(scope, child.text.decode("utf-8"), "import", child)
                sym.path, sym.binding_kind = base, "esm-default"
            elif child.type == "namespace_import":
                ident = child.named_children[0]
                sym = self._declare(scope, ident.text.decode("utf-8"), "import", ident)
                sym.path, sym.binding_kind, sym.namespace = base, "esm-namespace", True
            elif child.type == "named_imports":
                for specifier in child.named_children:
                    if specifier.type != "import_specifier":
                        continue
                    name_node = specifier.child_by_field_name("name")
                    alias = specifier.child_by_field_name("alias")
                    if name_node.type == "string":
                        imported = _string_value(name_node)
                    else:
                        imported = name_node.text.decode("utf-8")
                    local = alias if alias is not None else name_node
                    sym = self._declare(scope, local.text.decode("utf-8"), "import", local)
                    if imported == "default":
                        sym.path, sym.binding_kind = base, "esm-default"
                    else:
                        sym.path, sym.binding_kind = base + (imported,), "esm-named"

    def _touch(self, node: Node, scope: _Scope, kind: str = "touch") -> None:
        line, col = self.position(node)
        self._touches.append(ImportBinding(None, self.package, ExportPath(), kind,
                                           scope.label, self.file, line, col))

    # the walk

    def _walk(self, root: Node) -> None:
        module = _Scope(None, "module", "module")
        stack: List[Tuple[Node, _Scope]] = [(root, module)]
        push = stack.extend
        while stack:
            node, scope = stack.pop()
            kind = node.kind_id
            if kind in _INERT_IDS:
                continue
            if kind not in _HANDLED_IDS:
                push(zip(reversed(node.named_children), repeat(scope)))
                continue
            children_scope = scope
            t = node.type

            if t in _FUNCTIONS:
                if t in ("function_declaration", "generator_function_declaration"):
                    name = node.child_by_field_name("name")
                    if name is not None:
                        self._declare(scope, name.text.decode("utf-8"), "function", name)
                fscope = _Scope(scope, "function", _scope_label("function", node))
                if t in ("function_expression", "function", "generator_function"):
                    name = node.child_by_field_name("name")
                    if name is not None:
                        fscope.names[name.text.decode("utf-8")] = _Symbol(
                            name.text.decode("utf-8"), "fname", fscope, name)
                if t == "arrow_function":
                    self._declare_params(node.child_by_field_name("parameter"), fscope)
                self._declare_params(node.child_by_field_name("parameters"), fscope)
                for i, child in enumerate(node.children):
                    if not child.is_named:
                        continue
                    if node.field_name_for_child(i) == "name":
                        # computed method names evaluate in the enclosing scope
                        if child.type == "computed_property_name":
                            stack.append((child, scope))
                        continue
                    stack.append((child, fscope))
                continue

            if t in ("class_declaration", "class"):
                name = node.child_by_field_name("name")
                if name is not None:
                    if t == "class_declaration":
                        self._declare(scope, name.text.decode("utf-8"), "class", name)
                    else:
                        children_scope = _Scope(scope, "block", _scope_label("block", node))
                        self._declare(children_scope, name.text.decode("utf-8"), "class", name)
            elif t in _BLOCKS:
                children_scope = _Scope(scope, "block", _scope_label("block", node))
                if t == "for_in_statement":
                    self._for_in_head(node, scope, children_scope)
            elif t == "catch_clause":
                children_scope = _Scope(scope, "block", _scope_label("block", node))
                param = node.child_by_field_name("parameter")
                if param is not None:
                    self._declare_pattern(param, children_scope, "catch", None, None, None, None)
            elif t in ("variable_declaration", "lexical_declaration"):
                self._declaration(node, scope)
            elif t == "import_statement":
                self._declare_import(node, scope)
                continue
            elif t == "export_statement":
                self._export(node, scope)
            elif t == "call_expression":
                self._call(node, scope)
            elif t == "new_expression":
                ctor = node.child_by_field_name("constructor")
                if ctor is not None and ctor.type == "identifier" and ctor.text == b"Function" \
                        and scope.lookup("Function") is None:
                    self.warn(node, "new Function(); generated code is not analyzed")
            elif t in ("assignment_expression", "augmented_assignment_expression"):
                self._assignment(node, scope)
            elif t == "update_expression":
                arg = node.child_by_field_name("argument")
                if arg is not None and arg.type == "identifier":
                    self._assignments.append((arg.text.decode("utf-8"), scope))
            elif t == "with_statement":
                self.warn(node, "with statement; name resolution inside it is not analyzed")

            push(zip(reversed(node.named_children), repeat(children_scope)))

    def _for_in_head(self, node: Node, outer: _Scope, loop: _Scope) -> None:
        kind = node.child_by_field_name("kind")
        left = node.child_by_field_name("left")
        if left is None:
            return
        if kind is None:
            self._assignment_target(left, outer)
            return
        decl = kind.type
        target = loop if decl in ("let", "const") else outer.hoist_target()
        self._declare_pattern(left, target, "other", decl, None, None, None)

    def _declaration(self, node: Node, scope: _Scope) -> None:
        decl = node.children[0].type  # var | let | const
        target = scope.hoist_target() if decl == "var" else scope
        for child in node.named_children:
            if child.type != "variable_declarator":
                continue
            pattern = child.child_by_field_name("name")
            value = child.child_by_field_name("value")
            self._declare_pattern(pattern, target, "declarator", decl, value, scope, ())

    def _export(self, node: Node, scope: _Scope) -> None:
        source = node.child_by_field_name("source")
        if source is None:
            return
        specifier = _string_value(source)
        if specifier is not None and _subpath(specifier, self.package) is not None:
            self._touch(node, scope)
            self.warn(node, f"re-export of {specifier!r}; consumers in other files are not followed")

    def _assignment_target(self, left: Node, scope: _Scope) -> None:
        if left.type == "identifier":
            self._assignments.append((left.text.decode("utf-8"), scope))
        elif left.type in ("object_pattern", "array_pattern", "assignment_pattern", "rest_pattern",
                           "pair_pattern", "object_assignment_pattern", "parenthesized_expression"):
            for child in left.named_children:
                if child.type == "shorthand_property_identifier_pattern":
                    self._assignments.append((child.text.decode("utf-8"), scope))
                elif child.type == "pair_pattern":
                    self._assignment_target(child.child_by_field_name("value"), scope)
                elif child.type in ("object_assignment_pattern", "assignment_pattern"):
                    self._assignment_target(child.child_by_field_name("left"), scope)
                else:
                    self._assignment_target(child, scope)

    def _assignment(self, node: Node, scope: _Scope) -> None:
        left = node.child_by_field_name("left")
        if left is None:
            return
        self._assignment_target(left, scope)
        if node.type == "assignment_expression" and left.type == "member_expression":
            right = node.child_by_field_name("right")
            text = left.text.decode("utf-8")
            if right is not None and (text == "module.exports" or text.startswith(("module.exports.", "exports."))):
                self._exports.append((node, right, scope))

    def _call(self, node: Node, scope: _Scope) -> None:
        callee = node.child_by_field_name("function")
        if callee is None:
            return
        args = node.child_by_field_name("arguments")
        if callee.type == "identifier" and callee.text == b"require":
            first = args.named_children[0] if args is not None and args.named_children else None
            specifier = _string_value(first) if first is not None else None
            if specifier is None:
                # scope check deferred: a local `require` is not Node's
                self._dynamic.append((node, scope, "require() with a non-literal specifier"))
            elif _subpath(specifier, self.package) is not None:
                self._requires.append((node, scope))
        elif callee.type == "import":
            first = args.named_children[0] if args is not None and args.named_children else None
            specifier = _string_value(first) if first is not None else None
            if specifier is None:
                self.warn(node, "import() with a non-literal specifier")
            elif _subpath(specifier, self.package) is not None:
                self._touch(node, scope)
                self.warn(node, f"dynamic import of {specifier!r}; promise results are not followed")
        elif callee.type == "identifier" and callee.text == b"eval":
            self._dynamic.append((node, scope, "eval(); evaluated code is not analyzed"))
        self._calls.append((node, scope))

    # reassignment and shadowing of `require`/`eval` are known only after the walk

    def _apply_assignments(self) -> None:
        for name, scope in self._assignments:
            sym = scope.lookup(name)
            if sym is not None and sym.kind != "import" and sym.decl != "const":
                sym.reassigned = True
        for node, scope, message in self._dynamic:
            ident = "require" if "require" in message else "eval"
            if scope.lookup(ident) is None:
                self.warn(node, message)

    # evaluation

    def _symbol_value(self, sym: _Symbol) -> Optional[Tuple[str, ...]]:
        if sym.state == 2:
            return sym.value
        if sym.state == 1:
            return None  # cyclic initializer
        sym.state = 1
        value = None
        if sym.kind == "import":
            value = sym.path
        elif sym.kind == "declarator" and sym.init is not None and sym.pattern is not None:
            base = self.evaluate(sym.init, sym.init_scope, consume=True)
            if base is not None:
                value = base + sym.pattern
                sym.origin = "cjs-require" if self._rooted_at_require(sym.init) else "alias"
        if value is not None and (sym.conflict or sym.reassigned):
            what = "redeclared" if sym.conflict else "reassigned"
            self.warn(sym.node, f"binding {sym.name!r} is {what}; alias dropped (potential miss)")
            value = None
        if value is not None and not _valid_path(value):
            value = None
        sym.value = value
        sym.state = 2
        return value

    def _rooted_at_require(self, node: Node) -> bool:
        while True:
            t = node.type
            if t in ("member_expression", "subscript_expression"):
                node = node.child_by_field_name("object")
            elif t == "parenthesized_expression":
                node = node.named_children[-1]
            elif t == "call_expression":
                callee = node.child_by_field_name("function")
                return callee.type == "identifier" and callee.text == b"require"
            else:
                return False

    def _require_path(self, node: Node, scope: _Scope) -> Optional[Tuple[str, ...]]:
        callee = node.child_by_field_name("function")
        if callee is None or callee.type != "identifier" or callee.text != b"require":
            return None
        args = node.child_by_field_name("arguments")
        if args is None or not args.named_children:
            return None
        specifier = _string_value(args.named_children[0])
        if specifier is None:
            return None
        path = _subpath(specifier, self.package)
        if path is None or scope.lookup("require") is not None:
            return None
        return path

    def evaluate(self, node: Node, scope: _Scope, consume: bool = False) -> Optional[Tuple[str, ...]]:
        """Export path denoted by an expression, or None when not statically known."""
        t = node.type
        if t == "identifier":
            sym = scope.lookup(node.text.decode("utf-8"))
            return self._symbol_value(sym) if sym is not None else None
        if t == "member_expression":
            obj = node.child_by_field_name("object")
            prop = node.child_by_field_name("property")
            if prop is None or prop.type != "property_identifier":
                return None
            base = self.evaluate(obj, scope, consume)
            if base is None:
                return None
            name = prop.text.decode("utf-8")
            if name == "default" and obj.type == "identifier":
                sym = scope.lookup(obj.text.decode("utf-8"))
                if sym is not None and sym.namespace:
                    return base
            return base + (name,)
        if t == "subscript_expression":
            obj = node.child_by_field_name("object")
            base = self.evaluate(obj, scope, consume)
            if base is None:
                return None
            index = node.child_by_field_name("index")
            key = _static_key(index) if index is not None else None
            if key is None:
                self.warn(node, "computed property access on a package binding; chain not followed")
                return None
            return base + (key,)
        if t == "parenthesized_expression":
            inner = node.named_children[-1] if node.named_children else None
            return self.evaluate(inner, scope, consume) if inner is not None else None
        if t == "sequence_expression":
            return self.evaluate(node.named_children[-1], scope, consume)
        if t == "call_expression":
            path = self._require_path(node, scope)
            if path is not None and consume:
                self._consumed.add(node.id)
            return path
        return None

    # results

    def _collect_bindings(self) -> List[ImportBinding]:
        out = list(self._touches)
        for sym in self._symbols:
            if sym.kind not in ("import", "declarator"):
                continue
            value = self._symbol_value(sym)
            if value is None:
                continue
            kind = sym.binding_kind if sym.kind == "import" else sym.origin
            line, col = self.position(sym.node)
            out.append(ImportBinding(sym.name, self.package, ExportPath(value), kind,
                                     sym.scope.label, self.file, line, col))
        for node, scope in self._requires:
            if node.id in self._consumed or scope.lookup("require") is not None:
                continue
            parent = node.parent
            while parent is not None and parent.type == "parenthesized_expression":
                parent = parent.parent
            bare = parent is not None and parent.type == "expression_statement"
            path = _subpath(_string_value(node.child_by_field_name("arguments").named_children[0]),
                            self.package)
            line, col = self.position(node)
            kind = "touch" if bare or not _valid_path(path) else "cjs-require"
            out.append(ImportBinding(None, self.package, ExportPath(path if kind != "touch" else ()),
                                     kind, scope.label, self.file, line, col))
        for node, right, scope in self._exports:
            if self.evaluate(right, scope) is not None:
                self.warn(node, "package binding re-exported; consumers in other files are not followed")
        out.sort(key=lambda b: (b.line, b.column, b.local_name or ""))
        return out

    def _resolve_calls(self) -> List[Tuple[Node, ExportPath]]:
        resolved = []
        for node, scope in self._calls:
            callee = node.child_by_field_name("function")
            path = self.evaluate(callee, scope)
            if path is not None:
                resolved.append((node, ExportPath(path)))
            args = node.child_by_field_name("arguments")
            if args is None or args.type != "arguments":
                continue
            for arg in args.named_children:
                if arg.type in ("identifier", "member_expression", "subscript_expression") \
                        and self.evaluate(arg, scope) is not None:
                    self.warn(arg, f"package binding {arg.text.decode('utf-8')!r} passed as an argument; "
                                   "not followed into the callee")
        return resolved

    def call_sites(self, symbols: Iterable[ExportPath]) -> List[CallSite]:
        wanted = set(symbols)
        out = []
        for node, path in self.resolved:
            if path not in wanted:
                continue
            callee = node.child_by_field_name("function")
            line, col = self.position(callee)
            out.append(CallSite(self.file, line, col, path, path, callee.text.decode("utf-8")))
        out.sort(key=lambda c: (c.line, c.column))
        return out


# -- public operations --------------------------------------------------------

def extract_bindings(parsed: ParsedFile, package: str) -> List[ImportBinding]:
    """Every local in ``parsed`` bound to ``package`` (or one of its subpaths)."""
    return list(parsed.analysis(package.lower()).bindings)


def extract_calls(parsed: ParsedFile, bindings: Sequence[ImportBinding], advisory: Advisory) -> List[CallSite]:
    """Call sites in ``parsed`` that resolve exactly to an advisory symbol.

    ``bindings`` must come from :func:`extract_bindings` on the same file
    and package; resolution reuses that analysis.
    """
    analysis = parsed.analysis(advisory.package)
    for b in bindings:
        if b.package != advisory.package or b.file != parsed.file:
            raise ValueError(f"binding {b.local_name!r} does not belong to {parsed.file}/{advisory.package}")
    return analysis.call_sites(advisory.symbols)


def file_warnings(parsed: ParsedFile, package: str) -> List[str]:
    return parsed.analysis(package.lower()).warnings


@dataclass(frozen=True)
class FileScan:
    file: str
    bindings: Tuple[ImportBinding, ...] = ()
    calls: Tuple[CallSite, ...] = ()
    warnings: Tuple[str, ...] = ()
    error: Optional[str] = None


@dataclass(frozen=True)
class ScanResult:
    bindings: Dict[str, Tuple[ImportBinding, ...]]
    calls: Tuple[CallSite, ...]
    parse_failures: Tuple[str, ...]
    warnings: Tuple[str, ...]
    files_scanned: int = 0

    @property
    def imports_found(self) -> int:
        return sum(1 for bs in self.bindings.values() for b in bs if b.kind != "alias")

    @property
    def all_failed(self) -> bool:
        return self.files_scanned > 0 and len(self.parse_failures) == self.files_scanned


def scan_file(root: Path, rel: str, advisory: Advisory) -> FileScan:
    try:
        text = (root / rel).read_bytes().decode("utf-8")
        parsed = parse_js(text, rel)
        analysis = parsed.analysis(advisory.package)
        return FileScan(rel, tuple(analysis.bindings), tuple(analysis.call_sites(advisory.symbols)),
                        tuple(analysis.warnings))
    except (JSParseError, OSError, UnicodeDecodeError, RecursionError) as exc:
        return FileScan(rel, error=str(exc) or type(exc).__name__)


def scan_project(sources: SourceSet, advisory: Advisory, jobs: int = 1) -> ScanResult:
    """Scan every file in ``sources`` for ``advisory``.

    Files that fail to parse are recorded, never fatal. Skipped files (size,
    encoding) count as failures too. Output order is file order then source
    order whatever ``jobs`` is.
    """
    root = Path(sources.root)
    if jobs > 1 and len(sources.files) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            scans = list(pool.map(lambda rel: scan_file(root, rel, advisory), sources.files))
    else:
        scans = [scan_file(root, rel, advisory) for rel in sources.files]

    bindings: Dict[str, Tuple[ImportBinding, ...]] = {}
    calls: List[CallSite] = []
    failures: List[str] = [path for path, reason in sources.skipped if reason != "symlink"]
    warnings: List[str] = [f"{path}: skipped ({reason})" for path, reason in sources.skipped]
    for scan in sorted(scans, key=lambda s: s.file):
        if scan.error is not None:
            failures.append(scan.file)
            warnings.append(f"parse failure: {scan.error}")
            continue
        if scan.bindings:
            bindings[scan.file] = scan.bindings
        calls.extend(scan.calls)
        warnings.extend(scan.warnings)
    counted = len(sources.files) + sum(1 for _, reason in sources.skipped if reason != "symlink")
    return ScanResult(bindings, tuple(calls), tuple(sorted(failures)), tuple(warnings), counted)
