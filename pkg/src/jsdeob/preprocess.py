"""Input normalization ahead of deobfuscation.

Stages: script extraction from HTML, escape-sequence repair, conditional
compilation rewriting, strict-mode compatibility fixes, redeclaration
merging, and bundler unwrapping.  Escape repair and conditional-compilation
rewriting run on raw text because both can break the parser (the latter
lives inside comments, which the parser discards).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .ast_nodes import (
    Node,
    clone,
    expression_statement,
    identifier,
    literal,
)
from .parser import parse
from .scopes import ScopeTable, build_scopes


@dataclass
class RecoveryNote:
    offset: int
    message: str
    stage: str = "preprocess"


@dataclass
class SourceText:
    content: str
    origin: str = "raw-js"  # raw-js | html-embedded
    diagnostics: list[RecoveryNote] = field(default_factory=list)


@dataclass
class EscapeRepairReport:
    octal_converted: int = 0
    utf8_recombined: int = 0
    preserved_invalid: int = 0


# -- script extraction ----------------------------------------------------

_SCRIPT_RE = re.compile(
    r"<script\b[^>]*>(.*?)</script\s*>", re.IGNORECASE | re.DOTALL
)
_SCRIPT_SRC_RE = re.compile(r"""\bsrc\s*=\s*["']""", re.IGNORECASE)


def _looks_like_html(text: str) -> bool:
    head = text.lstrip()[:256].lower()
    return head.startswith(("<!doctype", "<html", "<head", "<body")) or "<script" in text.lower()


def extract_scripts(document: str) -> list[SourceText]:
    """Script bodies from HTML in document order; plain JS passes through."""
    if not _looks_like_html(document):
        return [SourceText(document, "raw-js")]
    out = []
    for match in _SCRIPT_RE.finditer(document):
        tag = document[match.start():document.index(">", match.start()) + 1]
        if _SCRIPT_SRC_RE.search(tag):
            continue  # external script, no inline body
        body = match.group(1)
        if body.strip():
            out.append(SourceText(body, "html-embedded"))
    return out


# -- escape repair --------------------------------------------------------

def _string_spans(src: str) -> list[tuple[int, int]]:
    """(start, end) spans of string literal bodies, quotes excluded.

    A lightweight scan: comments and regex literals are skipped so their
    contents are never rewritten.  Regex detection uses the prev-char
    heuristic (a '/' after an operand char is division).
    """
    spans = []
    i, n = 0, len(src)
    prev_significant = ""
    while i < n:
        ch = src[i]
        if ch in "\"'":
            start = i + 1
            i += 1
            while i < n and src[i] != ch:
                if src[i] == "\\":
                    i += 1
                i += 1
            spans.append((start, i))
            i += 1
            prev_significant = '"'
        elif src.startswith("//", i):
            j = src.find("\n", i)
            i = n if j < 0 else j
        elif src.startswith("/*", i):
            j = src.find("*/", i + 2)
            i = n if j < 0 else j + 2
        elif ch == "/" and prev_significant not in ")]}" and not (
            prev_significant.isalnum() or prev_significant in "_$"
        ):
            i += 1
            in_class = False
            while i < n:
                c = src[i]
                if c == "\\":
                    i += 2
                    continue
                if c in "\n\r":
                    break
                if c == "[":
                    in_class = True
                elif c == "]":
                    in_class = False
                elif c == "/" and not in_class:
                    i += 1
                    break
                i += 1
            prev_significant = "/"
        else:
            if not ch.isspace():
                prev_significant = ch
            i += 1
    return spans


_OCTAL_ESCAPE_RE = re.compile(r"\\([0-3][0-7]{2})")
_HEX_RUN_RE = re.compile(r"(?:\\x[0-9a-fA-F]{2}){2,4}")


def sanitize_escapes(src: str) -> tuple[str, EscapeRepairReport]:
    report = EscapeRepairReport()
    spans = _string_spans(src)
    pieces = []
    last = 0
    for start, end in spans:
        pieces.append(src[last:start])
        pieces.append(_repair_literal(src[start:end], report))
        last = end
    pieces.append(src[last:])
    return "".join(pieces), report


def _repair_literal(body: str, report: EscapeRepairReport) -> str:
    def octal_to_hex(match: re.Match) -> str:
        report.octal_converted += 1
        return f"\\x{int(match.group(1), 8):02X}"

    body = _OCTAL_ESCAPE_RE.sub(octal_to_hex, body)

    def recombine(match: re.Match) -> str:
        text = match.group(0)
        raw = bytes(int(text[i + 2:i + 4], 16) for i in range(0, len(text), 4))
        if all(b < 0x80 for b in raw):
            return text  # plain ASCII runs are left alone
        try:
            decoded = raw.decode("utf-8")
        except UnicodeDecodeError:
            report.preserved_invalid += 1
            return text
        report.utf8_recombined += 1
        return "".join(f"\\u{ord(c):04X}" for c in decoded)

    return _HEX_RUN_RE.sub(recombine, body)


# -- conditional compilation ----------------------------------------------

_CC_BLOCK_RE = re.compile(r"/\*@cc_on(.*?)@\*/", re.DOTALL)
_CC_IF_RE = re.compile(
    r"@if\s*\((?P<cond>[^)]*)\)(?P<then>.*?)(?:@else(?P<els>.*?))?@end",
    re.DOTALL,
)


def rewrite_conditional_compilation(src: str) -> tuple[str, list[RecoveryNote]]:
    """Rewrite /*@cc_on … @*/ comment blocks to standard conditionals.

    Only the @if/@else/@end forms with @_jscript / @_win32 conditions are
    translated; anything else is neutralized to a comment and flagged.
    """
    notes: list[RecoveryNote] = []

    def rewrite_condition(cond: str) -> Optional[str]:
        cond = cond.strip()
        if cond == "@_jscript":
            return "'ActiveXObject' in window"
        if cond == "@_win32":
            notes.append(RecoveryNote(0, "approximate @_win32 platform predicate", "cc_on"))
            return 'navigator.platform.indexOf("Win") === 0'
        return None

    def rewrite_block(match: re.Match) -> str:
        body = match.group(1)
        out = []
        last = 0
        ok = True
        for m in _CC_IF_RE.finditer(body):
            cond = rewrite_condition(m.group("cond"))
            if cond is None:
                ok = False
                break
            out.append(body[last:m.start()])
            then = m.group("then").strip()
            els = (m.group("els") or "").strip()
            text = f"if ({cond}) {{ {then} }}"
            if els:
                text += f" else {{ {els} }}"
            out.append(text)
            last = m.end()
        if not ok:
            notes.append(RecoveryNote(match.start(), "unrecognized conditional compilation block", "cc_on"))
            return f"/* unsupported conditional compilation: {body.strip()} */"
        out.append(body[last:])
        return "".join(out)

    return _CC_BLOCK_RE.sub(rewrite_block, src), notes


# -- semantic compatibility -----------------------------------------------

def compatibilize(program: Node, scopes: ScopeTable) -> Node:
    """Strict-mode fixes: declare implicit globals, drop `delete <var>`."""
    program = clone(program)
    scopes = build_scopes(program)

    implicit = {
        name for name, refs in scopes.free.items()
        if any(_is_write(ident, program) for ident in refs)
        and name not in _DEFAULT_GLOBALS
    }
    declared: set[str] = set()
    new_body = []
    for stmt in program.body:
        stmt = _strip_delete_statements(stmt)
        if stmt is None:
            continue
        # Rewrite the first top-level `x = …` for an implicit global into a var.
        if (
            stmt.type == "ExpressionStatement"
            and stmt.expression.type == "AssignmentExpression"
            and stmt.expression.operator == "="
            and stmt.expression.left.type == "Identifier"
            and stmt.expression.left.name in implicit
            and stmt.expression.left.name not in declared
        ):
            name = stmt.expression.left.name
            declared.add(name)
            decl = Node(
                "VariableDeclaration", None, kind="var",
                declarations=[Node("VariableDeclarator", None,
                                   id=identifier(name),
                                   init=stmt.expression.right)],
            )
            new_body.append(decl)
            continue
        new_body.append(stmt)
    remaining = implicit - declared
    # Writes that happen somewhere other than a plain top-level assignment
    # still need a hoisted declaration.
    for name in sorted(remaining):
        new_body.insert(0, Node(
            "VariableDeclaration", None, kind="var",
            declarations=[Node("VariableDeclarator", None, id=identifier(name), init=None)],
        ))
    program.props["body"] = new_body
    return program


_DEFAULT_GLOBALS = frozenset(
    "window document navigator global console Math JSON String Number Boolean "
    "Array Object RegExp Date Error parseInt parseFloat atob btoa eval Function "
    "setTimeout setInterval alert undefined NaN Infinity isNaN isFinite "
    "encodeURIComponent decodeURIComponent escape unescape".split()
)


def _is_write(ident: Node, program: Node) -> bool:
    # A free reference is a write if it is the target of an assignment.
    from .ast_nodes import walk
    for node in walk(program):
        if node.type == "AssignmentExpression" and node.left is ident:
            return True
        if node.type == "UpdateExpression" and node.argument is ident:
            return True
        if node.type == "ForInStatement" and node.left is ident:
            return True
    return False


def _strip_delete_statements(stmt: Node) -> Optional[Node]:
    if (
        stmt.type == "ExpressionStatement"
        and stmt.expression.type == "UnaryExpression"
        and stmt.expression.operator == "delete"
        and stmt.expression.argument.type == "Identifier"
    ):
        return None
    if stmt.type == "BlockStatement":
        stmt.props["body"] = [
            s for s in (_strip_delete_statements(child) for child in stmt.body)
            if s is not None
        ]
    return stmt


# -- structural refine ----------------------------------------------------

def refine_structure(program: Node, scopes: ScopeTable) -> Node:
    """Merge redeclarations: later `var a = v` becomes `a = v`."""
    program = clone(program)
    _refine_body(program, program.body)
    from .ast_nodes import walk
    for node in walk(program):
        if node.type in ("FunctionDeclaration", "FunctionExpression"):
            _refine_body(node.body, node.body.body)
        elif node.type == "BlockStatement":
            _refine_body(node, node.body)
    return program


def _refine_body(owner: Node, body: list[Node]) -> None:
    seen_vars: set[str] = set()
    seen_funcs: dict[str, int] = {}
    new_body: list[Node] = []
    for stmt in body:
        if stmt.type == "VariableDeclaration" and stmt.kind == "var":
            replacement: list[Node] = []
            keep_decls: list[Node] = []
            for decl in stmt.declarations:
                if decl.id.type != "Identifier":
                    keep_decls.append(decl)
                    continue
                name = decl.id.name
                if name in seen_vars and decl.init is not None:
                    replacement.append(expression_statement(
                        Node("AssignmentExpression", None, operator="=",
                             left=identifier(name), right=decl.init)
                    ))
                elif name in seen_vars:
                    continue  # bare redeclaration, drop
                else:
                    seen_vars.add(name)
                    keep_decls.append(decl)
            if keep_decls:
                stmt.props["declarations"] = keep_decls
                new_body.append(stmt)
            new_body.extend(replacement)
        elif stmt.type == "FunctionDeclaration":
            name = stmt.id.name
            if name in seen_funcs:
                # Later definition wins under hoisting; the earlier is dead.
                new_body[seen_funcs[name]] = Node("EmptyStatement", None)
            seen_funcs[name] = len(new_body)
            new_body.append(stmt)
        else:
            new_body.append(stmt)
    filtered = [s for s in new_body if s.type != "EmptyStatement" or s.span is not None]
    body[:] = filtered
    if owner.type in ("Program", "BlockStatement"):
        owner.props["body"] = filtered


# -- bundler unwrap -------------------------------------------------------

@dataclass
class UnwrapResult:
    program: Node
    bundled: bool
    note: Optional[str] = None


def unwrap_bundle(program: Node) -> UnwrapResult:
    """Extract module factory bodies from webpack/browserify bootstrap shapes.

    Shape: an IIFE whose argument is an array of factory functions or an
    object mapping ids to factory functions.
    """
    if len(program.body) != 1:
        return UnwrapResult(program, False, "not-bundled")
    stmt = program.body[0]
    if stmt.type != "ExpressionStatement":
        return UnwrapResult(program, False, "not-bundled")
    call = stmt.expression
    if call.type != "CallExpression" or call.callee.type != "FunctionExpression":
        return UnwrapResult(program, False, "not-bundled")
    if len(call.arguments) != 1:
        return UnwrapResult(program, False, "not-bundled")
    arg = call.arguments[0]
    factories: list[Node] = []
    if arg.type == "ArrayExpression":
        candidates = [el for el in arg.elements if el is not None]
    elif arg.type == "ObjectExpression":
        values = [prop.value for prop in arg.properties]
        # Browserify wraps each entry as [factory, depsMap].
        candidates = [
            v.elements[0] if v.type == "ArrayExpression" and v.elements
            and v.elements[0] is not None else v
            for v in values
        ]
    else:
        return UnwrapResult(program, False, "not-bundled")
    if not candidates:
        return UnwrapResult(program, False, "not-bundled")
    for cand in candidates:
        if cand.type != "FunctionExpression":
            return UnwrapResult(program, True, "malformed bundle: non-function factory")
        factories.append(cand)
    body: list[Node] = []
    for factory in factories:
        body.extend(clone(s) for s in factory.body.body)
    return UnwrapResult(Node("Program", None, body=body), True)


# -- driver ---------------------------------------------------------------

@dataclass
class PreprocessResult:
    program: Node
    scopes: ScopeTable
    source: SourceText
    escape_report: EscapeRepairReport
    bundled: bool = False


def preprocess(text: str) -> list[PreprocessResult]:
    """Full normalization of one document (HTML or plain JS)."""
    results = []
    for src in extract_scripts(text):
        repaired, escape_report = sanitize_escapes(src.content)
        repaired, cc_notes = rewrite_conditional_compilation(repaired)
        src.diagnostics.extend(cc_notes)
        program, diags = parse(repaired, "tolerant")
        src.diagnostics.extend(
            RecoveryNote(d.offset, d.message, "parse") for d in diags
        )
        scopes = build_scopes(program)
        program = compatibilize(program, scopes)
        scopes = build_scopes(program)
        program = refine_structure(program, scopes)
        unwrapped = unwrap_bundle(program)
        program = unwrapped.program
        scopes = build_scopes(program)
        src.content = repaired
        results.append(PreprocessResult(program, scopes, src, escape_report, unwrapped.bundled))
    return results
