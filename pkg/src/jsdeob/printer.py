"""Deterministic code generation from the AST.

The printer is the inverse of the parser up to formatting: printing a tree
and reparsing it yields a structurally equal tree.  Opaque and recovered
statements reprint their captured raw text verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ast_nodes import Node

# Expression precedence, looser binds lower.  Used to decide parentheses.
_PREC_SEQUENCE = 0
_PREC_ASSIGN = 1
_PREC_CONDITIONAL = 2
_PREC_UNARY = 14
_PREC_POSTFIX = 15
_PREC_NEW_NO_ARGS = 16
_PREC_CALL = 17
_PREC_PRIMARY = 18

_BINARY_PREC = {
    "||": 3, "&&": 4,
    "|": 5, "^": 6, "&": 7,
    "==": 8, "!=": 8, "===": 8, "!==": 8,
    "<": 9, ">": 9, "<=": 9, ">=": 9, "in": 9, "instanceof": 9,
    "<<": 10, ">>": 10, ">>>": 10,
    "+": 11, "-": 11,
    "*": 12, "/": 12, "%": 12,
    "**": 13,
}


@dataclass
class FormatOptions:
    indent: str = "  "
    quote: str = '"'
    newline: str = "\n"


def print_number(value: float) -> str:
    """Shortest decimal form that round-trips as a JS number literal."""
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    if value == int(value) and abs(value) < 1e21:
        return str(int(value))
    text = repr(value)
    if text.startswith("0."):
        text = text[1:]
    return text


def print_string(value: str, quote: str = '"') -> str:
    out = [quote]
    for ch in value:
        if ch == quote:
            out.append("\\" + ch)
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\b":
            out.append("\\b")
        elif ch == "\f":
            out.append("\\f")
        elif ch == "\v":
            out.append("\\v")
        elif ch == "\0":
            out.append("\\0")
        elif ord(ch) < 0x20 or ch in "  ":
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append(quote)
    return "".join(out)


class Printer:
    def __init__(self, options: FormatOptions | None = None):
        self.options = options or FormatOptions()

    def print(self, node: Node) -> str:
        if node.type == "Program":
            return "".join(self._statement(stmt, 0) for stmt in node.body)
        if node.type in ("RecoveredStatement", "OpaqueStatement"):
            return node.raw
        if node.type in _STATEMENT_PRINTERS or node.type in (
            "FunctionDeclaration", "VariableDeclaration", "BlockStatement",
        ):
            return self._statement(node, 0).rstrip(self.options.newline)
        return self._expr(node, _PREC_SEQUENCE)

    # -- statements -------------------------------------------------------

    def _statement(self, node: Node, depth: int) -> str:
        pad = self.options.indent * depth
        nl = self.options.newline
        t = node.type
        if t == "ExpressionStatement":
            text = self._expr(node.expression, _PREC_SEQUENCE)
            # A leading '{' or 'function' would reparse as a block/declaration.
            if text.startswith(("{", "function")):
                text = f"({text})"
            return f"{pad}{text};{nl}"
        if t == "VariableDeclaration":
            return f"{pad}{self._var_decl(node)};{nl}"
        if t == "FunctionDeclaration":
            return f"{pad}{self._function(node)}{nl}"
        if t == "BlockStatement":
            return f"{pad}{self._block(node, depth)}{nl}"
        if t == "IfStatement":
            text = f"{pad}if ({self._expr(node.test, _PREC_SEQUENCE)}) "
            text += self._nested(node.consequent, depth)
            if node.alternate is not None:
                text = text.rstrip(nl)
                alt = node.alternate
                if alt.type == "IfStatement":
                    text += f" else {self._statement(alt, depth).lstrip()}"
                else:
                    text += f" else {self._nested(alt, depth).lstrip()}"
            return text
        if t == "WhileStatement":
            return f"{pad}while ({self._expr(node.test, _PREC_SEQUENCE)}) " + self._nested(node.body, depth)
        if t == "DoWhileStatement":
            body = self._nested(node.body, depth).rstrip(nl)
            return f"{pad}do {body.lstrip() if body.startswith(pad) else body} while ({self._expr(node.test, _PREC_SEQUENCE)});{nl}"
        if t == "ForStatement":
            init = ""
            if node.init is not None:
                if node.init.type == "VariableDeclaration":
                    init = self._var_decl(node.init, no_in=True)
                elif node.init.type == "ExpressionStatement":
                    init = self._for_init_expr(node.init.expression)
                else:
                    init = self._for_init_expr(node.init)
            test = self._expr(node.test, _PREC_SEQUENCE) if node.test is not None else ""
            update = self._expr(node.update, _PREC_SEQUENCE) if node.update is not None else ""
            return f"{pad}for ({init}; {test}; {update}) " + self._nested(node.body, depth)
        if t == "ForInStatement":
            left = node.left
            if left.type == "VariableDeclaration":
                left_text = self._var_decl(left)
            else:
                left_text = self._expr(left, _PREC_ASSIGN)
            return (
                f"{pad}for ({left_text} in {self._expr(node.right, _PREC_ASSIGN)}) "
                + self._nested(node.body, depth)
            )
        if t == "SwitchStatement":
            lines = [f"{pad}switch ({self._expr(node.discriminant, _PREC_SEQUENCE)}) {{"]
            inner = self.options.indent * (depth + 1)
            for case in node.cases:
                if case.test is not None:
                    lines.append(f"{inner}case {self._expr(case.test, _PREC_SEQUENCE)}:")
                else:
                    lines.append(f"{inner}default:")
                for stmt in case.consequent:
                    lines.append(self._statement(stmt, depth + 2).rstrip(nl))
            lines.append(f"{pad}}}")
            return nl.join(lines) + nl
        if t == "ReturnStatement":
            if node.argument is not None:
                return f"{pad}return {self._expr(node.argument, _PREC_SEQUENCE)};{nl}"
            return f"{pad}return;{nl}"
        if t == "BreakStatement":
            label = node.get("label")
            return f"{pad}break {label};{nl}" if label else f"{pad}break;{nl}"
        if t == "ContinueStatement":
            label = node.get("label")
            return f"{pad}continue {label};{nl}" if label else f"{pad}continue;{nl}"
        if t == "LabeledStatement":
            return f"{pad}{node.label}: " + self._statement(node.body, depth).lstrip()
        if t == "TryStatement":
            text = f"{pad}try {self._block(node.block, depth)}"
            if node.handler is not None:
                handler = node.handler
                if handler.param is not None:
                    text += f" catch ({handler.param.name}) {self._block(handler.body, depth)}"
                else:
                    text += f" catch {self._block(handler.body, depth)}"
            if node.finalizer is not None:
                text += f" finally {self._block(node.finalizer, depth)}"
            return text + nl
        if t == "ThrowStatement":
            return f"{pad}throw {self._expr(node.argument, _PREC_SEQUENCE)};{nl}"
        if t == "EmptyStatement":
            return f"{pad};{nl}"
        if t in ("RecoveredStatement", "OpaqueStatement"):
            raw = _relexable(node.raw.strip())
            return f"{pad}{raw}{nl}"
        raise ValueError(f"cannot print statement of type {t}")

    def _nested(self, node: Node, depth: int) -> str:
        """Body of if/while/for: blocks stay inline, others go on a new line."""
        nl = self.options.newline
        if node.type == "BlockStatement":
            return self._block(node, depth) + nl
        if node.type == "EmptyStatement":
            return ";" + nl
        return nl + self._statement(node, depth + 1)

    def _block(self, node: Node, depth: int) -> str:
        nl = self.options.newline
        if not node.body:
            return "{}"
        inner = "".join(self._statement(stmt, depth + 1) for stmt in node.body)
        pad = self.options.indent * depth
        return "{" + nl + inner + pad + "}"

    def _var_decl(self, node: Node, no_in: bool = False) -> str:
        parts = []
        for decl in node.declarations:
            text = self._target(decl.id)
            if decl.init is not None:
                init = self._expr(decl.init, _PREC_ASSIGN)
                if no_in and _contains_in(decl.init):
                    init = f"({init})"
                text += f" = {init}"
            parts.append(text)
        return f"{node.kind} " + ", ".join(parts)

    def _for_init_expr(self, node: Node) -> str:
        text = self._expr(node, _PREC_SEQUENCE)
        if _contains_in(node):
            text = f"({text})"
        return text

    def _target(self, node: Node) -> str:
        if node.type == "Identifier":
            return node.name
        if node.type == "ArrayPattern":
            parts = ["" if el is None else self._target(el) for el in node.elements]
            return "[" + ", ".join(parts) + "]"
        return self._expr(node, _PREC_ASSIGN)

    def _function(self, node: Node, depth: int = 0) -> str:
        name = f" {node.id.name}" if node.id is not None else ""
        params = ", ".join(p.name for p in node.params)
        return f"function{name}({params}) {self._block(node.body, depth)}"

    # -- expressions ------------------------------------------------------

    def _expr(self, node: Node, min_prec: int) -> str:
        text, prec = self._expr_prec(node)
        if prec < min_prec:
            return f"({text})"
        return text

    def _expr_prec(self, node: Node) -> tuple[str, int]:
        t = node.type
        if t == "Identifier":
            return node.name, _PREC_PRIMARY
        if t == "Literal":
            return self._literal(node), _PREC_PRIMARY
        if t == "ThisExpression":
            return "this", _PREC_PRIMARY
        if t == "ArrayExpression":
            parts = []
            for el in node.elements:
                parts.append("" if el is None else self._expr(el, _PREC_ASSIGN))
            text = "[" + ", ".join(parts) + "]"
            if node.elements and node.elements[-1] is None:
                # Trailing hole needs an extra comma to survive reparsing.
                text = text[:-1] + ",]"
            return text, _PREC_PRIMARY
        if t == "ObjectExpression":
            parts = []
            for prop in node.properties:
                if prop.get("computed"):
                    key = f"[{self._expr(prop.key, _PREC_ASSIGN)}]"
                elif prop.key.type == "Identifier":
                    key = prop.key.name
                else:
                    key = self._literal(prop.key)
                parts.append(f"{key}: {self._expr(prop.value, _PREC_ASSIGN)}")
            return "{" + ", ".join(parts) + "}", _PREC_PRIMARY
        if t == "FunctionExpression":
            return self._function(node), _PREC_PRIMARY
        if t == "MemberExpression":
            obj = self._expr(node.object, _PREC_CALL)
            if node.object.type == "Literal" and node.object.raw_kind == "number":
                # 42.toString is a syntax error; parenthesize the number.
                obj = f"({obj})"
            if node.computed:
                return f"{obj}[{self._expr(node.property, _PREC_SEQUENCE)}]", _PREC_CALL
            return f"{obj}.{node.property.name}", _PREC_CALL
        if t == "CallExpression":
            callee = self._expr(node.callee, _PREC_CALL)
            args = ", ".join(self._expr(a, _PREC_ASSIGN) for a in node.arguments)
            return f"{callee}({args})", _PREC_CALL
        if t == "NewExpression":
            callee = self._expr(node.callee, _PREC_CALL)
            if "(" in callee and node.callee.type == "CallExpression":
                callee = f"({callee})"
            args = ", ".join(self._expr(a, _PREC_ASSIGN) for a in node.arguments)
            return f"new {callee}({args})", _PREC_CALL
        if t == "UnaryExpression":
            op = node.operator
            arg = self._expr(node.argument, _PREC_UNARY)
            sep = " " if op.isalpha() else ""
            if not sep and arg and arg[0] == op[0] and op in ("+", "-"):
                sep = " "  # avoid '--x' from -(-x)
            return f"{op}{sep}{arg}", _PREC_UNARY
        if t == "UpdateExpression":
            arg = self._expr(node.argument, _PREC_POSTFIX)
            if node.prefix:
                return f"{node.operator}{arg}", _PREC_UNARY
            return f"{arg}{node.operator}", _PREC_POSTFIX
        if t in ("BinaryExpression", "LogicalExpression"):
            op = node.operator
            prec = _BINARY_PREC[op]
            right_assoc = op == "**"
            left = self._expr(node.left, prec + 1 if right_assoc else prec)
            right = self._expr(node.right, prec if right_assoc else prec + 1)
            if node.left.type == "UnaryExpression" and right_assoc:
                left = f"({left})"
            return f"{left} {op} {right}", prec
        if t == "ConditionalExpression":
            test = self._expr(node.test, _PREC_CONDITIONAL + 1)
            cons = self._expr(node.consequent, _PREC_ASSIGN)
            alt = self._expr(node.alternate, _PREC_ASSIGN)
            return f"{test} ? {cons} : {alt}", _PREC_CONDITIONAL
        if t == "AssignmentExpression":
            left = self._target(node.left)
            right = self._expr(node.right, _PREC_ASSIGN)
            return f"{left} {node.operator} {right}", _PREC_ASSIGN
        if t == "SequenceExpression":
            parts = [self._expr(e, _PREC_ASSIGN) for e in node.expressions]
            return ", ".join(parts), _PREC_SEQUENCE
        raise ValueError(f"cannot print expression of type {t}")

    def _literal(self, node: Node) -> str:
        kind = node.raw_kind
        if kind == "string":
            return print_string(node.value, self.options.quote)
        if kind == "number":
            return print_number(node.value)
        if kind == "boolean":
            return "true" if node.value else "false"
        if kind == "null":
            return "null"
        if kind == "regexp":
            pattern, flags = node.regex
            return f"/{pattern}/{flags}"
        raise ValueError(f"unknown literal kind {kind!r}")


_STATEMENT_PRINTERS = frozenset(
    {
        "ExpressionStatement", "IfStatement", "SwitchStatement", "WhileStatement",
        "DoWhileStatement", "ForStatement", "ForInStatement", "ReturnStatement",
        "BreakStatement", "ContinueStatement", "LabeledStatement", "TryStatement",
        "ThrowStatement", "EmptyStatement", "RecoveredStatement", "OpaqueStatement",
    }
)


def _relexable(raw: str) -> str:
    """Make a recovered snippet safe to re-lex.

    Truncated inputs can leave an unterminated string, comment, or regex in
    the captured text; close it so the emitted output always tokenizes.
    Snippets that still fail are elided to a comment.
    """
    from .lexer import tokenize
    _, errors = tokenize(raw)
    if not errors:
        return raw
    for suffix in ('"', "'", "*/", "/", '"`', "'"):
        candidate = raw + suffix
        _, errs = tokenize(candidate)
        if not errs:
            return candidate
    return "/* unrecoverable source elided: " + raw.replace("*/", "* /") + " */"


def _contains_in(node: Node) -> bool:
    """Whether the subtree prints a bare 'in' operator.

    Over-approximation: parenthesizing when 'in' appears only inside already
    bracketed positions is harmless, so bracketing is not tracked.
    """
    if node.type == "BinaryExpression" and node.operator == "in":
        return True
    return any(_contains_in(child) for child in node.children())


def print_source(node: Node, options: FormatOptions | None = None) -> str:
    return Printer(options).print(node)
