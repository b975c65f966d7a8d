"""AST node model for the supported ECMAScript subset.

Nodes follow ESTree naming so the tree shapes are recognizable to anyone
who has worked with JS tooling.  Constructs outside the supported grammar
are kept as ``OpaqueStatement`` nodes holding raw source text; every pass
skips them.
"""

from __future__ import annotations

from typing import Any, Iterator, Optional

# Annotation names used by the pipeline.
MARK_CAN_TRANSFORM = "can-be-transformed"
MARK_FUNCTION_NEED = "function-need"
MARK_FOLDED = "folded"
MARK_DYNAMIC_ORIGIN = "dynamic-origin"

# Per-type child properties, in evaluation/print order.  A property value is
# a Node, a list of Node-or-None, or None.
CHILD_KEYS: dict[str, tuple[str, ...]] = {
    "Program": ("body",),
    "FunctionDeclaration": ("id", "params", "body"),
    "FunctionExpression": ("id", "params", "body"),
    "VariableDeclaration": ("declarations",),
    "VariableDeclarator": ("id", "init"),
    "Identifier": (),
    "Literal": (),
    "ThisExpression": (),
    "ArrayExpression": ("elements",),
    "ObjectExpression": ("properties",),
    "Property": ("key", "value"),
    "MemberExpression": ("object", "property"),
    "CallExpression": ("callee", "arguments"),
    "NewExpression": ("callee", "arguments"),
    "UnaryExpression": ("argument",),
    "UpdateExpression": ("argument",),
    "BinaryExpression": ("left", "right"),
    "LogicalExpression": ("left", "right"),
    "ConditionalExpression": ("test", "consequent", "alternate"),
    "AssignmentExpression": ("left", "right"),
    "ArrayPattern": ("elements",),
    "SequenceExpression": ("expressions",),
    "ExpressionStatement": ("expression",),
    "BlockStatement": ("body",),
    "IfStatement": ("test", "consequent", "alternate"),
    "SwitchStatement": ("discriminant", "cases"),
    "SwitchCase": ("test", "consequent"),
    "WhileStatement": ("test", "body"),
    "DoWhileStatement": ("body", "test"),
    "ForStatement": ("init", "test", "update", "body"),
    "ForInStatement": ("left", "right", "body"),
    "ReturnStatement": ("argument",),
    "BreakStatement": (),
    "ContinueStatement": (),
    "LabeledStatement": ("body",),
    "TryStatement": ("block", "handler", "finalizer"),
    "CatchClause": ("param", "body"),
    "ThrowStatement": ("argument",),
    "EmptyStatement": (),
    "RecoveredStatement": (),
    "OpaqueStatement": (),
}

# Non-child properties that carry meaning and take part in structural
# equality.  Everything else (spans, marks, diagnostics) is bookkeeping.
VALUE_KEYS: dict[str, tuple[str, ...]] = {
    "Identifier": ("name",),
    "Literal": ("value", "raw_kind", "regex"),
    "VariableDeclaration": ("kind",),
    "UnaryExpression": ("operator",),
    "UpdateExpression": ("operator", "prefix"),
    "BinaryExpression": ("operator",),
    "LogicalExpression": ("operator",),
    "AssignmentExpression": ("operator",),
    "MemberExpression": ("computed",),
    "Property": ("computed",),
    "BreakStatement": ("label",),
    "ContinueStatement": ("label",),
    "LabeledStatement": ("label",),
    "OpaqueStatement": ("raw",),
    "RecoveredStatement": ("raw",),
}

STATEMENT_TYPES = frozenset(
    {
        "FunctionDeclaration",
        "VariableDeclaration",
        "ExpressionStatement",
        "BlockStatement",
        "IfStatement",
        "SwitchStatement",
        "WhileStatement",
        "DoWhileStatement",
        "ForStatement",
        "ForInStatement",
        "ReturnStatement",
        "BreakStatement",
        "ContinueStatement",
        "LabeledStatement",
        "TryStatement",
        "ThrowStatement",
        "EmptyStatement",
        "RecoveredStatement",
        "OpaqueStatement",
    }
)


class Node:
    """A single AST node.

    ``span`` is ``(start, end)`` source offsets, or ``None`` for synthetic
    nodes produced by passes.  ``marks`` maps annotation names to optional
    payloads (see the MARK_* constants).
    """

    __slots__ = ("type", "span", "marks", "props")

    def __init__(self, type: str, span: Optional[tuple[int, int]] = None, **props: Any):
        if type not in CHILD_KEYS:
            raise ValueError(f"unknown node type: {type}")
        self.type = type
        self.span = span
        self.marks: dict[str, Any] = {}
        self.props = props

    def __getattr__(self, name: str) -> Any:
        try:
            return self.props[name]
        except KeyError:
            raise AttributeError(name) from None

    def get(self, name: str, default: Any = None) -> Any:
        return self.props.get(name, default)

    def child_items(self) -> Iterator[tuple[str, "Node"]]:
        for key in CHILD_KEYS[self.type]:
            value = self.props.get(key)
            if value is None:
                continue
            if isinstance(value, list):
                for item in value:
                    if item is not None:
                        yield key, item
            else:
                yield key, value

    def children(self) -> list["Node"]:
        return [child for _, child in self.child_items()]

    def mark(self, name: str, payload: Any = None) -> "Node":
        self.marks[name] = payload
        return self

    def is_synthetic(self) -> bool:
        return self.span is None

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.type == "Identifier":
            return f"Identifier({self.props['name']!r})"
        if self.type == "Literal":
            return f"Literal({self.props['value']!r})"
        return f"{self.type}({', '.join(CHILD_KEYS[self.type])})"


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(current.children()))


def structurally_equal(a: Optional[Node], b: Optional[Node]) -> bool:
    if a is None or b is None:
        return a is b
    if a.type != b.type:
        return False
    for key in VALUE_KEYS.get(a.type, ()):
        if a.props.get(key) != b.props.get(key):
            return False
    for key in CHILD_KEYS[a.type]:
        va, vb = a.props.get(key), b.props.get(key)
        if isinstance(va, list) or isinstance(vb, list):
            va = va or []
            vb = vb or []
            if len(va) != len(vb):
                return False
            for ia, ib in zip(va, vb):
                if not structurally_equal(ia, ib):
                    return False
        else:
            if not structurally_equal(va, vb):
                return False
    return True


def clone(node: Node) -> Node:
    """Deep copy preserving marks and spans."""
    props: dict[str, Any] = {}
    for key, value in node.props.items():
        if isinstance(value, Node):
            props[key] = clone(value)
        elif isinstance(value, list):
            props[key] = [clone(v) if isinstance(v, Node) else v for v in value]
        else:
            props[key] = value
    copy = Node(node.type, node.span, **props)
    copy.marks = dict(node.marks)
    return copy


def replace_child(parent: Node, old: Node, new: Node) -> bool:
    """Swap ``old`` for ``new`` in place.  Returns False if not found."""
    for key in CHILD_KEYS[parent.type]:
        value = parent.props.get(key)
        if value is old:
            parent.props[key] = new
            return True
        if isinstance(value, list):
            for i, item in enumerate(value):
                if item is old:
                    value[i] = new
                    return True
    return False


# Convenience constructors for synthetic nodes.

def identifier(name: str) -> Node:
    return Node("Identifier", name=name)


def literal(value: Any, raw_kind: Optional[str] = None) -> Node:
    """Literal node; raw_kind distinguishes string/number/boolean/null/regexp."""
    if raw_kind is None:
        if value is None:
            raw_kind = "null"
        elif isinstance(value, bool):
            raw_kind = "boolean"
        elif isinstance(value, (int, float)):
            raw_kind = "number"
        elif isinstance(value, str):
            raw_kind = "string"
        else:
            raise TypeError(f"unsupported literal payload: {value!r}")
    if raw_kind == "number":
        value = float(value)
    return Node("Literal", value=value, raw_kind=raw_kind, regex=None)


def regex_literal(pattern: str, flags: str) -> Node:
    return Node("Literal", value=None, raw_kind="regexp", regex=(pattern, flags))


def expression_statement(expr: Node) -> Node:
    return Node("ExpressionStatement", expression=expr)


def is_statement(node: Node) -> bool:
    return node.type in STATEMENT_TYPES
