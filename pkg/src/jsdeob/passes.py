"""Static deobfuscation passes.

Each pass is a tree-to-tree function returning (tree, change_count).  All
passes skip opaque/recovered statements.  Expressions that cannot be
resolved statically but look resolvable at runtime receive the
can-be-transformed mark for the dynamic evaluator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .ast_nodes import (
    CHILD_KEYS,
    MARK_CAN_TRANSFORM,
    MARK_FOLDED,
    Node,
    clone,
    expression_statement,
    identifier,
    literal,
    regex_literal,
    walk,
)
from .interp.coerce import number_to_string
from .interp.interpreter import EvalBudget, Interpreter
from .interp.values import (
    NULL,
    UNDEFINED,
    JSArray,
    JSObject,
    JSRegExp,
    is_callable,
)
from .scopes import ScopeTable, build_scopes


@dataclass
class PassConfig:
    enabled: set[str] = field(default_factory=lambda: set(PASS_ORDER))
    max_iterations: int = 10
    excluded_globals: frozenset[str] = frozenset(
        {"window", "document", "navigator", "global", "process"}
    )


_NOT_CONST = object()

# Globals whose calls are pure and deterministic for static evaluation.
_PURE_GLOBAL_CALLS = frozenset(
    "atob btoa parseInt parseFloat String Number Boolean unescape escape "
    "isNaN isFinite decodeURIComponent encodeURIComponent".split()
)
_PURE_STRING_METHODS = frozenset(
    "split reverse join charAt charCodeAt slice substring substr toUpperCase "
    "toLowerCase concat indexOf lastIndexOf replace repeat trim toString "
    "valueOf fromCharCode match includes startsWith endsWith".split()
)
_PURE_MATH_METHODS = frozenset(
    "abs floor ceil round trunc sqrt sin cos tan log exp sign pow max min".split()
)


def _fresh_interp() -> Interpreter:
    return Interpreter(EvalBudget(max_steps=200_000, wall_clock_ms=500))


# -- generic rewriting -----------------------------------------------------

def map_children(node: Node, fn: Callable[[Node], Node]) -> None:
    """Replace each child with fn(child), in place."""
    for key in CHILD_KEYS[node.type]:
        value = node.props.get(key)
        if value is None:
            continue
        if isinstance(value, list):
            for i, item in enumerate(value):
                if item is not None:
                    value[i] = fn(item)
        else:
            node.props[key] = fn(value)


def rewrite_bottom_up(node: Node, fn: Callable[[Node], Optional[Node]]) -> Node:
    if node.type in ("OpaqueStatement", "RecoveredStatement"):
        return node

    def visit(child: Node) -> Node:
        return rewrite_bottom_up(child, fn)

    map_children(node, visit)
    replacement = fn(node)
    return replacement if replacement is not None else node


# -- value <-> node conversion --------------------------------------------

def value_to_node(value: Any) -> Optional[Node]:
    if value is UNDEFINED:
        return identifier("undefined")
    if value is NULL:
        return literal(None, "null")
    if isinstance(value, bool):
        return literal(value)
    if isinstance(value, float):
        if math.isnan(value):
            return identifier("NaN")
        if math.isinf(value):
            node = identifier("Infinity")
            if value < 0:
                return Node("UnaryExpression", None, operator="-", argument=node)
            return node
        if value < 0 or (value == 0 and math.copysign(1.0, value) < 0):
            return Node("UnaryExpression", None, operator="-", argument=literal(-value))
        return literal(value)
    if isinstance(value, str):
        return literal(value)
    if isinstance(value, JSRegExp):
        return regex_literal(value.pattern, value.flags)
    if isinstance(value, JSArray):
        elements = []
        for el in value.elements:
            node = value_to_node(el)
            if node is None:
                return None
            elements.append(node)
        return Node("ArrayExpression", None, elements=elements)
    if isinstance(value, JSObject) and not is_callable(value):
        props = []
        for key, val in value.props.items():
            vn = value_to_node(val)
            if vn is None:
                return None
            props.append(Node("Property", None, key=literal(key), value=vn, computed=False))
        return Node("ObjectExpression", None, properties=props)
    return None


def node_literal_value(node: Node) -> Any:
    """Literal payload of a node, or _NOT_CONST."""
    if node.type == "Literal":
        if node.raw_kind == "regexp":
            return _NOT_CONST
        if node.raw_kind == "null":
            return NULL
        return node.value
    if node.type == "Identifier":
        if node.name == "undefined":
            return UNDEFINED
        if node.name == "NaN":
            return float("nan")
        if node.name == "Infinity":
            return float("inf")
        return _NOT_CONST
    if node.type == "UnaryExpression" and node.operator == "-":
        inner = node_literal_value(node.argument)
        if isinstance(inner, float) and not isinstance(inner, bool):
            return -inner
        return _NOT_CONST
    return _NOT_CONST


def is_primitive_value(value: Any) -> bool:
    return value is UNDEFINED or value is NULL or isinstance(value, (bool, float, str))


# -- purity ----------------------------------------------------------------

def is_pure_expression(node: Node, allow_math_calls: bool = False) -> bool:
    """No observable side effects when evaluated (reads are allowed)."""
    t = node.type
    if t in ("Literal", "Identifier", "ThisExpression"):
        return True
    if t in ("BinaryExpression", "LogicalExpression"):
        return is_pure_expression(node.left, allow_math_calls) and is_pure_expression(node.right, allow_math_calls)
    if t == "UnaryExpression":
        if node.operator == "delete":
            return False
        return is_pure_expression(node.argument, allow_math_calls)
    if t == "ConditionalExpression":
        return all(is_pure_expression(x, allow_math_calls)
                   for x in (node.test, node.consequent, node.alternate))
    if t == "ArrayExpression":
        return all(el is None or is_pure_expression(el, allow_math_calls) for el in node.elements)
    if t == "ObjectExpression":
        return all(is_pure_expression(p.value, allow_math_calls) for p in node.properties)
    if t == "MemberExpression":
        if not is_pure_expression(node.object, allow_math_calls):
            return False
        return not node.computed or is_pure_expression(node.property, allow_math_calls)
    if t == "SequenceExpression":
        return all(is_pure_expression(e, allow_math_calls) for e in node.expressions)
    if t == "FunctionExpression":
        return True  # creating a closure has no effect
    if t == "CallExpression" and allow_math_calls:
        callee = node.callee
        if (
            callee.type == "MemberExpression"
            and not callee.computed
            and callee.object.type == "Identifier"
            and callee.object.name == "Math"
        ):
            return all(is_pure_expression(a, allow_math_calls) for a in node.arguments)
        return False
    return False


# -- static evaluability ---------------------------------------------------

def _is_static_expr(node: Node) -> bool:
    """Expression evaluable by the sandbox with no free state.

    Conservative whitelist over literals, pure operators, and deterministic
    builtin calls; dynamic-code sinks are never included.
    """
    t = node.type
    if t == "Literal":
        return True
    if t == "Identifier":
        return node.name in ("undefined", "NaN", "Infinity")
    if t in ("BinaryExpression", "LogicalExpression"):
        return _is_static_expr(node.left) and _is_static_expr(node.right)
    if t == "UnaryExpression":
        return node.operator != "delete" and _is_static_expr(node.argument)
    if t == "ConditionalExpression":
        return all(_is_static_expr(x) for x in (node.test, node.consequent, node.alternate))
    if t == "ArrayExpression":
        return all(el is None or _is_static_expr(el) for el in node.elements)
    if t == "ObjectExpression":
        return all(
            not p.get("computed") or _is_static_expr(p.key) for p in node.properties
        ) and all(_is_static_expr(p.value) for p in node.properties)
    if t == "SequenceExpression":
        return all(_is_static_expr(e) for e in node.expressions)
    if t == "MemberExpression":
        if node.object.type == "Identifier" and node.object.name in ("String", "Math"):
            if node.object.name == "Math" and not node.computed:
                return node.property.name in _PURE_MATH_METHODS or node.property.name in ("PI", "E")
            if node.object.name == "String" and not node.computed:
                return node.property.name == "fromCharCode"
            return False
        if not _is_static_expr(node.object):
            return False
        if node.computed:
            return _is_static_expr(node.property)
        return node.property.name in _PURE_STRING_METHODS or node.property.name == "length"
    if t == "CallExpression":
        callee = node.callee
        if callee.type == "Identifier":
            if callee.name not in _PURE_GLOBAL_CALLS:
                return False
        elif callee.type == "MemberExpression":
            if not _is_static_expr(callee):
                return False
        else:
            return False
        return all(_is_static_expr(a) for a in node.arguments)
    return False


def static_eval(node: Node) -> Any:
    """Evaluate a static expression; _NOT_CONST on any failure."""
    interp = _fresh_interp()
    import time
    interp.deadline = time.monotonic() + 0.5
    try:
        return interp.eval_expression(node, interp.global_env)
    except Exception:
        return _NOT_CONST


# -- fold_constants --------------------------------------------------------

_FOLDABLE = frozenset({
    "BinaryExpression", "LogicalExpression", "UnaryExpression",
    "ConditionalExpression",
})


def fold_constants(program: Node, scopes: ScopeTable,
                   cfg: Optional[PassConfig] = None) -> tuple[Node, int]:
    cfg = cfg or PassConfig()
    changes = 0
    propagated = _single_assignment_literals(program, scopes)

    def fold(node: Node) -> Optional[Node]:
        nonlocal changes
        if node.type == "Identifier" and id(node) in propagated:
            changes += 1
            return clone(propagated[id(node)]).mark(MARK_FOLDED)
        if node.type not in _FOLDABLE:
            return None
        if node.type == "UnaryExpression" and node.operator in ("typeof", "delete"):
            if node.operator == "typeof" and _references_excluded(node.argument, cfg):
                return None
            if node.operator == "delete":
                return None
        if _references_excluded(node, cfg):
            return None
        if not _is_static_expr(node):
            return None
        if node.type == "UnaryExpression" and node.operator == "-" \
                and node.argument.type == "Literal" and node.argument.raw_kind == "number":
            return None  # canonical spelling of negative literals
        value = static_eval(node)
        if value is _NOT_CONST or not is_primitive_value(value):
            return None
        replacement = value_to_node(value)
        if replacement is None:
            return None
        if _same_spelling(node, replacement):
            return None
        changes += 1
        return replacement.mark(MARK_FOLDED)

    program = rewrite_bottom_up(program, fold)
    return program, changes


def _same_spelling(a: Node, b: Node) -> bool:
    from .ast_nodes import structurally_equal
    return structurally_equal(a, b)


def _references_excluded(node: Node, cfg: PassConfig) -> bool:
    return any(
        n.type == "Identifier" and n.name in cfg.excluded_globals
        for n in walk(node)
    )


def _single_assignment_literals(program: Node, scopes: ScopeTable) -> dict[int, Node]:
    """Map reference-identifier id -> literal node for const-like bindings."""
    out: dict[int, Node] = {}
    for binding in scopes.all_bindings():
        if binding.kind not in ("var", "let", "const"):
            continue
        if len(binding.declarations) != 1:
            continue
        decl_ident = binding.declarations[0]
        declarator = _find_declarator(program, decl_ident)
        if declarator is None or declarator.init is None:
            continue
        init = declarator.init
        if node_literal_value(init) is _NOT_CONST:
            continue
        if _is_reassigned(program, binding):
            continue
        decl_start = declarator.span[0] if declarator.span else None
        for ref in binding.references:
            # Hoisted reads before the initializer observe undefined, not
            # the literal; only propagate into later references.
            if decl_start is not None and ref.span and ref.span[0] < decl_start:
                continue
            out[id(ref)] = init
    return out


def _find_declarator(program: Node, ident: Node) -> Optional[Node]:
    for node in walk(program):
        if node.type == "VariableDeclarator" and node.id is ident:
            return node
    return None


def _is_reassigned(program: Node, binding) -> bool:
    refs = set(id(r) for r in binding.references)
    for node in walk(program):
        if node.type == "AssignmentExpression" and node.left.type == "Identifier":
            if id(node.left) in refs:
                return True
        if node.type == "UpdateExpression" and node.argument.type == "Identifier":
            if id(node.argument) in refs:
                return True
        if node.type == "ForInStatement" and node.left.type == "Identifier":
            if id(node.left) in refs:
                return True
        if node.type == "ArrayPattern":
            for el in node.elements:
                if el is not None and id(el) in refs:
                    return True
    return False


# -- resolve_string_constructions -----------------------------------------

def resolve_string_constructions(program: Node, scopes: ScopeTable) -> tuple[Node, int]:
    """Replace pure string-building call chains with their literal results."""
    changes = 0

    def resolve(node: Node) -> Optional[Node]:
        nonlocal changes
        if node.type not in ("CallExpression", "MemberExpression"):
            return None
        if node.type == "MemberExpression":
            # Constant computed indexing only: "a|b".split("|")[1],
            # (![]+[])[+!![]].  Plain member reads stay put.
            if not node.computed:
                return None
        if not _is_static_expr(node):
            return None
        value = static_eval(node)
        if value is _NOT_CONST or not is_primitive_value(value):
            return None
        replacement = value_to_node(value)
        if replacement is None:
            return None
        changes += 1
        return replacement.mark(MARK_FOLDED)

    program = rewrite_bottom_up(program, resolve)
    return program, changes


# -- normalize_member_access ----------------------------------------------

def _is_identifier_name(text: str) -> bool:
    if not text:
        return False
    first = text[0]
    if not (first.isalpha() or first in "$_"):
        return False
    return all(ch.isalnum() or ch in "$_" for ch in text[1:]) and text not in _RESERVED


_RESERVED = frozenset(
    """var let const function return if else while do for break continue switch
    case default new delete typeof instanceof in void this null true false try
    catch finally throw class import export super yield async await with
    debugger""".split()
)


def normalize_member_access(program: Node) -> tuple[Node, int]:
    changes = 0
    global_names = {
        b.name for b in build_scopes(program).root.bindings.values()
    }

    def normalize(node: Node) -> Optional[Node]:
        nonlocal changes
        if node.type != "MemberExpression" or not node.computed:
            return None
        prop = node.property
        if prop.type != "Literal" or prop.raw_kind != "string":
            return None
        if not _is_identifier_name(prop.value):
            return None
        changes += 1
        result = Node("MemberExpression", node.span, object=node.object,
                      property=identifier(prop.value), computed=False)
        return _strip_window_alias(result, global_names) or result

    def normalize_plain(node: Node) -> Optional[Node]:
        nonlocal changes
        if node.type != "MemberExpression" or node.computed:
            return None
        stripped = _strip_window_alias(node, global_names)
        if stripped is not None:
            changes += 1
        return stripped

    def both(node: Node) -> Optional[Node]:
        return normalize(node) or normalize_plain(node)

    program = rewrite_bottom_up(program, both)
    return program, changes


def _strip_window_alias(node: Node, global_names: set[str]) -> Optional[Node]:
    """window.f -> f when f is a declared top-level binding."""
    if (
        node.type == "MemberExpression"
        and not node.computed
        and node.object.type == "Identifier"
        and node.object.name in ("window", "globalThis")
        and node.property.name in global_names
    ):
        return identifier(node.property.name)
    return None


# -- resolve_string_tables -------------------------------------------------

def resolve_string_tables(program: Node, scopes: ScopeTable) -> tuple[Node, int]:
    """Inline literal-array indexing, pure decoders, JSON.parse, new RegExp."""
    changes = 0
    scopes = build_scopes(program)
    tables = _collect_literal_tables(program, scopes)
    decoders = _collect_pure_decoders(program, scopes)

    def resolve(node: Node) -> Optional[Node]:
        nonlocal changes
        t = node.type
        if t == "MemberExpression" and node.computed:
            if node.object.type == "Identifier" and node.object.name in tables:
                idx = node_literal_value(node.property)
                if isinstance(idx, float) and idx == int(idx):
                    elements = tables[node.object.name]
                    i = int(idx)
                    if 0 <= i < len(elements) and elements[i] is not None:
                        changes += 1
                        return clone(elements[i]).mark(MARK_FOLDED)
            return None
        if t == "NewExpression":
            if (
                node.callee.type == "Identifier"
                and node.callee.name == "RegExp"
                and node.arguments
                and all(a.type == "Literal" and a.raw_kind == "string" for a in node.arguments)
            ):
                pattern = node.arguments[0].value
                flags = node.arguments[1].value if len(node.arguments) > 1 else ""
                changes += 1
                return regex_literal(pattern, flags).mark(MARK_FOLDED)
            return None
        if t != "CallExpression":
            return None
        callee = node.callee
        if (
            callee.type == "MemberExpression"
            and not callee.computed
            and callee.object.type == "Identifier"
            and callee.object.name == "JSON"
            and callee.property.name == "parse"
            and len(node.arguments) == 1
            and node.arguments[0].type == "Literal"
            and node.arguments[0].raw_kind == "string"
        ):
            import json
            try:
                data = json.loads(node.arguments[0].value)
            except ValueError:
                return None
            replacement = _json_to_node(data)
            if replacement is not None:
                changes += 1
                return replacement.mark(MARK_FOLDED)
            return None
        if callee.type == "Identifier" and callee.name in decoders:
            args = [node_literal_value(a) for a in node.arguments]
            if any(a is _NOT_CONST for a in args):
                return None
            value = _call_decoder(decoders[callee.name], node.arguments)
            if value is _NOT_CONST or not is_primitive_value(value):
                node.mark(MARK_CAN_TRANSFORM)
                return None
            replacement = value_to_node(value)
            if replacement is None:
                return None
            changes += 1
            return replacement.mark(MARK_FOLDED)
        return None

    program = rewrite_bottom_up(program, resolve)
    if changes:
        program, removed = _drop_unreferenced_helpers(
            program, set(tables) | set(decoders)
        )
        changes += removed
    return program, changes


def _json_to_node(data: Any) -> Optional[Node]:
    if data is None:
        return literal(None, "null")
    if isinstance(data, bool):
        return literal(data)
    if isinstance(data, (int, float)):
        value = float(data)
        if value < 0:
            return Node("UnaryExpression", None, operator="-", argument=literal(-value))
        return literal(value)
    if isinstance(data, str):
        return literal(data)
    if isinstance(data, list):
        items = [_json_to_node(x) for x in data]
        if any(i is None for i in items):
            return None
        return Node("ArrayExpression", None, elements=items)
    if isinstance(data, dict):
        props = []
        for key, val in data.items():
            vn = _json_to_node(val)
            if vn is None:
                return None
            key_node = identifier(key) if _is_identifier_name(key) else literal(key)
            props.append(Node("Property", None, key=key_node, value=vn, computed=False))
        return Node("ObjectExpression", None, properties=props)
    return None


def _collect_literal_tables(program: Node, scopes: ScopeTable) -> dict[str, list[Optional[Node]]]:
    tables: dict[str, list[Optional[Node]]] = {}
    for binding in scopes.all_bindings():
        if binding.kind not in ("var", "let", "const") or len(binding.declarations) != 1:
            continue
        declarator = _find_declarator(program, binding.declarations[0])
        if declarator is None or declarator.init is None:
            continue
        init = declarator.init
        if init.type != "ArrayExpression":
            continue
        if not all(
            el is not None and el.type == "Literal" and el.raw_kind == "string"
            for el in init.elements
        ):
            continue
        if _table_is_mutated(program, binding):
            continue
        tables[binding.name] = list(init.elements)
    return tables


def _table_is_mutated(program: Node, binding) -> bool:
    refs = {id(r) for r in binding.references}
    for node in walk(program):
        if node.type == "AssignmentExpression":
            target = node.left
            if target.type == "Identifier" and id(target) in refs:
                return True
            if (
                target.type == "MemberExpression"
                and target.object.type == "Identifier"
                and id(target.object) in refs
            ):
                return True
        if (
            node.type == "CallExpression"
            and node.callee.type == "MemberExpression"
            and node.callee.object.type == "Identifier"
            and id(node.callee.object) in refs
        ):
            name = (
                node.callee.property.name
                if not node.callee.computed and node.callee.property.type == "Identifier"
                else node.callee.property.get("value")
            )
            if name in ("push", "pop", "shift", "unshift", "splice", "reverse", "sort"):
                return True
    return False


def _collect_pure_decoders(program: Node, scopes: ScopeTable) -> dict[str, Node]:
    """Locally declared functions whose bodies are statically evaluable."""
    decoders: dict[str, Node] = {}
    for name, fn in _all_named_functions(program):
        if _decoder_is_pure(fn, scopes):
            decoders[name] = fn
    return decoders


def _all_named_functions(program: Node):
    """(name, function node) for declarations and var-bound expressions."""
    for node in walk(program):
        if node.type == "FunctionDeclaration":
            yield node.id.name, node
        elif (
            node.type == "VariableDeclarator"
            and node.id.type == "Identifier"
            and node.init is not None
            and node.init.type == "FunctionExpression"
        ):
            yield node.id.name, node.init


def _decoder_is_pure(fn: Node, scopes: ScopeTable) -> bool:
    param_names = {p.name for p in fn.params}
    local_names = set(param_names)
    for node in walk(fn.body):
        if node.type == "VariableDeclarator":
            for n in walk(node.id):
                if n.type == "Identifier":
                    local_names.add(n.name)
        elif node.type == "FunctionDeclaration":
            local_names.add(node.id.name)
    for node in walk(fn.body):
        t = node.type
        if t in ("OpaqueStatement", "RecoveredStatement", "ThisExpression"):
            return False
        if t == "AssignmentExpression" and node.left.type == "Identifier":
            if node.left.name not in local_names:
                return False
        if t == "UpdateExpression" and node.argument.type == "Identifier":
            if node.argument.name not in local_names:
                return False
        if t == "CallExpression":
            callee = node.callee
            if callee.type == "Identifier":
                if callee.name not in _PURE_GLOBAL_CALLS and callee.name not in local_names:
                    return False
            elif callee.type == "MemberExpression":
                base = callee.object
                root = base
                while root.type == "MemberExpression" or root.type == "CallExpression":
                    root = root.object if root.type == "MemberExpression" else root.callee
                if root.type == "Identifier" and root.name in (
                    "console", "document", "window", "eval", "Function",
                ):
                    return False
            else:
                return False
        if t == "Identifier" and node.name in ("eval", "Function", "require", "process"):
            return False
    return True


def _call_decoder(fn_node: Node, arg_nodes: list[Node]) -> Any:
    interp = _fresh_interp()
    import time
    interp.deadline = time.monotonic() + 0.5
    try:
        from .interp.values import JSFunction
        id_node = fn_node.get("id")
        name = id_node.name if id_node is not None else ""
        fn = JSFunction([p.name for p in fn_node.params], fn_node.body,
                        interp.global_env, name)
        if name:
            interp.global_env.vars[name] = fn  # self-recursion
        args = [interp.eval_expression(clone(a), interp.global_env) for a in arg_nodes]
        return interp.call_function(fn, UNDEFINED, args)
    except Exception:
        return _NOT_CONST


def _drop_unreferenced_helpers(program: Node, names: set[str]) -> tuple[Node, int]:
    """Remove table/decoder declarations whose bindings are no longer read."""
    scopes = build_scopes(program)
    removable: set[int] = set()
    removed = 0
    for binding in scopes.all_bindings():
        if binding.name not in names:
            continue
        if binding.references:
            continue
        for ident in binding.declarations:
            removable.add(id(ident))
    if not removable:
        return program, 0

    def prune(body: list[Node]) -> list[Node]:
        nonlocal removed
        out = []
        for stmt in body:
            if stmt.type == "FunctionDeclaration" and id(stmt.id) in removable:
                removed += 1
                continue
            if stmt.type == "VariableDeclaration":
                kept = [
                    d for d in stmt.declarations
                    if not (d.id.type == "Identifier" and id(d.id) in removable)
                ]
                if not kept:
                    removed += 1
                    continue
                if len(kept) != len(stmt.declarations):
                    removed += 1
                    stmt.props["declarations"] = kept
            out.append(stmt)
        return out

    for node in walk(program):
        if node.type in ("Program", "BlockStatement"):
            node.props["body"] = prune(node.body)
    return program, removed


# -- inline_trivial_functions ---------------------------------------------

def inline_trivial_functions(program: Node, scopes: ScopeTable) -> tuple[Node, int]:
    """Replace single-return IIFEs and single-use helpers by their bodies."""
    changes = 0
    scopes = build_scopes(program)
    single_use = _single_use_trivial_functions(program, scopes)

    def inline(node: Node) -> Optional[Node]:
        nonlocal changes
        if node.type != "CallExpression":
            return None
        callee = node.callee
        fn = None
        if callee.type == "FunctionExpression":
            fn = callee
        elif callee.type == "Identifier" and callee.name in single_use:
            fn = single_use[callee.name]
        if fn is None:
            return None
        body = [s for s in fn.body.body if s.type != "EmptyStatement"]
        if len(body) != 1 or body[0].type != "ReturnStatement" or body[0].argument is None:
            return None
        expr = body[0].argument
        if not is_pure_expression(expr):
            return None
        params = [p.name for p in fn.params]
        if len(node.arguments) > len(params):
            return None
        if not all(is_pure_expression(a) for a in node.arguments):
            return None
        substitution = {}
        for i, name in enumerate(params):
            substitution[name] = (
                clone(node.arguments[i]) if i < len(node.arguments) else identifier("undefined")
            )
        if not _substitution_is_safe(expr, substitution, params):
            return None
        changes += 1
        return _substitute(clone(expr), substitution)

    program = rewrite_bottom_up(program, inline)
    if changes:
        program, _ = _drop_unreferenced_helpers(program, set(single_use))
    return program, changes


def _single_use_trivial_functions(program: Node, scopes: ScopeTable) -> dict[str, Node]:
    out: dict[str, Node] = {}
    for binding in scopes.all_bindings():
        if binding.kind != "function" or len(binding.references) != 1:
            continue
        decl = None
        for node in walk(program):
            if node.type == "FunctionDeclaration" and node.id in binding.declarations:
                decl = node
                break
        if decl is None:
            continue
        body = [s for s in decl.body.body if s.type != "EmptyStatement"]
        if len(body) == 1 and body[0].type == "ReturnStatement":
            out[binding.name] = decl
    return out


def _substitution_is_safe(expr: Node, substitution: dict[str, Node], params: list[str]) -> bool:
    # Reject if the body references identifiers that could be shadowed by or
    # shadow the call site; only param names and globals may appear.
    for node in walk(expr):
        if node.type == "FunctionExpression":
            return False
    return True


def _substitute(node: Node, mapping: dict[str, Node]) -> Node:
    def swap(n: Node) -> Optional[Node]:
        if n.type == "Identifier" and n.name in mapping:
            return clone(mapping[n.name])
        return None
    return rewrite_bottom_up(node, swap)


# -- unflatten_control_flow -----------------------------------------------

def unflatten_control_flow(program: Node, scopes: ScopeTable) -> tuple[Node, int]:
    changes = 0

    def process_body(body: list[Node]) -> list[Node]:
        nonlocal changes
        out: list[Node] = []
        i = 0
        while i < len(body):
            match = _match_dispatcher(body, i)
            if match is not None:
                consumed, replacement = match
                out.extend(replacement)
                i += consumed
                changes += 1
                continue
            out.append(body[i])
            i += 1
        return out

    for node in walk(program):
        if node.type in ("Program", "BlockStatement"):
            node.props["body"] = process_body(node.body)
    return program, changes


def _match_dispatcher(body: list[Node], start: int) -> Optional[tuple[int, list[Node]]]:
    """Match: order-array decl (+ optional counter decl) + while/switch loop.

    Shape:
      var order = "1|0|…".split("|")[, i = 0];
      while (true) { switch (order[i++]) { case "0": …; continue; … } break; }
    """
    decl = body[start]
    if decl.type != "VariableDeclaration" or not decl.declarations:
        return None
    first = decl.declarations[0]
    order = _split_literal_order(first.init)
    if order is None or first.id.type != "Identifier":
        return None
    order_name = first.id.name
    counter_name = None
    consumed = 1
    rest = decl.declarations[1:]
    if rest:
        if (
            len(rest) == 1
            and rest[0].id.type == "Identifier"
            and rest[0].init is not None
            and node_literal_value(rest[0].init) == 0.0
        ):
            counter_name = rest[0].id.name
        else:
            return None
    loop_index = start + consumed
    if counter_name is None:
        if loop_index >= len(body):
            return None
        counter_decl = body[loop_index]
        if (
            counter_decl.type == "VariableDeclaration"
            and len(counter_decl.declarations) == 1
            and counter_decl.declarations[0].id.type == "Identifier"
            and counter_decl.declarations[0].init is not None
            and node_literal_value(counter_decl.declarations[0].init) == 0.0
        ):
            counter_name = counter_decl.declarations[0].id.name
            consumed += 1
            loop_index += 1
    if counter_name is None or loop_index >= len(body):
        return None
    loop = body[loop_index]
    if loop.type != "WhileStatement":
        return None
    test_value = node_literal_value(loop.test)
    if test_value is not True:
        if not (loop.test.type == "Literal" and loop.test.value is True):
            return None
    if loop.body.type != "BlockStatement":
        return None
    loop_body = [s for s in loop.body.body if s.type != "EmptyStatement"]
    if len(loop_body) != 2 or loop_body[0].type != "SwitchStatement":
        return None
    if loop_body[1].type != "BreakStatement" or loop_body[1].get("label"):
        return None
    switch = loop_body[0]
    disc = switch.discriminant
    # The discriminant may carry a ToNumber coercion: +order[i++].
    if disc.type == "UnaryExpression" and disc.operator == "+":
        disc = disc.argument
    if not (
        disc.type == "MemberExpression"
        and disc.computed
        and disc.object.type == "Identifier"
        and disc.object.name == order_name
        and disc.property.type == "UpdateExpression"
        and disc.property.operator == "++"
        and not disc.property.prefix
        and disc.property.argument.type == "Identifier"
        and disc.property.argument.name == counter_name
    ):
        return None
    case_map: dict[str, list[Node]] = {}
    for case in switch.cases:
        if case.test is None or case.test.type != "Literal":
            return None
        raw = case.test.value
        if isinstance(raw, str):
            key = raw
        elif isinstance(raw, float) and not isinstance(raw, bool):
            key = number_to_string(raw)
        else:
            key = None
        if key is None or key in case_map:
            return None  # duplicate or unsupported dispatch key
        stmts = list(case.consequent)
        if not stmts or stmts[-1].type != "ContinueStatement" or stmts[-1].get("label"):
            return None
        body_stmts = stmts[:-1]
        for s in body_stmts:
            if any(n.type in ("BreakStatement", "ContinueStatement") for n in walk(s)
                   if n.type in ("BreakStatement", "ContinueStatement")):
                # Control flow escaping the case body blocks linearization
                # unless it lives inside a nested loop/switch.
                if not _control_is_nested(s):
                    return None
        if _mutates_counter(body_stmts, counter_name):
            return None
        case_map[key] = body_stmts
    replacement: list[Node] = []
    for key in order:
        if key not in case_map:
            return None
        replacement.extend(clone(s) for s in case_map[key])
    return consumed + 1, replacement


def _control_is_nested(stmt: Node) -> bool:
    def check(node: Node, in_loop: bool) -> bool:
        t = node.type
        if t in ("BreakStatement", "ContinueStatement") and not in_loop:
            return False
        enters = t in ("WhileStatement", "DoWhileStatement", "ForStatement",
                       "ForInStatement", "SwitchStatement")
        for child in node.children():
            if not check(child, in_loop or enters):
                return False
        return True
    return check(stmt, False)


def _mutates_counter(stmts: list[Node], counter: str) -> bool:
    for stmt in stmts:
        for node in walk(stmt):
            if node.type == "AssignmentExpression" and node.left.type == "Identifier" \
                    and node.left.name == counter:
                return True
            if node.type == "UpdateExpression" and node.argument.type == "Identifier" \
                    and node.argument.name == counter:
                return True
    return False


def _split_literal_order(init: Optional[Node]) -> Optional[list[str]]:
    if init is None or init.type != "CallExpression":
        return None
    callee = init.callee
    if not (
        callee.type == "MemberExpression"
        and not callee.computed
        and callee.property.name == "split"
        and callee.object.type == "Literal"
        and callee.object.raw_kind == "string"
    ):
        return None
    if len(init.arguments) != 1 or init.arguments[0].type != "Literal":
        return None
    sep = init.arguments[0].value
    if not isinstance(sep, str) or not sep:
        return None
    return callee.object.value.split(sep)


# -- eliminate_dead_code ---------------------------------------------------

_TERMINATORS = frozenset({"ReturnStatement", "ThrowStatement", "BreakStatement", "ContinueStatement"})


def eliminate_dead_code(program: Node, scopes: ScopeTable) -> tuple[Node, int]:
    changes = 0
    scopes = build_scopes(program)
    unread = _unread_pure_declarations(program, scopes)

    def process_body(body: list[Node]) -> list[Node]:
        nonlocal changes
        out: list[Node] = []
        terminated = False
        for stmt in body:
            if terminated:
                # Hoisted function declarations survive only if referenced.
                if stmt.type == "FunctionDeclaration" and id(stmt) not in unread:
                    out.append(stmt)
                    continue
                changes += 1
                continue
            replacement = _simplify_if(stmt)
            if replacement is not stmt:
                changes += 1
                out.extend(replacement if isinstance(replacement, list) else [replacement])
                continue
            if stmt.type == "VariableDeclaration":
                stmt = _strip_unread_declarators(stmt, unread)
                if stmt is None:
                    changes += 1
                    continue
            if stmt.type == "FunctionDeclaration" and id(stmt) in unread:
                changes += 1
                continue
            out.append(stmt)
            if stmt.type in _TERMINATORS:
                terminated = True
        return out

    def _simplify_if(stmt: Node):
        """Collapse branches on literal tests; returns stmt when unchanged."""
        if stmt.type != "IfStatement":
            return stmt
        test = node_literal_value(stmt.test)
        if test is _NOT_CONST:
            return stmt
        from .interp.coerce import to_boolean
        taken = stmt.consequent if to_boolean(test) else stmt.alternate
        dropped = stmt.alternate if to_boolean(test) else stmt.consequent
        kept: list[Node] = []
        # var bindings hoist out of the untaken branch; keep bare
        # declarations so later reads still see undefined.
        if dropped is not None:
            hoisted = _hoisted_var_names(dropped)
            if hoisted:
                kept.append(Node(
                    "VariableDeclaration", None, kind="var",
                    declarations=[
                        Node("VariableDeclarator", None, id=identifier(n), init=None)
                        for n in hoisted
                    ],
                ))
        if taken is None:
            return kept
        if taken.type == "BlockStatement":
            kept.extend(taken.body)
        else:
            kept.append(taken)
        return kept

    for node in walk(program):
        if node.type in ("Program", "BlockStatement"):
            node.props["body"] = process_body(node.body)
    return program, changes


def _hoisted_var_names(stmt: Node) -> list[str]:
    names: list[str] = []
    for node in walk(stmt):
        if node.type == "FunctionExpression":
            continue
        if node.type == "VariableDeclaration" and node.kind == "var":
            for d in node.declarations:
                for n in walk(d.id):
                    if n.type == "Identifier" and n.name not in names:
                        names.append(n.name)
        elif node.type == "FunctionDeclaration" and node.id.name not in names:
            names.append(node.id.name)
    return names


def _unread_pure_declarations(program: Node, scopes: ScopeTable) -> set[int]:
    """ids of declaration statements/declarators safe to drop entirely."""
    out: set[int] = set()
    decl_idents: set[int] = set()
    # Names reachable through strings or property keys (window["f"],
    # decoder tables) must survive even with zero identifier references.
    protected: set[str] = set()
    for node in walk(program):
        if node.type == "Literal" and node.get("raw_kind") == "string":
            protected.add(node.value)
        elif node.type == "MemberExpression" and not node.computed:
            if node.property.type == "Identifier":
                protected.add(node.property.name)
    for binding in scopes.all_bindings():
        if binding.references or binding.name in protected:
            continue
        if binding.kind == "function":
            for node in walk(program):
                if node.type == "FunctionDeclaration" and node.id in binding.declarations:
                    out.add(id(node))
        elif binding.kind in ("var", "let", "const"):
            for ident in binding.declarations:
                decl_idents.add(id(ident))
    for node in walk(program):
        if node.type == "VariableDeclarator" and id(node.id) in decl_idents:
            if node.init is None or is_pure_expression(node.init, True) \
                    or _is_function_ctor_call(node.init):
                out.add(id(node))
    return out


def _is_function_ctor_call(node: Node) -> bool:
    """Function("…") with literal args: allocation only, safe to drop."""
    if node.type not in ("CallExpression", "NewExpression"):
        return False
    if node.callee.type != "Identifier" or node.callee.name != "Function":
        return False
    return all(a.type == "Literal" for a in node.arguments)


def _strip_unread_declarators(stmt: Node, unread: set[int]) -> Optional[Node]:
    kept = [d for d in stmt.declarations if id(d) not in unread]
    if not kept:
        return None
    if len(kept) != len(stmt.declarations):
        stmt.props["declarations"] = kept
    return stmt


# -- simplify_destructuring ------------------------------------------------

def simplify_destructuring(program: Node, scopes: ScopeTable) -> tuple[Node, int]:
    changes = 0
    temp_counter = [0]

    def process_body(body: list[Node]) -> list[Node]:
        nonlocal changes
        out: list[Node] = []
        for stmt in body:
            expansion = _expand_destructuring(stmt, temp_counter)
            if expansion is None:
                out.append(stmt)
            else:
                changes += 1
                out.extend(expansion)
        return out

    for node in walk(program):
        if node.type in ("Program", "BlockStatement"):
            node.props["body"] = process_body(node.body)
    return program, changes


def _expand_destructuring(stmt: Node, counter: list[int]) -> Optional[list[Node]]:
    if stmt.type != "ExpressionStatement":
        return None
    expr = stmt.expression
    if expr.type != "AssignmentExpression" or expr.operator != "=":
        return None
    if expr.left.type != "ArrayPattern" or expr.right.type != "ArrayExpression":
        return None
    targets = expr.left.elements
    sources = expr.right.elements
    if len(targets) > len(sources):
        return None
    pure = all(s is None or is_pure_expression(s) for s in sources)
    out: list[Node] = []
    values: list[Optional[Node]] = []
    if pure:
        values = [None if s is None else clone(s) for s in sources]
    else:
        for s in sources:
            if s is None:
                values.append(None)
                continue
            name = f"_t{counter[0]}"
            counter[0] += 1
            out.append(Node(
                "VariableDeclaration", None, kind="var",
                declarations=[Node("VariableDeclarator", None,
                                   id=identifier(name), init=clone(s))],
            ))
            values.append(identifier(name))
    for i, target in enumerate(targets):
        if target is None:
            if not pure and values[i] is not None:
                pass  # evaluation already happened via the temporary
            continue
        value = values[i] if i < len(values) and values[i] is not None else identifier("undefined")
        if target.type == "ArrayPattern":
            inner = Node("ExpressionStatement", None, expression=Node(
                "AssignmentExpression", None, operator="=",
                left=target, right=value if value.type == "ArrayExpression" else value,
            ))
            nested = _expand_destructuring(inner, counter)
            if nested is not None:
                out.extend(nested)
                continue
            out.append(inner)
            continue
        out.append(expression_statement(Node(
            "AssignmentExpression", None, operator="=", left=clone(target), right=value,
        )))
    return out


PASS_ORDER = (
    "normalize_member_access",
    "fold_constants",
    "resolve_string_constructions",
    "resolve_string_tables",
    "inline_trivial_functions",
    "simplify_destructuring",
    "unflatten_control_flow",
    "eliminate_dead_code",
)
