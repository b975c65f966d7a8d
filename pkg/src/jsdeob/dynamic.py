"""Dynamic evaluation handoff: resolving marked fragments and code sinks.

Static passes mark expressions they could not resolve with the
can-be-transformed annotation.  This module evaluates those fragments in
the sandbox with a dependency-closure preamble and folds the results back
into the tree.  It also probes statements that feed dynamic code sinks
(eval, Function, string timers, document.write) and splices the captured
code back in after recursive cleanup.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .ast_nodes import (
    MARK_CAN_TRANSFORM,
    MARK_DYNAMIC_ORIGIN,
    Node,
    clone,
    identifier,
    walk,
)
from .interp.interpreter import EvalBudget
from .interp.sandbox import EvalOutcome, SandboxEnv, evaluate
from .interp.values import UNDEFINED, JSArray, JSFunction, JSObject
from .parser import parse
from .passes import is_primitive_value, value_to_node

MAX_DYNAMIC_DEPTH = 5


@dataclass
class DynamicTrace:
    resolved: int = 0
    captured: int = 0
    failed: list[str] = field(default_factory=list)


def integrate_result(outcome: EvalOutcome, depth: int = 0) -> Optional[Node | list[Node]]:
    """Convert an evaluation outcome into replacement AST, or None."""
    if outcome.status == "captured":
        return _integrate_captured(outcome.value.source, depth)
    if outcome.status != "value":
        return None
    return _value_to_marked_node(outcome.value)


def _value_to_marked_node(value: Any) -> Optional[Node]:
    if isinstance(value, JSFunction):
        node = Node(
            "FunctionExpression", None,
            id=identifier(value.name) if value.name else None,
            params=[identifier(p) for p in value.params],
            body=clone(value.body),
        )
        return node.mark(MARK_DYNAMIC_ORIGIN)
    if is_primitive_value(value) or isinstance(value, (JSArray, JSObject)):
        node = value_to_node(value)
        if node is not None:
            node.mark(MARK_DYNAMIC_ORIGIN)
        return node
    return None


def _integrate_captured(source: str, depth: int) -> Optional[list[Node]]:
    if depth >= MAX_DYNAMIC_DEPTH:
        return None
    program, diagnostics = parse(source)
    if any(d.kind in ("recovery", "lexical") for d in diagnostics):
        return None
    from .pipeline import run_pipeline
    program, _ = run_pipeline(program, dynamic_depth=depth + 1)
    for stmt in program.body:
        stmt.mark(MARK_DYNAMIC_ORIGIN)
    return list(program.body)


def _dependency_preamble(program: Node, target: Node,
                         exclude: Optional[Node] = None) -> list[Node]:
    """Top-level statements the target needs: declarations of its free
    names, transitively, plus expression statements touching them (e.g. a
    table-rotation IIFE)."""
    needed = {n.name for n in walk(target) if n.type == "Identifier"}
    declared_by: dict[str, Node] = {}
    for stmt in program.body:
        if stmt is exclude:
            continue
        if stmt.type == "FunctionDeclaration":
            declared_by[stmt.id.name] = stmt
        elif stmt.type == "VariableDeclaration":
            for d in stmt.declarations:
                for n in walk(d.id):
                    if n.type == "Identifier":
                        declared_by[n.name] = stmt
    selected: set[int] = set()
    changed = True
    while changed:
        changed = False
        for name in list(needed):
            stmt = declared_by.get(name)
            if stmt is not None and id(stmt) not in selected:
                selected.add(id(stmt))
                for n in walk(stmt):
                    if n.type == "Identifier":
                        needed.add(n.name)
                changed = True
    covered = {name for name, stmt in declared_by.items() if id(stmt) in selected}
    out: list[Node] = []
    for stmt in program.body:
        if stmt is exclude or stmt is target:
            continue
        if id(stmt) in selected:
            out.append(stmt)
        elif stmt.type == "ExpressionStatement" and covered:
            if any(n.type == "Identifier" and n.name in covered for n in walk(stmt)):
                out.append(stmt)
    return out


def resolve_marked(program: Node, depth: int = 0,
                   budget: Optional[EvalBudget] = None,
                   stats: Optional[dict] = None) -> tuple[Node, int]:
    """Evaluate can-be-transformed expressions and fold their values in."""
    changes = 0
    trace = DynamicTrace()
    _mark_function_ctor_calls(program)
    parents: dict[int, Node] = {}
    marked: list[Node] = []
    for node in walk(program):
        for child in node.children():
            parents[id(child)] = node
        if MARK_CAN_TRANSFORM in node.marks:
            marked.append(node)
    for node in marked:
        del node.marks[MARK_CAN_TRANSFORM]
        top = _enclosing_top_level(program, node, parents)
        preamble = _dependency_preamble(program, node, exclude=top)
        outcome = evaluate(
            clone(node),
            SandboxEnv(preamble=[clone(s) for s in preamble]),
            budget,
        )
        if stats is not None:
            stats["steps"] = stats.get("steps", 0) + outcome.steps_used
        replacement = integrate_result(outcome, depth)
        if replacement is None or isinstance(replacement, list):
            trace.failed.append(outcome.reason or outcome.status)
            continue
        parent = parents.get(id(node))
        if parent is not None and _swap(parent, node, replacement):
            changes += 1
            trace.resolved += 1
    return program, changes


def _mark_function_ctor_calls(program: Node) -> None:
    """Mark calls through bindings built with the Function constructor."""
    ctor_bound: set[str] = set()
    for stmt in program.body:
        if stmt.type != "VariableDeclaration":
            continue
        for d in stmt.declarations:
            if (
                d.id.type == "Identifier"
                and d.init is not None
                and d.init.type in ("CallExpression", "NewExpression")
                and d.init.callee.type == "Identifier"
                and d.init.callee.name == "Function"
                and all(a.type == "Literal" for a in d.init.arguments)
            ):
                ctor_bound.add(d.id.name)
    if not ctor_bound:
        return
    for node in walk(program):
        if (
            node.type == "CallExpression"
            and node.callee.type == "Identifier"
            and node.callee.name in ctor_bound
            and all(a.type == "Literal" for a in node.arguments)
        ):
            node.mark(MARK_CAN_TRANSFORM)


def cleanup_dead_machinery(program: Node) -> tuple[Node, int]:
    """Drop decoder tables and their mutation-only IIFEs once unused.

    A top-level binding qualifies when every remaining reference sits
    inside self-contained IIFE statements that only touch that binding and
    their own locals (the array-rotation shuffle left behind after index
    resolution).
    """
    from .scopes import build_scopes
    scopes = build_scopes(program)
    removed = 0
    iife_stmts: list[Node] = []
    for stmt in program.body:
        if (
            stmt.type == "ExpressionStatement"
            and stmt.expression.type == "CallExpression"
            and stmt.expression.callee.type == "FunctionExpression"
        ):
            iife_stmts.append(stmt)
    doomed_stmts: set[int] = set()
    doomed_names: set[str] = set()
    for binding in scopes.all_bindings():
        if binding.scope.kind != "global" or binding.kind not in ("var", "let", "const"):
            continue
        refs = list(binding.references)
        if not refs:
            continue
        ref_homes = []
        for ref in refs:
            home = None
            for stmt in iife_stmts:
                if any(n is ref for n in walk(stmt)):
                    home = stmt
                    break
            if home is None:
                ref_homes = None
                break
            ref_homes.append(home)
        if not ref_homes:
            continue
        if all(_iife_is_self_contained(s, binding.name) for s in set(ref_homes)):
            for s in ref_homes:
                doomed_stmts.add(id(s))
            doomed_names.add(binding.name)
    chain_stmts, chain_names = _write_only_chains(program)
    doomed_stmts |= chain_stmts
    doomed_names |= chain_names
    if not doomed_stmts:
        return program, 0
    new_body = []
    for stmt in program.body:
        if id(stmt) in doomed_stmts:
            removed += 1
            continue
        if stmt.type == "VariableDeclaration":
            kept = [
                d for d in stmt.declarations
                if not (d.id.type == "Identifier" and d.id.name in doomed_names)
            ]
            if not kept:
                removed += 1
                continue
            stmt.props["declarations"] = kept
        new_body.append(stmt)
    program.props["body"] = new_body
    return program, removed


def _referencing_names(stmt: Node) -> set[str]:
    """Identifier names excluding member-property and object-key positions."""
    skip: set[int] = set()
    for node in walk(stmt):
        if node.type == "MemberExpression" and not node.computed:
            skip.add(id(node.property))
        elif node.type == "Property" and not node.get("computed"):
            if node.key.type == "Identifier":
                skip.add(id(node.key))
    return {
        n.name for n in walk(stmt)
        if n.type == "Identifier" and id(n) not in skip
    }


def _write_only_chains(program: Node) -> tuple[set[int], set[str]]:
    """Top-level bindings only ever built up and never consumed.

    A decoder bootstrap (JJEncode style) leaves chains of assignments like
    `x = ~[]; x = {...}; x.k = (x + "")[x.n];` behind once the payload
    statement is replaced.  A statement qualifies when it performs no
    calls and every identifier it touches belongs to the chain set; the
    chain set shrinks to a fixpoint, then all qualifying statements and
    declarations are dropped together.
    """
    from .scopes import build_scopes
    scopes = build_scopes(program)
    stmt_names: dict[int, set[str]] = {}
    stmt_pure: dict[int, bool] = {}
    for stmt in program.body:
        names = _referencing_names(stmt)
        stmt_names[id(stmt)] = names
        pure = stmt.type in ("ExpressionStatement", "VariableDeclaration") and not any(
            n.type in ("CallExpression", "NewExpression") for n in walk(stmt)
        )
        stmt_pure[id(stmt)] = pure
    ref_sites: dict[str, list[Node]] = {}
    candidates: set[str] = set()
    for binding in scopes.all_bindings():
        if binding.scope.kind != "global" or binding.kind not in ("var", "let", "const"):
            continue
        homes = []
        ok = True
        for ref in binding.references:
            home = None
            for stmt in program.body:
                if any(n is ref for n in walk(stmt)):
                    home = stmt
                    break
            if home is None or not stmt_pure[id(home)]:
                ok = False
                break
            homes.append(home)
        decl_home = None
        for stmt in program.body:
            if any(n is d for d in binding.declarations for n in walk(stmt)):
                decl_home = stmt
                break
        if decl_home is not None and not stmt_pure[id(decl_home)]:
            ok = False
        if ok:
            candidates.add(binding.name)
            ref_sites[binding.name] = homes + ([decl_home] if decl_home else [])
    changed = True
    while changed:
        changed = False
        for name in list(candidates):
            for stmt in ref_sites[name]:
                if not stmt_names[id(stmt)] <= candidates:
                    candidates.discard(name)
                    changed = True
                    break
    doomed_stmts: set[int] = set()
    for name in candidates:
        for stmt in ref_sites[name]:
            doomed_stmts.add(id(stmt))
    return doomed_stmts, candidates


def _iife_is_self_contained(stmt: Node, table_name: str) -> bool:
    call = stmt.expression
    fn = call.callee
    allowed = {table_name}
    allowed.update(p.name for p in fn.params)
    for node in walk(fn.body):
        if node.type == "VariableDeclarator":
            for n in walk(node.id):
                if n.type == "Identifier":
                    allowed.add(n.name)
        elif node.type in ("FunctionExpression", "FunctionDeclaration"):
            allowed.update(p.name for p in node.params)
            if node.get("id") is not None:
                allowed.add(node.id.name)
    for node in walk(stmt):
        if node.type == "Identifier" and node.name not in allowed:
            if node.name in ("push", "shift", "unshift", "pop", "splice",
                            "reverse", "sort", "length", "undefined"):
                continue
            return False
    return True


def _enclosing_top_level(program: Node, node: Node, parents: dict[int, Node]) -> Optional[Node]:
    current = node
    while True:
        parent = parents.get(id(current))
        if parent is None:
            return None
        if parent is program:
            return current
        current = parent


def _swap(parent: Node, old: Node, new: Node) -> bool:
    from .ast_nodes import replace_child
    return replace_child(parent, old, new)


_SINK_NAMES = ("eval", "Function", "setTimeout", "setInterval")

def _program_is_symbol_soup(program: Node) -> bool:
    """JJEncode/AAEncode-style bootstraps: identifiers and property keys
    made purely of $ and _ characters.  When enough appear, every
    statement becomes a capture-probe candidate."""
    import re
    soup = 0
    for node in walk(program):
        if node.type == "Identifier" and re.fullmatch(r"[$_]+", node.name):
            soup += 1
    return soup >= 8


def _statement_is_sink_candidate(stmt: Node) -> bool:
    for node in walk(stmt):
        if node.type == "Identifier" and node.name in _SINK_NAMES:
            return True
        if node.type == "Literal" and node.get("raw_kind") == "string":
            if node.value == "constructor":
                return True
        if (
            node.type == "MemberExpression"
            and not node.computed
            and node.property.type == "Identifier"
            and node.property.name == "constructor"
        ):
            return True
        if (
            node.type == "CallExpression"
            and node.callee.type == "MemberExpression"
            and node.callee.object.type == "Identifier"
            and node.callee.object.name == "document"
        ):
            return True
    return False


def resolve_sinks(program: Node, depth: int = 0,
                  budget: Optional[EvalBudget] = None,
                  stats: Optional[dict] = None) -> tuple[Node, int]:
    """Replace statements that feed dynamic code sinks with the code they
    generate.

    Each candidate statement is evaluated with every preceding top-level
    statement as its preamble; a capture means the statement's only effect
    was handing source text to eval/Function/a string timer, so the
    captured code (recursively cleaned) takes its place.
    """
    changes = 0
    body = program.body
    # Names declared by statements that touch dynamic-code machinery taint
    # the statements that use them (e.g. `var f = x.constructor; f(src)()`).
    tainted: set[str] = set()
    for stmt in body:
        if stmt.type == "VariableDeclaration" and _statement_is_sink_candidate(stmt):
            for d in stmt.declarations:
                if d.id.type == "Identifier":
                    tainted.add(d.id.name)

    suspect = _program_is_symbol_soup(program)

    def is_candidate(stmt: Node) -> bool:
        if suspect or _statement_is_sink_candidate(stmt):
            return True
        return any(
            n.type == "Identifier" and n.name in tainted for n in walk(stmt)
        )

    new_body: list[Node] = []
    replaced = False
    for i, stmt in enumerate(body):
        if replaced or not is_candidate(stmt):
            new_body.append(stmt)
            continue
        preamble = [clone(s) for s in body[:i]]
        outcome = evaluate(clone(stmt), SandboxEnv(preamble=preamble), budget)
        if stats is not None:
            stats["steps"] = stats.get("steps", 0) + outcome.steps_used
        if outcome.status != "captured":
            new_body.append(stmt)
            continue
        replacement = _integrate_captured(outcome.value.source, depth)
        if replacement is None:
            new_body.append(stmt)
            continue
        new_body.extend(replacement)
        changes += 1
        # One sink per round: later statements may depend on the rewrite.
        replaced = True
    program.props["body"] = new_body
    return program, changes
