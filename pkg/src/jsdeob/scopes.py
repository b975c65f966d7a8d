"""Scope analysis: binding resolution, hoisting, and rename support.

``var`` and function declarations hoist to the nearest function (or global)
scope; ``let``/``const`` bind in the nearest block scope; catch parameters
get their own scope.  Identifiers that resolve to no binding are free and
treated as globals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .ast_nodes import Node


@dataclass
class Binding:
    name: str
    kind: str  # var | let | const | function | param | catch
    scope: "Scope"
    declarations: list[Node] = field(default_factory=list)
    references: list[Node] = field(default_factory=list)

    def all_identifiers(self) -> list[Node]:
        return self.declarations + self.references


@dataclass
class Scope:
    kind: str  # global | function | block | catch
    node: Optional[Node]
    parent: Optional["Scope"] = None
    children: list["Scope"] = field(default_factory=list)
    bindings: dict[str, Binding] = field(default_factory=dict)

    def declare(self, name: str, kind: str, ident: Optional[Node]) -> Binding:
        binding = self.bindings.get(name)
        if binding is None:
            binding = Binding(name, kind, self)
            self.bindings[name] = binding
        if ident is not None:
            binding.declarations.append(ident)
        return binding

    def resolve(self, name: str) -> Optional[Binding]:
        scope: Optional[Scope] = self
        while scope is not None:
            binding = scope.bindings.get(name)
            if binding is not None:
                return binding
            scope = scope.parent
        return None

    def function_scope(self) -> "Scope":
        scope = self
        while scope.kind not in ("function", "global"):
            assert scope.parent is not None
            scope = scope.parent
        return scope

    def iter_scopes(self) -> Iterator["Scope"]:
        yield self
        for child in self.children:
            yield from child.iter_scopes()

    def visible_names(self) -> set[str]:
        names: set[str] = set()
        scope: Optional[Scope] = self
        while scope is not None:
            names.update(scope.bindings)
            scope = scope.parent
        return names


@dataclass
class ScopeTable:
    root: Scope
    free: dict[str, list[Node]] = field(default_factory=dict)
    scope_by_node: dict[int, Scope] = field(default_factory=dict)
    binding_by_ident: dict[int, Binding] = field(default_factory=dict)

    def scope_of(self, node: Node) -> Optional[Scope]:
        return self.scope_by_node.get(id(node))

    def binding_of(self, ident: Node) -> Optional[Binding]:
        return self.binding_by_ident.get(id(ident))

    def free_names(self) -> set[str]:
        return set(self.free)

    def all_bindings(self) -> Iterator[Binding]:
        for scope in self.root.iter_scopes():
            yield from scope.bindings.values()

    def rename(self, binding: Binding, new_name: str) -> None:
        """Apply a rename to every declaration and reference identifier."""
        old = binding.name
        del binding.scope.bindings[old]
        binding.name = new_name
        binding.scope.bindings[new_name] = binding
        for ident in binding.all_identifiers():
            ident.props["name"] = new_name

    def is_safe_rename(self, binding: Binding, new_name: str) -> bool:
        """Reject renames that would collide or capture/shadow differently.

        Conservative: the new name must not be visible at the declaring
        scope, must not be declared in any descendant scope that contains a
        reference, and must not be a free name used under the declaring
        scope.
        """
        if new_name == binding.name:
            return True
        if new_name in binding.scope.visible_names():
            return False
        for ident in binding.references:
            use_scope = self._nearest_scope(ident)
            scope: Optional[Scope] = use_scope
            while scope is not None and scope is not binding.scope:
                if new_name in scope.bindings:
                    return False
                scope = scope.parent
        if new_name in self.free:
            for ident in self.free[new_name]:
                if self._under(self._nearest_scope(ident), binding.scope):
                    return False
        return True

    def _nearest_scope(self, ident: Node) -> Scope:
        binding = self.binding_by_ident.get(id(ident))
        if binding is not None and ident in binding.declarations:
            return binding.scope
        return self._ref_scope.get(id(ident), self.root)

    @staticmethod
    def _under(scope: Optional[Scope], ancestor: Scope) -> bool:
        while scope is not None:
            if scope is ancestor:
                return True
            scope = scope.parent
        return False

    _ref_scope: dict[int, Scope] = field(default_factory=dict)


class _Builder:
    def __init__(self):
        self.table: Optional[ScopeTable] = None
        self.free_refs: dict[str, list[Node]] = {}
        self.ref_scope: dict[int, Scope] = {}

    def build(self, program: Node) -> ScopeTable:
        root = Scope("global", program)
        self.table = ScopeTable(root)
        self.table.scope_by_node[id(program)] = root
        self._hoist(program.body, root)
        for stmt in program.body:
            self._visit_statement(stmt, root)
        self._resolve_free()
        self.table.free = self.free_refs
        self.table._ref_scope = self.ref_scope
        return self.table

    # -- hoisting ---------------------------------------------------------

    def _hoist(self, statements: list[Node], scope: Scope) -> None:
        """Declare var/function names before evaluating any statement."""
        for stmt in statements:
            self._hoist_statement(stmt, scope)

    def _hoist_statement(self, node: Node, scope: Scope) -> None:
        t = node.type
        if t == "VariableDeclaration" and node.kind == "var":
            target = scope.function_scope()
            for decl in node.declarations:
                for ident in _pattern_identifiers(decl.id):
                    target.declare(ident.name, "var", ident)
                    self._record(ident, target.bindings[ident.name])
        elif t == "FunctionDeclaration":
            target = scope.function_scope()
            binding = target.declare(node.id.name, "function", node.id)
            self._record(node.id, binding)
        elif t in ("IfStatement",):
            self._hoist_statement(node.consequent, scope)
            if node.alternate is not None:
                self._hoist_statement(node.alternate, scope)
        elif t in ("WhileStatement", "DoWhileStatement", "LabeledStatement"):
            self._hoist_statement(node.body, scope)
        elif t == "ForStatement":
            if node.init is not None and node.init.type == "VariableDeclaration":
                self._hoist_statement(node.init, scope)
            self._hoist_statement(node.body, scope)
        elif t == "ForInStatement":
            if node.left.type == "VariableDeclaration":
                self._hoist_statement(node.left, scope)
            self._hoist_statement(node.body, scope)
        elif t == "BlockStatement":
            for stmt in node.body:
                self._hoist_statement(stmt, scope)
        elif t == "TryStatement":
            self._hoist_statement(node.block, scope)
            if node.handler is not None:
                self._hoist_statement(node.handler.body, scope)
            if node.finalizer is not None:
                self._hoist_statement(node.finalizer, scope)
        elif t == "SwitchStatement":
            for case in node.cases:
                for stmt in case.consequent:
                    self._hoist_statement(stmt, scope)

    # -- traversal --------------------------------------------------------

    def _visit_statement(self, node: Node, scope: Scope) -> None:
        t = node.type
        if t in ("OpaqueStatement", "RecoveredStatement", "EmptyStatement",
                 "BreakStatement", "ContinueStatement"):
            return
        if t == "VariableDeclaration":
            self._visit_var_decl(node, scope)
            return
        if t == "FunctionDeclaration":
            self._visit_function(node, scope)
            return
        if t == "BlockStatement":
            block = self._child_scope("block", node, scope)
            self._hoist_lexical(node.body, block)
            for stmt in node.body:
                self._visit_statement(stmt, block)
            return
        if t == "ExpressionStatement":
            self._visit_expr(node.expression, scope)
            return
        if t == "IfStatement":
            self._visit_expr(node.test, scope)
            self._visit_statement(node.consequent, scope)
            if node.alternate is not None:
                self._visit_statement(node.alternate, scope)
            return
        if t in ("WhileStatement", "DoWhileStatement"):
            self._visit_expr(node.test, scope)
            self._visit_statement(node.body, scope)
            return
        if t == "ForStatement":
            inner = self._child_scope("block", node, scope)
            if node.init is not None:
                if node.init.type == "VariableDeclaration":
                    self._visit_var_decl(node.init, inner)
                else:
                    self._visit_expr(node.init.expression
                                     if node.init.type == "ExpressionStatement"
                                     else node.init, inner)
            if node.test is not None:
                self._visit_expr(node.test, inner)
            if node.update is not None:
                self._visit_expr(node.update, inner)
            self._visit_statement(node.body, inner)
            return
        if t == "ForInStatement":
            inner = self._child_scope("block", node, scope)
            if node.left.type == "VariableDeclaration":
                self._visit_var_decl(node.left, inner)
            else:
                self._visit_target(node.left, inner)
            self._visit_expr(node.right, inner)
            self._visit_statement(node.body, inner)
            return
        if t == "SwitchStatement":
            self._visit_expr(node.discriminant, scope)
            block = self._child_scope("block", node, scope)
            for case in node.cases:
                self._hoist_lexical(case.consequent, block)
            for case in node.cases:
                if case.test is not None:
                    self._visit_expr(case.test, block)
                for stmt in case.consequent:
                    self._visit_statement(stmt, block)
            return
        if t == "ReturnStatement":
            if node.argument is not None:
                self._visit_expr(node.argument, scope)
            return
        if t == "LabeledStatement":
            self._visit_statement(node.body, scope)
            return
        if t == "TryStatement":
            self._visit_statement(node.block, scope)
            if node.handler is not None:
                catch = self._child_scope("catch", node.handler, scope)
                if node.handler.param is not None:
                    binding = catch.declare(node.handler.param.name, "catch", node.handler.param)
                    self._record(node.handler.param, binding)
                self._visit_statement(node.handler.body, catch)
            if node.finalizer is not None:
                self._visit_statement(node.finalizer, scope)
            return
        if t == "ThrowStatement":
            self._visit_expr(node.argument, scope)
            return
        raise ValueError(f"unhandled statement {t}")

    def _visit_var_decl(self, node: Node, scope: Scope) -> None:
        lexical = node.kind in ("let", "const")
        for decl in node.declarations:
            for ident in _pattern_identifiers(decl.id):
                if lexical:
                    binding = scope.declare(ident.name, node.kind, ident)
                    self._record(ident, binding)
                # var names were declared during hoisting
            if decl.init is not None:
                self._visit_expr(decl.init, scope)

    def _visit_function(self, node: Node, scope: Scope) -> None:
        fn_scope = self._child_scope("function", node, scope)
        if node.type == "FunctionExpression" and node.id is not None:
            # The name of a named function expression is visible only inside.
            binding = fn_scope.declare(node.id.name, "function", node.id)
            self._record(node.id, binding)
        for param in node.params:
            binding = fn_scope.declare(param.name, "param", param)
            self._record(param, binding)
        self._hoist(node.body.body, fn_scope)
        self._hoist_lexical(node.body.body, fn_scope)
        for stmt in node.body.body:
            self._visit_statement(stmt, fn_scope)

    def _hoist_lexical(self, statements: list[Node], scope: Scope) -> None:
        """let/const are visible throughout their block (no TDZ modeling)."""
        for stmt in statements:
            if stmt.type == "VariableDeclaration" and stmt.kind in ("let", "const"):
                for decl in stmt.declarations:
                    for ident in _pattern_identifiers(decl.id):
                        binding = scope.declare(ident.name, stmt.kind, ident)
                        self._record(ident, binding)

    def _visit_expr(self, node: Node, scope: Scope) -> None:
        t = node.type
        if t == "Identifier":
            self._reference(node, scope)
            return
        if t in ("Literal", "ThisExpression"):
            return
        if t == "FunctionExpression":
            self._visit_function(node, scope)
            return
        if t == "MemberExpression":
            self._visit_expr(node.object, scope)
            if node.computed:
                self._visit_expr(node.property, scope)
            return
        if t == "Property":
            if node.get("computed"):
                self._visit_expr(node.key, scope)
            self._visit_expr(node.value, scope)
            return
        if t == "AssignmentExpression":
            self._visit_target(node.left, scope)
            self._visit_expr(node.right, scope)
            return
        if t == "ArrayPattern":
            self._visit_target(node, scope)
            return
        for child in node.children():
            self._visit_expr(child, scope)

    def _visit_target(self, node: Node, scope: Scope) -> None:
        if node.type == "Identifier":
            self._reference(node, scope)
        elif node.type == "ArrayPattern":
            for el in node.elements:
                if el is not None:
                    self._visit_target(el, scope)
        else:
            self._visit_expr(node, scope)

    def _reference(self, ident: Node, scope: Scope) -> None:
        self.ref_scope[id(ident)] = scope
        binding = scope.resolve(ident.name)
        if binding is not None:
            binding.references.append(ident)
            self._record(ident, binding)
        else:
            self.free_refs.setdefault(ident.name, []).append(ident)

    def _child_scope(self, kind: str, node: Node, parent: Scope) -> Scope:
        assert self.table is not None
        existing = self.table.scope_by_node.get(id(node))
        if existing is not None:
            return existing
        scope = Scope(kind, node, parent)
        parent.children.append(scope)
        self.table.scope_by_node[id(node)] = scope
        return scope

    def _record(self, ident: Node, binding: Binding) -> None:
        assert self.table is not None
        self.table.binding_by_ident[id(ident)] = binding

    def _resolve_free(self) -> None:
        # Nothing extra: free references stay free.  Kept as a hook point.
        return


def _pattern_identifiers(node: Node) -> Iterator[Node]:
    if node.type == "Identifier":
        yield node
    elif node.type == "ArrayPattern":
        for el in node.elements:
            if el is not None:
                yield from _pattern_identifiers(el)


def build_scopes(program: Node) -> ScopeTable:
    return _Builder().build(program)
