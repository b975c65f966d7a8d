"""Tree-walking interpreter with step/depth/heap/wall-clock budgets.

Dynamic-code sinks (eval, Function, string-argument setTimeout/setInterval,
document.write) are intercepted: the would-be-executed string is raised as
a capture signal instead of run.  The test-only ``follow_captures`` flag
executes captured code inside the same sandbox, which is what makes
behavioral-equivalence checks possible on eval-wrapped fixtures.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Any, Optional

from ..ast_nodes import Node
from ..parser import parse
from ..printer import print_source
from . import builtins as bi
from .coerce import (
    CoercionError,
    abstract_equals,
    strict_equals,
    to_boolean,
    to_int32,
    to_number,
    to_primitive,
    to_string,
    to_uint32,
)
from .values import (
    NULL,
    UNDEFINED,
    JSArray,
    JSFunction,
    JSObject,
    JSRegExp,
    NativeFunction,
    is_callable,
    type_of,
)


@dataclass
class EvalBudget:
    max_steps: int = 5_000_000
    max_call_depth: int = 256
    max_heap_cells: int = 1_000_000
    wall_clock_ms: int = 2000

    def quartered(self) -> "EvalBudget":
        return EvalBudget(
            max(1, self.max_steps // 4),
            max(1, self.max_call_depth // 4),
            max(1, self.max_heap_cells // 4),
            max(1, self.wall_clock_ms // 4),
        )


class BudgetExceeded(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class BlockedAccess(Exception):
    def __init__(self, name: str):
        super().__init__(f"access to blocked name: {name}")
        self.name = name


class CaptureSignal(Exception):
    def __init__(self, source: str, sink: str):
        super().__init__(f"captured code via {sink}")
        self.source = source
        self.sink = sink


class JSThrow(Exception):
    def __init__(self, value: Any):
        super().__init__("js exception")
        self.value = value


class _Return(Exception):
    def __init__(self, value: Any):
        self.value = value


class _Break(Exception):
    def __init__(self, label: Optional[str] = None):
        self.label = label


class _Continue(Exception):
    def __init__(self, label: Optional[str] = None):
        self.label = label


BLOCKED_NAMES = frozenset(
    "require process module exports __dirname __filename fetch XMLHttpRequest "
    "WebSocket importScripts Worker child_process fs".split()
)


class Environment:
    __slots__ = ("vars", "parent")

    def __init__(self, parent: Optional["Environment"] = None):
        self.vars: dict[str, Any] = {}
        self.parent = parent

    def declare(self, name: str, value: Any = UNDEFINED) -> None:
        if name not in self.vars:
            self.vars[name] = value
        elif value is not UNDEFINED:
            self.vars[name] = value

    def lookup_env(self, name: str) -> Optional["Environment"]:
        env: Optional[Environment] = self
        while env is not None:
            if name in env.vars:
                return env
            env = env.parent
        return None

    def root(self) -> "Environment":
        env = self
        while env.parent is not None:
            env = env.parent
        return env


class WindowProxy(JSObject):
    """`window` aliases the global environment: reads and writes pass through."""

    class_name = "Object"

    def __init__(self, global_env: Environment):
        super().__init__()
        self.global_env = global_env

    def get_own(self, key: str):
        if key in self.props:
            return self.props[key]
        env = self.global_env.lookup_env(key)
        if env is not None:
            return env.vars[key]
        return UNDEFINED

    def has_own(self, key: str) -> bool:
        return key in self.props or self.global_env.lookup_env(key) is not None

    def set(self, key: str, value: Any) -> None:
        self.global_env.root().vars[key] = value


class Interpreter:
    def __init__(
        self,
        budget: Optional[EvalBudget] = None,
        follow_captures: bool = False,
        max_capture_depth: int = 5,
        platform: str = "Win32",
        referrer: str = "",
    ):
        self.budget = budget or EvalBudget()
        self.follow_captures = follow_captures
        self.max_capture_depth = max_capture_depth
        self.capture_depth = 0
        self.steps = 0
        self.heap_cells = 0
        self.call_depth = 0
        self.deadline = 0.0
        self.console_log: list[tuple[str, str]] = []
        self.alerts: list[str] = []
        self.timer_registrations: list[Any] = []
        self.global_env = Environment()
        self.this_stack: list[Any] = []
        self._install_globals(platform, referrer)

    # -- global setup -----------------------------------------------------

    def _install_globals(self, platform: str, referrer: str) -> None:
        g = self.global_env
        g.vars["undefined"] = UNDEFINED
        g.vars["NaN"] = float("nan")
        g.vars["Infinity"] = float("inf")
        g.vars["String"] = bi.make_string_ctor()
        g.vars["Number"] = bi.make_number_ctor()
        g.vars["Boolean"] = bi.make_boolean_ctor()
        g.vars["Array"] = bi.make_array_ctor()
        g.vars["Object"] = bi.make_object_ctor()
        g.vars["Math"] = bi.make_math()
        g.vars["JSON"] = bi.make_json()
        g.vars["RegExp"] = bi.make_regexp_ctor()
        g.vars["Date"] = bi.make_date_ctor()
        for err in ("Error", "TypeError", "SyntaxError", "RangeError", "ReferenceError"):
            g.vars[err] = bi.make_error_ctor(err)
        g.vars["parseInt"] = NativeFunction(bi.js_parse_int, "parseInt")
        g.vars["parseFloat"] = NativeFunction(bi.js_parse_float, "parseFloat")
        g.vars["atob"] = NativeFunction(bi.js_atob, "atob")
        g.vars["btoa"] = NativeFunction(bi.js_btoa, "btoa")
        g.vars["escape"] = NativeFunction(bi.js_escape, "escape")
        g.vars["unescape"] = NativeFunction(bi.js_unescape, "unescape")
        g.vars["isNaN"] = NativeFunction(
            lambda it, t, a: math.isnan(to_number(a[0] if a else UNDEFINED, it)), "isNaN")
        g.vars["isFinite"] = NativeFunction(
            lambda it, t, a: math.isfinite(to_number(a[0] if a else UNDEFINED, it)), "isFinite")
        g.vars["decodeURIComponent"] = NativeFunction(bi.js_unescape, "decodeURIComponent")
        g.vars["encodeURIComponent"] = NativeFunction(bi.js_escape, "encodeURIComponent")

        console = JSObject()
        for level in ("log", "info", "warn", "error", "debug"):
            console.props[level] = self._make_console(level)
        g.vars["console"] = console

        g.vars["alert"] = NativeFunction(self._alert, "alert")
        g.vars["setTimeout"] = NativeFunction(self._make_timer("setTimeout"), "setTimeout")
        g.vars["setInterval"] = NativeFunction(self._make_timer("setInterval"), "setInterval")
        g.vars["clearTimeout"] = NativeFunction(lambda it, t, a: UNDEFINED, "clearTimeout")
        g.vars["clearInterval"] = NativeFunction(lambda it, t, a: UNDEFINED, "clearInterval")

        g.vars["eval"] = NativeFunction(self._indirect_eval, "eval")
        g.vars["Function"] = self._make_function_ctor()

        window = WindowProxy(g)
        g.vars["window"] = window
        g.vars["self"] = window
        g.vars["globalThis"] = window
        g.vars["top"] = window

        document = JSObject()
        document.props["referrer"] = referrer
        document.props["write"] = NativeFunction(self._document_write, "write")
        document.props["writeln"] = NativeFunction(self._document_write, "write")
        document.props["createElement"] = NativeFunction(
            lambda it, t, a: JSObject(), "createElement")
        document.props["getElementById"] = NativeFunction(
            lambda it, t, a: NULL, "getElementById")
        g.vars["document"] = document

        navigator = JSObject()
        navigator.props["platform"] = platform
        navigator.props["userAgent"] = "Mozilla/5.0 (sandbox)"
        g.vars["navigator"] = navigator
        g.vars["global"] = window

    def _make_console(self, level: str) -> NativeFunction:
        def log(it, t, a):
            text = " ".join(to_string(x, it) for x in a)
            it.console_log.append((level, text))
            return UNDEFINED
        return NativeFunction(log, level)

    def _alert(self, it, t, a):
        text = to_string(a[0], it) if a else "undefined"
        it.alerts.append(text)
        it.console_log.append(("alert", text))
        return UNDEFINED

    def _make_timer(self, sink: str):
        def timer(it, t, a):
            first = a[0] if a else UNDEFINED
            if isinstance(first, str):
                if it.follow_captures:
                    it._run_captured(first)
                    return 0.0
                raise CaptureSignal(first, sink)
            it.timer_registrations.append(first)
            return 0.0
        return timer

    def _document_write(self, it, t, a):
        text = to_string(a[0], it) if a else ""
        if "<script" in text.lower():
            if it.follow_captures:
                for frag in _script_bodies(text):
                    it._run_captured(frag)
                return UNDEFINED
            raise CaptureSignal(text, "document.write")
        it.console_log.append(("document.write", text))
        return UNDEFINED

    def _indirect_eval(self, it, t, a):
        code = a[0] if a else UNDEFINED
        if not isinstance(code, str):
            return code
        if it.follow_captures:
            return it._run_captured(code)
        raise CaptureSignal(code, "eval")

    def _make_function_ctor(self) -> NativeFunction:
        def function_ctor(it, t, a):
            body_src = to_string(a[-1], it) if a else ""
            params: list[str] = []
            for p in a[:-1]:
                params.extend(x.strip() for x in to_string(p, it).split(",") if x.strip())
            program, _ = parse(body_src, "tolerant")
            body = Node("BlockStatement", None, body=program.body)
            return JSFunction(params, body, it.global_env, "anonymous",
                              from_code_string=body_src)
        return NativeFunction(function_ctor, "Function")

    def _run_captured(self, source: str) -> Any:
        if self.capture_depth >= self.max_capture_depth:
            raise BudgetExceeded("capture depth exceeded")
        self.capture_depth += 1
        try:
            program, _ = parse(source, "tolerant")
            return self.run_program(program, self.global_env, fresh_deadline=False)
        finally:
            self.capture_depth -= 1

    # -- budget -----------------------------------------------------------

    def step(self) -> None:
        self.steps += 1
        if self.steps > self.budget.max_steps:
            raise BudgetExceeded("step budget exceeded")
        if (self.steps & 0x3FF) == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded("wall clock budget exceeded")

    def alloc(self, cells: int = 1) -> None:
        self.heap_cells += cells
        if self.heap_cells > self.budget.max_heap_cells:
            raise BudgetExceeded("heap budget exceeded")

    def throw_error(self, name: str, message: str) -> None:
        obj = JSObject({"name": name, "message": message})
        raise JSThrow(obj)

    # -- program execution ------------------------------------------------

    def run_program(self, program: Node, env: Optional[Environment] = None,
                    fresh_deadline: bool = True) -> Any:
        if env is None:
            env = self.global_env
        if fresh_deadline:
            self.deadline = time.monotonic() + self.budget.wall_clock_ms / 1000.0
        self._hoist(program.body, env)
        completion: Any = UNDEFINED
        for stmt in program.body:
            value = self.exec_statement(stmt, env)
            if value is not _NO_VALUE:
                completion = value
        return completion

    def _hoist(self, statements: list[Node], env: Environment) -> None:
        for stmt in statements:
            self._hoist_one(stmt, env)

    def _hoist_one(self, node: Node, env: Environment) -> None:
        t = node.type
        if t == "FunctionDeclaration":
            fn = JSFunction([p.name for p in node.params], node.body, env, node.id.name)
            env.vars[node.id.name] = fn
        elif t == "VariableDeclaration" and node.kind == "var":
            for decl in node.declarations:
                for name in _pattern_names(decl.id):
                    env.declare(name)
        elif t == "IfStatement":
            self._hoist_one(node.consequent, env)
            if node.alternate is not None:
                self._hoist_one(node.alternate, env)
        elif t in ("WhileStatement", "DoWhileStatement", "LabeledStatement"):
            self._hoist_one(node.body, env)
        elif t == "ForStatement":
            if node.init is not None and node.init.type == "VariableDeclaration":
                self._hoist_one(node.init, env)
            self._hoist_one(node.body, env)
        elif t == "ForInStatement":
            if node.left.type == "VariableDeclaration":
                self._hoist_one(node.left, env)
            self._hoist_one(node.body, env)
        elif t == "BlockStatement":
            for stmt in node.body:
                self._hoist_one(stmt, env)
        elif t == "TryStatement":
            self._hoist_one(node.block, env)
            if node.handler is not None:
                self._hoist_one(node.handler.body, env)
            if node.finalizer is not None:
                self._hoist_one(node.finalizer, env)
        elif t == "SwitchStatement":
            for case in node.cases:
                for stmt in case.consequent:
                    self._hoist_one(stmt, env)

    # -- statements -------------------------------------------------------

    def exec_statement(self, node: Node, env: Environment) -> Any:
        self.step()
        t = node.type
        if t == "ExpressionStatement":
            return self.eval_expression(node.expression, env)
        if t == "VariableDeclaration":
            for decl in node.declarations:
                value = UNDEFINED if decl.init is None else self.eval_expression(decl.init, env)
                self._bind_pattern(decl.id, value, env, declare=True)
            return _NO_VALUE
        if t == "FunctionDeclaration":
            return _NO_VALUE  # installed during hoisting
        if t == "BlockStatement":
            completion = _NO_VALUE
            for stmt in node.body:
                value = self.exec_statement(stmt, env)
                if value is not _NO_VALUE:
                    completion = value
            return completion
        if t == "IfStatement":
            if to_boolean(self.eval_expression(node.test, env)):
                return self.exec_statement(node.consequent, env)
            if node.alternate is not None:
                return self.exec_statement(node.alternate, env)
            return _NO_VALUE
        if t == "WhileStatement":
            while to_boolean(self.eval_expression(node.test, env)):
                try:
                    self.exec_statement(node.body, env)
                except _Break as b:
                    if b.label is None:
                        break
                    raise
                except _Continue as c:
                    if c.label is None:
                        continue
                    raise
            return _NO_VALUE
        if t == "DoWhileStatement":
            while True:
                try:
                    self.exec_statement(node.body, env)
                except _Break as b:
                    if b.label is None:
                        break
                    raise
                except _Continue as c:
                    if c.label is not None:
                        raise
                if not to_boolean(self.eval_expression(node.test, env)):
                    break
            return _NO_VALUE
        if t == "ForStatement":
            if node.init is not None:
                if node.init.type == "VariableDeclaration":
                    self.exec_statement(node.init, env)
                elif node.init.type == "ExpressionStatement":
                    self.eval_expression(node.init.expression, env)
                else:
                    self.eval_expression(node.init, env)
            while node.test is None or to_boolean(self.eval_expression(node.test, env)):
                try:
                    self.exec_statement(node.body, env)
                except _Break as b:
                    if b.label is None:
                        break
                    raise
                except _Continue as c:
                    if c.label is not None:
                        raise
                if node.update is not None:
                    self.eval_expression(node.update, env)
            return _NO_VALUE
        if t == "ForInStatement":
            target = node.left
            if target.type == "VariableDeclaration":
                self.exec_statement(target, env)
                target = target.declarations[0].id
            obj = self.eval_expression(node.right, env)
            for key in self._enumerate_keys(obj):
                self._assign_target(target, key, env)
                try:
                    self.exec_statement(node.body, env)
                except _Break as b:
                    if b.label is None:
                        break
                    raise
                except _Continue as c:
                    if c.label is not None:
                        raise
            return _NO_VALUE
        if t == "SwitchStatement":
            disc = self.eval_expression(node.discriminant, env)
            matched = False
            try:
                for case in node.cases:
                    if not matched and case.test is not None:
                        if strict_equals(disc, self.eval_expression(case.test, env)):
                            matched = True
                    if matched:
                        for stmt in case.consequent:
                            self.exec_statement(stmt, env)
                if not matched:
                    running = False
                    for case in node.cases:
                        if case.test is None:
                            running = True
                        if running:
                            for stmt in case.consequent:
                                self.exec_statement(stmt, env)
            except _Break as b:
                if b.label is not None:
                    raise
            return _NO_VALUE
        if t == "ReturnStatement":
            value = UNDEFINED if node.argument is None else self.eval_expression(node.argument, env)
            raise _Return(value)
        if t == "BreakStatement":
            raise _Break(node.get("label"))
        if t == "ContinueStatement":
            raise _Continue(node.get("label"))
        if t == "LabeledStatement":
            try:
                return self.exec_statement(node.body, env)
            except _Break as b:
                if b.label == node.label:
                    return _NO_VALUE
                raise
            except _Continue as c:
                if c.label == node.label:
                    return _NO_VALUE
                raise
        if t == "TryStatement":
            try:
                try:
                    self.exec_statement(node.block, env)
                except JSThrow as exc:
                    if node.handler is not None:
                        catch_env = Environment(env)
                        if node.handler.param is not None:
                            catch_env.vars[node.handler.param.name] = exc.value
                        self.exec_statement(node.handler.body, catch_env)
                    else:
                        raise
            finally:
                if node.finalizer is not None:
                    self.exec_statement(node.finalizer, env)
            return _NO_VALUE
        if t == "ThrowStatement":
            raise JSThrow(self.eval_expression(node.argument, env))
        if t == "EmptyStatement":
            return _NO_VALUE
        if t in ("OpaqueStatement", "RecoveredStatement"):
            return _NO_VALUE  # outside the supported grammar; skipped
        raise ValueError(f"cannot execute statement {t}")

    def _enumerate_keys(self, obj: Any) -> list[str]:
        if isinstance(obj, JSArray):
            return [str(i) for i in range(len(obj.elements))]
        if isinstance(obj, JSObject):
            return list(obj.props.keys())
        if isinstance(obj, str):
            return [str(i) for i in range(len(obj))]
        return []

    # -- expressions ------------------------------------------------------

    def eval_expression(self, node: Node, env: Environment) -> Any:
        self.step()
        t = node.type
        if t == "Literal":
            if node.raw_kind == "regexp":
                pattern, flags = node.regex
                return JSRegExp(pattern, flags)
            if node.raw_kind == "number":
                return float(node.value)
            return node.value if node.value is not None else NULL
        if t == "Identifier":
            return self._lookup(node.name, env)
        if t == "ThisExpression":
            return self.this_stack[-1] if self.this_stack else self.global_env.vars["window"]
        if t == "ArrayExpression":
            self.alloc(len(node.elements) + 1)
            return JSArray([
                UNDEFINED if el is None else self.eval_expression(el, env)
                for el in node.elements
            ])
        if t == "ObjectExpression":
            self.alloc(len(node.properties) + 1)
            obj = JSObject()
            for prop in node.properties:
                if prop.get("computed"):
                    key = to_string(self.eval_expression(prop.key, env), self)
                elif prop.key.type == "Identifier":
                    key = prop.key.name
                else:
                    key = to_string(self.eval_expression(prop.key, env), self)
                obj.props[key] = self.eval_expression(prop.value, env)
            return obj
        if t == "FunctionExpression":
            name = node.id.name if node.id is not None else ""
            fn_env = env
            if node.id is not None:
                fn_env = Environment(env)
            fn = JSFunction([p.name for p in node.params], node.body, fn_env, name)
            if node.id is not None:
                fn_env.vars[name] = fn
            return fn
        if t == "MemberExpression":
            obj = self.eval_expression(node.object, env)
            key = self._member_key(node, env)
            return self.get_member(obj, key)
        if t == "CallExpression":
            return self._eval_call(node, env)
        if t == "NewExpression":
            ctor = self.eval_expression(node.callee, env)
            args = [self.eval_expression(a, env) for a in node.arguments]
            return self.construct(ctor, args)
        if t == "UnaryExpression":
            return self._eval_unary(node, env)
        if t == "UpdateExpression":
            return self._eval_update(node, env)
        if t == "BinaryExpression":
            left = self.eval_expression(node.left, env)
            right = self.eval_expression(node.right, env)
            return self.binary_op(node.operator, left, right)
        if t == "LogicalExpression":
            left = self.eval_expression(node.left, env)
            if node.operator == "&&":
                return self.eval_expression(node.right, env) if to_boolean(left) else left
            return left if to_boolean(left) else self.eval_expression(node.right, env)
        if t == "ConditionalExpression":
            if to_boolean(self.eval_expression(node.test, env)):
                return self.eval_expression(node.consequent, env)
            return self.eval_expression(node.alternate, env)
        if t == "AssignmentExpression":
            return self._eval_assignment(node, env)
        if t == "SequenceExpression":
            value: Any = UNDEFINED
            for expr in node.expressions:
                value = self.eval_expression(expr, env)
            return value
        if t == "ArrayPattern":
            self.throw_error("SyntaxError", "unexpected pattern")
        raise ValueError(f"cannot evaluate expression {t}")

    def _member_key(self, node: Node, env: Environment) -> str:
        if node.computed:
            return to_string(self.eval_expression(node.property, env), self)
        return node.property.name

    def _lookup(self, name: str, env: Environment) -> Any:
        if name in BLOCKED_NAMES:
            raise BlockedAccess(name)
        found = env.lookup_env(name)
        if found is not None:
            return found.vars[name]
        self.throw_error("ReferenceError", f"{name} is not defined")

    # -- calls ------------------------------------------------------------

    def _eval_call(self, node: Node, env: Environment) -> Any:
        callee = node.callee
        # Direct eval runs (or captures) in the calling scope.
        if callee.type == "Identifier" and callee.name == "eval":
            resolved = env.lookup_env("eval")
            if resolved is None or resolved.parent is None or resolved is self.global_env:
                args = [self.eval_expression(a, env) for a in node.arguments]
                code = args[0] if args else UNDEFINED
                if not isinstance(code, str):
                    return code
                if self.follow_captures:
                    if self.capture_depth >= self.max_capture_depth:
                        raise BudgetExceeded("capture depth exceeded")
                    self.capture_depth += 1
                    try:
                        program, _ = parse(code, "tolerant")
                        self._hoist(program.body, env)
                        completion: Any = UNDEFINED
                        for stmt in program.body:
                            value = self.exec_statement(stmt, env)
                            if value is not _NO_VALUE:
                                completion = value
                        return completion
                    finally:
                        self.capture_depth -= 1
                raise CaptureSignal(code, "eval")
        this: Any = UNDEFINED
        if callee.type == "MemberExpression":
            this = self.eval_expression(callee.object, env)
            key = self._member_key(callee, env)
            fn = self.get_member(this, key)
        else:
            fn = self.eval_expression(callee, env)
        args = [self.eval_expression(a, env) for a in node.arguments]
        return self.call_function(fn, this, args)

    def call_function(self, fn: Any, this: Any, args: list[Any]) -> Any:
        self.step()
        if isinstance(fn, NativeFunction):
            self.call_depth += 1
            if self.call_depth > self.budget.max_call_depth:
                self.call_depth -= 1
                raise BudgetExceeded("call depth exceeded")
            try:
                return fn.fn(self, this, args)
            finally:
                self.call_depth -= 1
        if not isinstance(fn, JSFunction):
            self.throw_error("TypeError", f"{type_of(fn)} is not a function")
        if fn.from_code_string is not None and not self.follow_captures:
            # Function-constructor output: a single `return <expr>` body is
            # interpreted (inner decoders); anything else is captured.
            body = [s for s in fn.body.body if s.type != "EmptyStatement"]
            single_return = (
                len(body) == 1 and body[0].type == "ReturnStatement"
            )
            if not single_return:
                raise CaptureSignal(fn.from_code_string, "Function")
        self.call_depth += 1
        if self.call_depth > self.budget.max_call_depth:
            self.call_depth -= 1
            raise BudgetExceeded("call depth exceeded")
        local = Environment(fn.env)
        for i, name in enumerate(fn.params):
            local.vars[name] = args[i] if i < len(args) else UNDEFINED
        arguments = JSArray(list(args))
        local.vars.setdefault("arguments", arguments)
        self.this_stack.append(this if this is not UNDEFINED else self.global_env.vars["window"])
        try:
            self._hoist(fn.body.body, local)
            for stmt in fn.body.body:
                self.exec_statement(stmt, local)
            return UNDEFINED
        except _Return as ret:
            return ret.value
        finally:
            self.this_stack.pop()
            self.call_depth -= 1

    def construct(self, ctor: Any, args: list[Any]) -> Any:
        if isinstance(ctor, NativeFunction):
            return ctor.fn(self, UNDEFINED, args)
        if not isinstance(ctor, JSFunction):
            self.throw_error("TypeError", "not a constructor")
        self.alloc()
        this = JSObject()
        result = self.call_function(ctor, this, args)
        if isinstance(result, (JSObject, JSFunction, NativeFunction)):
            return result
        return this

    # -- member access ----------------------------------------------------

    def get_member(self, obj: Any, key: str) -> Any:
        self.step()
        if obj is UNDEFINED or obj is NULL:
            self.throw_error(
                "TypeError", f"cannot read properties of {to_string(obj)} (reading '{key}')")
        if isinstance(obj, str):
            return self._string_member(obj, key)
        if isinstance(obj, bool):
            if key == "constructor":
                return self.global_env.vars["Boolean"]
            if key == "toString":
                return NativeFunction(lambda it, t, a: to_string(obj), "toString")
            return UNDEFINED
        if isinstance(obj, float):
            return self._number_member(obj, key)
        if isinstance(obj, JSArray):
            return self._array_member(obj, key)
        if isinstance(obj, JSRegExp):
            if obj.has_own(key):
                return obj.get_own(key)
            method = bi.regexp_method(self, obj, key)
            if method is not None:
                return method
            if key == "source":
                return obj.pattern
            if key == "flags":
                return obj.flags
            if key == "constructor":
                return self.global_env.vars["RegExp"]
            return UNDEFINED
        if isinstance(obj, (JSFunction, NativeFunction)):
            return self._function_member(obj, key)
        if isinstance(obj, JSObject):
            if obj.has_own(key):
                return obj.get_own(key)
            return self._object_common(obj, key)
        return UNDEFINED

    def _string_member(self, s: str, key: str) -> Any:
        if key == "length":
            return float(len(s))
        if key.isdigit():
            idx = int(key)
            return s[idx] if idx < len(s) else UNDEFINED
        if key == "constructor":
            return self.global_env.vars["String"]
        method = bi.string_method(self, s, key)
        return method if method is not None else UNDEFINED

    def _number_member(self, n: float, key: str) -> Any:
        if key == "constructor":
            return self.global_env.vars["Number"]
        method = bi.number_method(self, n, key)
        return method if method is not None else UNDEFINED

    def _array_member(self, arr: JSArray, key: str) -> Any:
        if key == "length":
            return float(len(arr.elements))
        if key.lstrip("-").isdigit():
            idx = int(key)
            if 0 <= idx < len(arr.elements):
                return arr.elements[idx]
            return UNDEFINED
        if arr.has_own(key):
            return arr.get_own(key)
        if key == "constructor":
            return self.global_env.vars["Array"]
        method = bi.array_method(self, arr, key)
        if method is not None:
            return method
        return self._object_common(arr, key)

    def _function_member(self, fn: Any, key: str) -> Any:
        if key in fn.props:
            return fn.props[key]
        if key == "constructor":
            return self.global_env.vars["Function"]
        if key == "call":
            def call(it, t, a):
                this = a[0] if a else UNDEFINED
                return it.call_function(fn, this, list(a[1:]))
            return NativeFunction(call, "call")
        if key == "apply":
            def apply(it, t, a):
                this = a[0] if a else UNDEFINED
                rest = a[1] if len(a) > 1 else UNDEFINED
                args = rest.elements if isinstance(rest, JSArray) else []
                return it.call_function(fn, this, list(args))
            return NativeFunction(apply, "apply")
        if key == "toString":
            return NativeFunction(lambda it, t, a: it.function_source(fn), "toString")
        if key == "length":
            if isinstance(fn, JSFunction):
                return float(len(fn.params))
            return 0.0
        if key == "name":
            return fn.name
        if key == "prototype":
            proto = fn.props.get("prototype")
            if proto is None:
                proto = JSObject()
                fn.props["prototype"] = proto
            return proto
        return UNDEFINED

    def _object_common(self, obj: JSObject, key: str) -> Any:
        if key == "constructor":
            return self.global_env.vars["Object"]
        if key == "hasOwnProperty":
            return NativeFunction(
                lambda it, t, a: obj.has_own(to_string(a[0], it)) if a else False,
                "hasOwnProperty")
        if key == "toString":
            if isinstance(obj, WindowProxy):
                return NativeFunction(lambda it, t, a: "[object Window]", "toString")
            return NativeFunction(lambda it, t, a: to_primitive(obj, "string", it), "toString")
        if key == "valueOf":
            return NativeFunction(lambda it, t, a: obj, "valueOf")
        return UNDEFINED

    def set_member(self, obj: Any, key: str, value: Any) -> None:
        self.step()
        if obj is UNDEFINED or obj is NULL:
            self.throw_error("TypeError", f"cannot set properties of {to_string(obj)}")
        if isinstance(obj, JSArray):
            if key == "length":
                new_len = int(to_number(value, self))
                cur = len(obj.elements)
                if new_len < cur:
                    del obj.elements[new_len:]
                else:
                    self.alloc(new_len - cur)
                    obj.elements.extend([UNDEFINED] * (new_len - cur))
                return
            if key.isdigit():
                idx = int(key)
                if idx >= len(obj.elements):
                    self.alloc(idx + 1 - len(obj.elements))
                    obj.elements.extend([UNDEFINED] * (idx + 1 - len(obj.elements)))
                obj.elements[idx] = value
                return
            obj.set(key, value)
            return
        if isinstance(obj, JSObject):
            self.alloc()
            obj.set(key, value)
            return
        if isinstance(obj, (JSFunction, NativeFunction)):
            obj.props[key] = value
            return
        # Assignments to primitive members are silently dropped, as in JS.

    # -- operators --------------------------------------------------------

    def _eval_unary(self, node: Node, env: Environment) -> Any:
        op = node.operator
        if op == "typeof":
            if node.argument.type == "Identifier":
                name = node.argument.name
                if name in BLOCKED_NAMES:
                    raise BlockedAccess(name)
                found = env.lookup_env(name)
                if found is None:
                    return "undefined"
                return type_of(found.vars[name])
            return type_of(self.eval_expression(node.argument, env))
        if op == "delete":
            arg = node.argument
            if arg.type == "MemberExpression":
                obj = self.eval_expression(arg.object, env)
                key = self._member_key(arg, env)
                if isinstance(obj, JSArray) and key.isdigit():
                    idx = int(key)
                    if 0 <= idx < len(obj.elements):
                        obj.elements[idx] = UNDEFINED
                    return True
                if isinstance(obj, JSObject):
                    obj.props.pop(key, None)
                    return True
                return True
            return True
        value = self.eval_expression(node.argument, env)
        if op == "!":
            return not to_boolean(value)
        if op == "-":
            return -to_number(value, self)
        if op == "+":
            return to_number(value, self)
        if op == "~":
            return float(~to_int32(value, self))
        if op == "void":
            return UNDEFINED
        raise ValueError(f"unknown unary operator {op}")

    def _eval_update(self, node: Node, env: Environment) -> Any:
        arg = node.argument
        old = to_number(self._read_target(arg, env), self)
        new = old + (1.0 if node.operator == "++" else -1.0)
        self._write_target(arg, new, env)
        return new if node.prefix else old

    def _read_target(self, node: Node, env: Environment) -> Any:
        if node.type == "Identifier":
            return self._lookup(node.name, env)
        if node.type == "MemberExpression":
            obj = self.eval_expression(node.object, env)
            return self.get_member(obj, self._member_key(node, env))
        self.throw_error("SyntaxError", "invalid target")

    def _write_target(self, node: Node, value: Any, env: Environment) -> None:
        if node.type == "Identifier":
            found = env.lookup_env(node.name)
            if found is not None:
                found.vars[node.name] = value
            else:
                self.global_env.vars[node.name] = value  # implicit global
            return
        if node.type == "MemberExpression":
            obj = self.eval_expression(node.object, env)
            self.set_member(obj, self._member_key(node, env), value)
            return
        self.throw_error("SyntaxError", "invalid assignment target")

    def _assign_target(self, node: Node, value: Any, env: Environment) -> None:
        if node.type == "ArrayPattern":
            self._bind_pattern(node, value, env, declare=False)
        else:
            self._write_target(node, value, env)

    def _bind_pattern(self, target: Node, value: Any, env: Environment, declare: bool) -> None:
        if target.type == "Identifier":
            if declare:
                found = env.lookup_env(target.name)
                if found is not None:
                    found.vars[target.name] = value
                else:
                    env.vars[target.name] = value
            else:
                self._write_target(target, value, env)
            return
        if target.type == "ArrayPattern":
            for i, el in enumerate(target.elements):
                if el is None:
                    continue
                item = self.get_member(value, str(i)) if not isinstance(value, JSArray) else (
                    value.elements[i] if i < len(value.elements) else UNDEFINED
                )
                self._bind_pattern(el, item, env, declare)
            return
        self._write_target(target, value, env)

    def _eval_assignment(self, node: Node, env: Environment) -> Any:
        op = node.operator
        if op == "=":
            value = self.eval_expression(node.right, env)
            self._assign_target(node.left, value, env)
            return value
        old = self._read_target(node.left, env)
        right = self.eval_expression(node.right, env)
        value = self.binary_op(op[:-1], old, right)
        self._write_target(node.left, value, env)
        return value

    def binary_op(self, op: str, left: Any, right: Any) -> Any:
        if op == "+":
            lp = to_primitive(left, "default", self)
            rp = to_primitive(right, "default", self)
            if isinstance(lp, str) or isinstance(rp, str):
                return to_string(lp, self) + to_string(rp, self)
            return to_number(lp, self) + to_number(rp, self)
        if op == "-":
            return to_number(left, self) - to_number(right, self)
        if op == "*":
            return to_number(left, self) * to_number(right, self)
        if op == "/":
            ln, rn = to_number(left, self), to_number(right, self)
            if rn == 0:
                if ln == 0 or math.isnan(ln):
                    return float("nan")
                sign = 1.0 if (ln > 0) == (math.copysign(1.0, rn) > 0) else -1.0
                return sign * float("inf")
            return ln / rn
        if op == "%":
            ln, rn = to_number(left, self), to_number(right, self)
            if rn == 0 or math.isnan(ln) or math.isnan(rn) or math.isinf(ln):
                return float("nan")
            if math.isinf(rn):
                return ln
            return math.fmod(ln, rn)
        if op == "**":
            return bi._safe_pow(to_number(left, self), to_number(right, self))
        if op in ("==", "!="):
            eq = abstract_equals(left, right, self)
            return eq if op == "==" else not eq
        if op in ("===", "!=="):
            eq = strict_equals(left, right)
            return eq if op == "===" else not eq
        if op in ("<", ">", "<=", ">="):
            lp = to_primitive(left, "number", self)
            rp = to_primitive(right, "number", self)
            if isinstance(lp, str) and isinstance(rp, str):
                if op == "<":
                    return lp < rp
                if op == ">":
                    return lp > rp
                if op == "<=":
                    return lp <= rp
                return lp >= rp
            ln, rn = to_number(lp, self), to_number(rp, self)
            if math.isnan(ln) or math.isnan(rn):
                return False
            if op == "<":
                return ln < rn
            if op == ">":
                return ln > rn
            if op == "<=":
                return ln <= rn
            return ln >= rn
        if op == "&":
            return float(to_int32(left, self) & to_int32(right, self))
        if op == "|":
            return float(_as_int32(to_int32(left, self) | to_int32(right, self)))
        if op == "^":
            return float(_as_int32(to_int32(left, self) ^ to_int32(right, self)))
        if op == "<<":
            return float(_as_int32(to_int32(left, self) << (to_uint32(right, self) & 31)))
        if op == ">>":
            return float(to_int32(left, self) >> (to_uint32(right, self) & 31))
        if op == ">>>":
            return float(to_uint32(left, self) >> (to_uint32(right, self) & 31))
        if op == "in":
            key = to_string(left, self)
            if isinstance(right, JSArray):
                return (key.isdigit() and int(key) < len(right.elements)) or right.has_own(key)
            if isinstance(right, JSObject):
                return right.has_own(key)
            if isinstance(right, (JSFunction, NativeFunction)):
                return key in right.props
            self.throw_error("TypeError", "'in' on non-object")
        if op == "instanceof":
            if not is_callable(right):
                self.throw_error("TypeError", "right-hand side is not callable")
            name = getattr(right, "name", "")
            if name == "Array":
                return isinstance(left, JSArray)
            if name == "RegExp":
                return isinstance(left, JSRegExp)
            if name == "Function":
                return is_callable(left)
            if name == "Object":
                return isinstance(left, (JSObject, JSFunction, NativeFunction))
            if isinstance(left, JSObject):
                proto = right.props.get("prototype") if hasattr(right, "props") else None
                return proto is not None and left.props.get("__proto__") is proto
            return False
        raise ValueError(f"unknown binary operator {op}")

    # -- helpers used by coercion ----------------------------------------

    def array_join(self, arr: JSArray, sep: str) -> str:
        self.step()
        parts = []
        for el in arr.elements:
            if el is UNDEFINED or el is NULL:
                parts.append("")
            else:
                parts.append(to_string(el, self))
        return sep.join(parts)

    def function_source(self, fn: Any) -> str:
        if isinstance(fn, NativeFunction):
            return f"function {fn.name}() {{ [native code] }}"
        if fn.from_code_string is not None:
            params = ",".join(fn.params)
            return f"function anonymous({params}\n) {{\n{fn.from_code_string}\n}}"
        node = Node(
            "FunctionExpression", None,
            id=None if not fn.name else Node("Identifier", None, name=fn.name),
            params=[Node("Identifier", None, name=p) for p in fn.params],
            body=fn.body,
        )
        return print_source(node)


_NO_VALUE = object()


def _as_int32(n: int) -> int:
    n &= 0xFFFFFFFF
    if n >= 0x80000000:
        n -= 0x100000000
    return n


def _pattern_names(node: Node) -> list[str]:
    if node.type == "Identifier":
        return [node.name]
    if node.type == "ArrayPattern":
        out = []
        for el in node.elements:
            if el is not None:
                out.extend(_pattern_names(el))
        return out
    return []


def _script_bodies(html: str) -> list[str]:
    import re as _re
    return [
        m.group(1)
        for m in _re.finditer(r"<script\b[^>]*>(.*?)</script", html, _re.IGNORECASE | _re.DOTALL)
    ]
