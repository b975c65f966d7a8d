"""Risk assessment and the evaluate() entry point around the interpreter."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from ..ast_nodes import Node, walk
from .interpreter import (
    BlockedAccess,
    BudgetExceeded,
    CaptureSignal,
    Environment,
    EvalBudget,
    Interpreter,
    JSThrow,
)
from .coerce import CoercionError, to_string
from .values import CapturedCode, UNDEFINED


@dataclass
class SandboxEnv:
    platform: str = "Win32"
    referrer: str = ""
    follow_captures: bool = False
    # Extra bindings injected before evaluation (name -> SandboxValue or
    # AST FunctionDeclaration/VariableDeclaration nodes to pre-execute).
    preamble: list[Node] = field(default_factory=list)


@dataclass
class RiskReport:
    risky: bool
    triggers: list[str] = field(default_factory=list)
    dependency_order: list[str] = field(default_factory=list)
    has_cycle: bool = False


@dataclass
class EvalOutcome:
    status: str  # value | captured | error-budget | error-runtime | error-blocked
    value: Any = None
    steps_used: int = 0
    reason: str = ""
    console: list[tuple[str, str]] = field(default_factory=list)


_RISK_KEYWORDS = ("push", "shift", "eval", "await")


def assess_risk(fragment: Node) -> RiskReport:
    """Keyword and dependency screening before execution.

    Matches the dangerous-keyword combinations (push+shift rotation, eval,
    await) and topologically orders locally declared functions by their
    call dependencies, flagging cycles.
    """
    triggers: list[str] = []
    seen: set[str] = set()
    for node in walk(fragment):
        if node.type == "Identifier" and node.name in _RISK_KEYWORDS:
            seen.add(node.name)
        elif node.type == "Literal" and isinstance(node.get("value"), str):
            if node.value in _RISK_KEYWORDS:
                seen.add(node.value)
        elif node.type == "OpaqueStatement" and "await" in node.raw:
            seen.add("await")
    if "push" in seen and "shift" in seen:
        triggers.append("push+shift")
    if "eval" in seen:
        triggers.append("eval")
    if "await" in seen:
        triggers.append("await")

    # Call-dependency graph over locally declared functions.
    functions: dict[str, Node] = {}
    for node in walk(fragment):
        if node.type == "FunctionDeclaration":
            functions[node.id.name] = node
        elif (
            node.type == "VariableDeclarator"
            and node.id.type == "Identifier"
            and node.init is not None
            and node.init.type == "FunctionExpression"
        ):
            functions[node.id.name] = node.init
    graph: dict[str, set[str]] = {}
    for name, fn in functions.items():
        deps = set()
        for inner in walk(fn.body):
            if inner.type == "CallExpression" and inner.callee.type == "Identifier":
                if inner.callee.name in functions and inner.callee.name != name:
                    deps.add(inner.callee.name)
        graph[name] = deps
    order, has_cycle = _toposort(graph)

    return RiskReport(
        risky=bool(triggers) or has_cycle,
        triggers=triggers,
        dependency_order=order,
        has_cycle=has_cycle,
    )


def _toposort(graph: dict[str, set[str]]) -> tuple[list[str], bool]:
    order: list[str] = []
    state: dict[str, int] = {}  # 0 unseen, 1 in progress, 2 done
    has_cycle = False

    def visit(name: str) -> None:
        nonlocal has_cycle
        mark = state.get(name, 0)
        if mark == 1:
            has_cycle = True
            return
        if mark == 2:
            return
        state[name] = 1
        for dep in sorted(graph.get(name, ())):
            visit(dep)
        state[name] = 2
        order.append(name)

    for name in graph:
        visit(name)
    return order, has_cycle


def evaluate(
    fragment: Node,
    env: Optional[SandboxEnv] = None,
    budget: Optional[EvalBudget] = None,
) -> EvalOutcome:
    """Interpret a fragment under full isolation and budgets.

    The fragment may be an expression node, a statement, or a Program.
    Risky fragments (per assess_risk) run with all budgets quartered.
    """
    env = env or SandboxEnv()
    budget = budget or EvalBudget()
    report = assess_risk(fragment)
    if "await" in report.triggers:
        return EvalOutcome("error-runtime", reason="unsupported construct: await")
    if report.risky:
        budget = budget.quartered()

    interp = Interpreter(
        budget=budget,
        follow_captures=env.follow_captures,
        platform=env.platform,
        referrer=env.referrer,
    )
    # The interpreter spends many host frames per guest call; give the host
    # stack enough headroom that the guest call-depth budget fires first.
    import sys
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 20_000))
    try:
        for pre in env.preamble:
            _run_node(interp, pre)
        value = _run_node(interp, fragment)
        return EvalOutcome("value", value, interp.steps, console=interp.console_log)
    except CaptureSignal as sig:
        return EvalOutcome(
            "captured", CapturedCode(sig.source, sig.sink), interp.steps,
            console=interp.console_log,
        )
    except BudgetExceeded as exc:
        return EvalOutcome("error-budget", reason=exc.reason, steps_used=interp.steps,
                           console=interp.console_log)
    except BlockedAccess as exc:
        return EvalOutcome("error-blocked", reason=str(exc), steps_used=interp.steps,
                           console=interp.console_log)
    except RecursionError:
        return EvalOutcome("error-budget", reason="call depth exceeded",
                           steps_used=interp.steps, console=interp.console_log)
    except JSThrow as exc:
        return EvalOutcome("error-runtime", reason=_describe_throw(interp, exc.value),
                           steps_used=interp.steps, console=interp.console_log)
    except (ValueError, TypeError, AttributeError, KeyError,
            IndexError, OverflowError, CoercionError) as exc:
        return EvalOutcome("error-runtime", reason=f"{type(exc).__name__}: {exc}",
                           steps_used=interp.steps, console=interp.console_log)
    finally:
        sys.setrecursionlimit(old_limit)


def _run_node(interp: Interpreter, node: Node) -> Any:
    import time
    interp.deadline = time.monotonic() + interp.budget.wall_clock_ms / 1000.0
    if node.type == "Program":
        return interp.run_program(node, fresh_deadline=False)
    if node.type in ("FunctionDeclaration",):
        interp._hoist([node], interp.global_env)
        return UNDEFINED
    from ..ast_nodes import STATEMENT_TYPES
    if node.type in STATEMENT_TYPES:
        interp._hoist([node], interp.global_env)
        value = interp.exec_statement(node, interp.global_env)
        from .interpreter import _NO_VALUE
        return UNDEFINED if value is _NO_VALUE else value
    return interp.eval_expression(node, interp.global_env)


def _describe_throw(interp: Interpreter, value: Any) -> str:
    try:
        from .values import JSObject
        if isinstance(value, JSObject):
            name = value.props.get("name", "Error")
            msg = value.props.get("message", "")
            return f"{name}: {msg}"
        return to_string(value, interp)
    except Exception:
        return "uncaught exception"
