"""Pass scheduling: fixed order, fixpoint iteration, dynamic handoff."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .ast_nodes import Node
from .interp.interpreter import EvalBudget
from .passes import (
    PASS_ORDER,
    PassConfig,
    eliminate_dead_code,
    fold_constants,
    inline_trivial_functions,
    normalize_member_access,
    resolve_string_constructions,
    resolve_string_tables,
    simplify_destructuring,
    unflatten_control_flow,
)
from .scopes import build_scopes

_PASSES: dict[str, Callable] = {
    "normalize_member_access": lambda p, s, c: normalize_member_access(p),
    "fold_constants": lambda p, s, c: fold_constants(p, s, c),
    "resolve_string_constructions": lambda p, s, c: resolve_string_constructions(p, s),
    "resolve_string_tables": lambda p, s, c: resolve_string_tables(p, s),
    "inline_trivial_functions": lambda p, s, c: inline_trivial_functions(p, s),
    "simplify_destructuring": lambda p, s, c: simplify_destructuring(p, s),
    "unflatten_control_flow": lambda p, s, c: unflatten_control_flow(p, s),
    "eliminate_dead_code": lambda p, s, c: eliminate_dead_code(p, s),
}


@dataclass
class IterationTrace:
    pass_changes: dict[str, int] = field(default_factory=dict)
    dynamic_changes: int = 0

    @property
    def total(self) -> int:
        return sum(self.pass_changes.values()) + self.dynamic_changes


@dataclass
class PipelineTrace:
    iterations: list[IterationTrace] = field(default_factory=list)
    sandbox_steps: int = 0

    @property
    def total_changes(self) -> int:
        return sum(it.total for it in self.iterations)


def run_pipeline(
    program: Node,
    config: Optional[PassConfig] = None,
    enable_dynamic: bool = True,
    budget: Optional[EvalBudget] = None,
    dynamic_depth: int = 0,
) -> tuple[Node, PipelineTrace]:
    """Run static passes to a fixpoint, interleaving dynamic resolution.

    Each iteration applies the full fixed pass order, then hands marked
    fragments and dynamic code sinks to the sandbox.  Stops when an
    iteration makes no changes or the iteration cap is reached.
    """
    config = config or PassConfig()
    trace = PipelineTrace()
    from .dynamic import (
        MAX_DYNAMIC_DEPTH,
        cleanup_dead_machinery,
        resolve_marked,
        resolve_sinks,
    )

    for _ in range(config.max_iterations):
        it = IterationTrace()
        for name in PASS_ORDER:
            if name not in config.enabled:
                continue
            scopes = build_scopes(program)
            program, n = _PASSES[name](program, scopes, config)
            it.pass_changes[name] = n
        if enable_dynamic and dynamic_depth < MAX_DYNAMIC_DEPTH:
            stats: dict = {}
            program, n = resolve_marked(program, dynamic_depth, budget, stats)
            it.dynamic_changes += n
            program, n = resolve_sinks(program, dynamic_depth, budget, stats)
            it.dynamic_changes += n
            program, n = cleanup_dead_machinery(program)
            it.dynamic_changes += n
            trace.sandbox_steps += stats.get("steps", 0)
        trace.iterations.append(it)
        if it.total == 0:
            break
    return program, trace
