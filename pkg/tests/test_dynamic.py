"""Dynamic handoff: marked-site resolution, sink capture splicing, cleanup."""

from __future__ import annotations

from jsdeob.ast_nodes import MARK_CAN_TRANSFORM, MARK_DYNAMIC_ORIGIN, walk
from jsdeob.dynamic import (
    cleanup_dead_machinery,
    integrate_result,
    resolve_marked,
    resolve_sinks,
)
from jsdeob.interp.sandbox import EvalOutcome, SandboxEnv, evaluate
from jsdeob.interp.values import JSArray
from jsdeob.parser import parse
from jsdeob.printer import print_source


def test_integrate_string_value():
    node = integrate_result(EvalOutcome("value", "Hello World"))
    assert node.type == "Literal" and node.value == "Hello World"
    assert MARK_DYNAMIC_ORIGIN in node.marks


def test_integrate_array_value():
    node = integrate_result(EvalOutcome("value", JSArray([1.0, "a"])))
    assert node.type == "ArrayExpression"
    assert [e.value for e in node.elements] == [1.0, "a"]


def test_integrate_error_outcome_is_none():
    assert integrate_result(EvalOutcome("error-runtime", reason="boom")) is None


def test_integrate_captured_recursively_cleans():
    from jsdeob.interp.values import CapturedCode
    outcome = EvalOutcome("captured", CapturedCode("var x = 1 + 1; use(x);", "eval"))
    stmts = integrate_result(outcome)
    assert isinstance(stmts, list)
    text = "\n".join(print_source(s) for s in stmts)
    assert "use(2)" in text or "var x = 2" in text
    assert all(MARK_DYNAMIC_ORIGIN in s.marks for s in stmts)


def test_resolve_marked_uses_dependency_preamble():
    src = (
        "var table = ['x', 'Hello'];"
        "function d(i) { return table[i]; }"
        "use(d(1));"
    )
    program, _ = parse(src)
    # Mark the call the way a failed static pass would.
    for node in walk(program):
        if node.type == "CallExpression" and node.callee.type == "Identifier" \
                and node.callee.name == "d":
            node.mark(MARK_CAN_TRANSFORM)
    program, changes = resolve_marked(program)
    assert changes == 1
    assert 'use("Hello")' in print_source(program)


def test_resolve_marked_clears_marks_on_failure():
    program, _ = parse("use(mystery(1));")
    for node in walk(program):
        if node.type == "CallExpression" and node.callee.type == "Identifier" \
                and node.callee.name == "mystery":
            node.mark(MARK_CAN_TRANSFORM)
    program, changes = resolve_marked(program)
    assert changes == 0
    assert "mystery(1)" in print_source(program)


def test_resolve_sinks_splices_eval_payload():
    program, _ = parse("var code = 'doWork(1 + 2);'; eval(code);")
    program, changes = resolve_sinks(program)
    assert changes == 1
    out = print_source(program)
    assert "eval" not in out
    assert "doWork(3);" in out


def test_resolve_sinks_constructor_soup():
    src = (
        "var $ = {};"
        "var F = $['constructor']['constructor'];"
        "F('marker(7);')();"
    )
    program, _ = parse(src)
    program, changes = resolve_sinks(program)
    assert changes >= 1
    assert "marker(7);" in print_source(program)


def test_cleanup_drops_rotator_and_table():
    src = (
        "var _0xt = ['a', 'b'];"
        "(function(arr, n) { while (n--) { arr.push(arr.shift()); } })(_0xt, 3);"
        "console.log('done');"
    )
    program, _ = parse(src)
    program, removed = cleanup_dead_machinery(program)
    out = print_source(program)
    assert removed >= 1
    assert "_0xt" not in out
    assert "console.log" in out


def test_cleanup_keeps_live_table():
    src = "var t = ['a']; use(t[0]);"
    program, _ = parse(src)
    program, removed = cleanup_dead_machinery(program)
    assert removed == 0
    assert "var t" in print_source(program)


def test_cleanup_drops_write_only_chain():
    src = (
        "var acc = '';"
        "acc = acc + 'x';"
        "acc = acc + 'y';"
        "real();"
    )
    program, _ = parse(src)
    program, removed = cleanup_dead_machinery(program)
    out = print_source(program)
    assert "acc" not in out
    assert "real();" in out
