"""Sandbox isolation, budgets, risk screening, and sink capture."""

from __future__ import annotations

import pytest

from conftest import TECHNIQUE_FIXTURES, fixture_text
from jsdeob.interp.interpreter import EvalBudget
from jsdeob.interp.sandbox import SandboxEnv, assess_risk, evaluate
from jsdeob.interp.values import CapturedCode
from jsdeob.parser import parse


def run(source: str, budget: EvalBudget = None, **env_kw):
    program, diags = parse(source)
    assert not any(d.kind == "lexical" for d in diags)
    return evaluate(program, SandboxEnv(**env_kw), budget)


# -- budgets ---------------------------------------------------------------

def test_infinite_loop_hits_budget():
    out = run(fixture_text("bombs/loop.js"), EvalBudget(max_steps=50_000))
    assert out.status == "error-budget"


def test_deep_recursion_hits_budget():
    out = run(fixture_text("bombs/recursion.js"))
    assert out.status == "error-budget"


def test_heap_bomb_hits_budget():
    out = run(fixture_text("bombs/heap.js"),
              EvalBudget(max_steps=10_000_000, max_heap_cells=20_000))
    assert out.status == "error-budget"


def test_step_counter_increases():
    short = run("1 + 1;")
    longer = run("var t = 0; for (var i = 0; i < 100; i++) t += i;")
    assert 0 < short.steps_used < longer.steps_used


# -- blocked and stubbed environment ---------------------------------------

def test_blocked_names():
    for name in ("require", "process"):
        out = run(f"{name}('x');")
        assert out.status in ("error-blocked", "error-runtime"), name


def test_stub_globals_inert():
    out = run("navigator.platform;")
    assert out.status == "value" and out.value == "Win32"
    out = run("navigator.platform;", platform="MacIntel")
    assert out.status == "value" and out.value == "MacIntel"


def test_console_recorded_not_printed(capsys):
    out = run("console.log('quiet');")
    assert ("log", "quiet") in out.console
    assert capsys.readouterr().out == ""


def test_math_random_deterministic():
    a = run("Math.random() + ',' + Math.random();")
    b = run("Math.random() + ',' + Math.random();")
    assert a.status == b.status == "value"
    assert a.value == b.value


def test_determinism_full_outcomes():
    src = fixture_text("t18.js")
    a = run(src, follow_captures=True)
    b = run(src, follow_captures=True)
    assert a.status == b.status
    assert a.console == b.console


# -- sink capture ----------------------------------------------------------

def test_eval_sink_captured_not_executed():
    out = run("eval('hostEscape()');")
    assert out.status == "captured"
    assert isinstance(out.value, CapturedCode)
    assert out.value.source == "hostEscape()"


def test_function_ctor_single_return_evaluates():
    out = run("Function('return 42')();")
    assert out.status == "value" and out.value == 42


def test_function_ctor_multi_statement_captured():
    out = run("Function('var a = 1; sideEffect(a);')();")
    assert out.status == "captured"
    assert "sideEffect" in out.value.source


def test_string_timer_sink_captured():
    out = run("setTimeout('tick()', 10);")
    assert out.status == "captured"
    assert out.value.source == "tick()"


def test_follow_captures_actually_runs():
    out = run("eval('console.log(\"ran\")');", follow_captures=True)
    assert out.status == "value"
    assert ("log", "ran") in out.console


# -- host isolation --------------------------------------------------------

def test_no_host_operations_across_corpus(monkeypatch):
    """The interpreter must never touch files, sockets, or subprocesses."""
    import builtins
    import socket
    import subprocess

    def forbidden(*args, **kwargs):
        raise AssertionError("host operation attempted from sandbox")

    # Fixture text is read and parsed before the patch; only interpretation
    # runs with host primitives forbidden.
    programs = []
    for name in TECHNIQUE_FIXTURES:
        program, _ = parse(fixture_text(name))
        programs.append(program)

    monkeypatch.setattr(builtins, "open", forbidden)
    monkeypatch.setattr(socket, "socket", forbidden)
    monkeypatch.setattr(subprocess, "Popen", forbidden)
    for program in programs:
        evaluate(program, SandboxEnv(follow_captures=True))


# -- risk assessment -------------------------------------------------------

def test_risk_flags_rotation_keywords():
    program, _ = parse(fixture_text("t18.js"))
    report = assess_risk(program)
    assert report.risky
    assert any("push" in t or "eval" in t for t in report.triggers)


def test_risk_clean_expression():
    program, _ = parse("1 + 1;")
    assert not assess_risk(program).risky


def test_risk_flags_cycles():
    program, _ = parse(
        "function f() { return g(); } function g() { return f(); } f();"
    )
    report = assess_risk(program)
    assert report.has_cycle and report.risky


def test_risk_orders_dependencies():
    program, _ = parse(
        "function a() { return b(); } function b() { return 1; } a();"
    )
    report = assess_risk(program)
    order = report.dependency_order
    assert order.index("b") < order.index("a")
