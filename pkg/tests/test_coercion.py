"""Coercion conformance against reference-engine fixtures.

The battery in fixtures/coercion_cases.json was produced once by running
every expression through a reference ECMAScript engine and freezing the
typeof plus String() rendering of each result.
"""

from __future__ import annotations

import math

from jsdeob.interp.sandbox import SandboxEnv, evaluate
from jsdeob.interp.values import NULL, UNDEFINED
from jsdeob.parser import parse


def reference_repr(value) -> tuple[str, str]:
    """Mirror the oracle encoding: (typeof, String(value))."""
    if value is UNDEFINED:
        return "undefined", "undefined"
    if value is NULL:
        return "object", "null"
    if isinstance(value, bool):
        return "boolean", "true" if value else "false"
    if isinstance(value, (int, float)):
        x = float(value)
        if math.isnan(x):
            return "number", "NaN"
        if x == 0 and math.copysign(1, x) < 0:
            return "number", "-0"
        if math.isinf(x):
            return "number", "Infinity" if x > 0 else "-Infinity"
        if x == int(x) and abs(x) < 1e21:
            return "number", str(int(x))
        return "number", repr(x)
    if isinstance(value, str):
        return "string", value
    return "?", repr(value)


def test_battery_size(coercion_cases):
    assert len(coercion_cases) >= 50


def test_battery_matches_reference(coercion_cases):
    mismatches = []
    for case in coercion_cases:
        program, diags = parse(case["src"] + ";")
        assert not diags, case["src"]
        outcome = evaluate(program.body[0].expression, SandboxEnv())
        if outcome.status != "value":
            mismatches.append((case["src"], outcome.status, outcome.reason))
            continue
        got = reference_repr(outcome.value)
        want = (case["type"], case["repr"])
        if case["type"] == "error" or got != want:
            mismatches.append((case["src"], got, want))
    assert not mismatches, mismatches


def run_expr(src: str):
    program, diags = parse(src + ";")
    assert not diags
    outcome = evaluate(program.body[0].expression, SandboxEnv())
    assert outcome.status == "value", (outcome.status, outcome.reason)
    return outcome.value


def test_named_paper_examples():
    assert run_expr('"5" + 3') == "53"
    assert run_expr('"5" - 3') == 2
    assert run_expr("!![] + []") == "true"
    assert run_expr("+!![]") == 1
    assert run_expr("(![] + [])[+!![]]") == "a"


def test_to_primitive_uses_custom_valueof():
    assert run_expr("({valueOf: function() { return 7; }}) + 1") == 8


def test_to_primitive_falls_back_to_tostring():
    assert run_expr("({toString: function() { return 'x'; }}) + '!'") == "x!"
