"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from jsdeob.interp.sandbox import EvalOutcome, SandboxEnv, evaluate
from jsdeob.parser import parse

FIXTURES = Path(__file__).parent / "fixtures"

TECHNIQUE_FIXTURES = [f"t{i:02d}.js" for i in range(20)]


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def run_js(source: str, follow_captures: bool = True) -> EvalOutcome:
    """Execute a full script in the sandbox and return its outcome.

    follow_captures makes eval/Function sinks actually run their payload so
    obfuscated fixtures produce their observable behavior.
    """
    program, diagnostics = parse(source)
    assert not any(d.kind == "lexical" for d in diagnostics), diagnostics
    return evaluate(program, SandboxEnv(follow_captures=follow_captures))


def observable(outcome: EvalOutcome) -> tuple:
    """The behavior we compare across deobfuscation: console calls plus the
    script completion value rendered as text."""
    from jsdeob.interp.coerce import to_string
    from jsdeob.interp.values import UNDEFINED

    assert outcome.status == "value", (outcome.status, outcome.reason)
    completion = None
    if outcome.value is not UNDEFINED and outcome.value is not None:
        completion = to_string(outcome.value)
    return tuple(outcome.console), completion


@pytest.fixture(scope="session")
def coercion_cases() -> list[dict]:
    return json.loads((FIXTURES / "coercion_cases.json").read_text())
