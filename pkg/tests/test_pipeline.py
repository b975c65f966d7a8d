"""Pipeline scheduling: fixpoint behavior, idempotence, determinism."""

from __future__ import annotations

import pytest

from conftest import TECHNIQUE_FIXTURES, fixture_text
from jsdeob.engine import deobfuscate
from jsdeob.parser import parse
from jsdeob.passes import PassConfig
from jsdeob.pipeline import run_pipeline
from jsdeob.printer import print_source


def test_minimal_program_is_fixpoint_immediately():
    program, _ = parse('console.log("hi");\nwork(input);')
    before = print_source(program)
    program, trace = run_pipeline(program)
    assert print_source(program) == before
    assert trace.total_changes == 0
    assert len(trace.iterations) == 1


def test_iteration_cap_respected():
    program, _ = parse(fixture_text("t18.js"))
    _, trace = run_pipeline(program, config=PassConfig(max_iterations=10))
    assert len(trace.iterations) <= 10


def test_last_iteration_makes_no_changes():
    program, _ = parse(fixture_text("t11.js"))
    _, trace = run_pipeline(program)
    assert trace.iterations[-1].total == 0


def test_disabled_pass_never_runs():
    config = PassConfig(enabled=frozenset({"fold_constants"}))
    program, _ = parse("var x = 1 + 1; var t = ['a']; use(t[0]);")
    program, trace = run_pipeline(program, config=config, enable_dynamic=False)
    out = print_source(program)
    assert "var x = 2;" in out
    assert "t[0]" in out  # table resolution was off
    for it in trace.iterations:
        assert set(it.pass_changes) <= {"fold_constants"}


@pytest.mark.parametrize("name", TECHNIQUE_FIXTURES)
def test_second_run_is_identity(name):
    first = deobfuscate(fixture_text(name), enable_humanize=False)
    second = deobfuscate(first.text, enable_humanize=False)
    assert second.text == first.text
    for trace in second.traces:
        assert trace.total_changes == 0


@pytest.mark.parametrize("name", ["t02.js", "t11.js", "t15.js", "t18.js"])
def test_repeated_runs_deterministic(name):
    src = fixture_text(name)
    a = deobfuscate(src, enable_humanize=False)
    b = deobfuscate(src, enable_humanize=False)
    assert a.text == b.text
