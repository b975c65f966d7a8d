"""Parsing, tolerant recovery, and print/reparse round-trips."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import TECHNIQUE_FIXTURES, fixture_text
from jsdeob.ast_nodes import structurally_equal, walk
from jsdeob.parser import parse
from jsdeob.printer import print_source


def roundtrip(source: str) -> None:
    program, diags = parse(source)
    assert not diags, diags
    printed = print_source(program)
    reparsed, rediags = parse(printed)
    assert not rediags, (printed, rediags)
    assert structurally_equal(program, reparsed), printed


@pytest.mark.parametrize("source", [
    "var x = 1, y = [1, 2, {a: 3}];",
    "function f(a, b) { return a + b * 2; }",
    "if (a) { b(); } else if (c) d(); else e();",
    "for (var i = 0; i < 10; i++) total += i;",
    "while (x) { if (y) break; else continue; }",
    "do { x--; } while (x > 0);",
    "switch (v) { case 1: a(); break; default: b(); }",
    "try { risky(); } catch (e) { log(e); } finally { done(); }",
    "a = b ? c : d || e && f;",
    "x = -y + +z - ~w + !v;",
    "obj.prop['key'] = fn(1)(2)[3];",
    "var r = /a[b-z]+/gi;",
    "new Date(); new Foo(1, 2);",
    "(function() { return 1; })();",
    "a = (1, 2, 3);",
    "for (var k in obj) { keys.push(k); }",
    "label: for (;;) { break label; }",
    "throw new Error('nope');",
    "var s = 'it\\'s ' + \"fine\";",
    "x = typeof y === 'undefined' ? void 0 : y instanceof Foo;",
    "a = b << 2 >> 1 >>> 3 & 7 | 1 ^ 2;",
    "delete obj.prop; x = obj['k'] in obj;",
])
def test_statement_roundtrip(source):
    roundtrip(source)


@pytest.mark.parametrize("name", TECHNIQUE_FIXTURES + ["baseline.js"])
def test_fixture_roundtrip(name):
    source = fixture_text(name)
    program, diags = parse(source)
    printed = print_source(program)
    reparsed, rediags = parse(printed)
    assert not any(d.kind == "lexical" for d in rediags)
    assert structurally_equal(program, reparsed)


def test_precedence_preserved():
    program, _ = parse("x = (a + b) * c;")
    assert "(a + b) * c" in print_source(program)
    program, _ = parse("x = a + b * c;")
    assert "a + b * c" in print_source(program)


def test_tolerant_mode_recovers():
    program, diags = parse("var a = 1; ]] garbage %%; var b = 2;")
    assert any(d.kind in ("recovery", "lexical") for d in diags)
    names = [n.name for n in walk(program) if n.type == "Identifier"]
    assert "a" in names and "b" in names


def test_recovered_statements_reprint_verbatim_content():
    source = "var a = 1; @@broken@@; var b = 2;"
    program, diags = parse(source)
    assert diags
    printed = print_source(program)
    reparsed, _ = parse(printed)
    names = [n.name for n in walk(reparsed) if n.type == "Identifier"]
    assert "a" in names and "b" in names


def test_strict_mode_raises_on_garbage():
    from jsdeob.parser import ParseError
    with pytest.raises(ParseError):
        parse("var a = ;;;===", mode="strict")


def test_empty_program():
    program, diags = parse("")
    assert program.type == "Program" and program.body == [] and not diags
    assert print_source(program) == ""


def test_automatic_semicolon_insertion():
    program, diags = parse("var a = 1\nvar b = 2\nreturn")
    kinds = [s.type for s in program.body]
    assert kinds[:2] == ["VariableDeclaration", "VariableDeclaration"]


def test_in_operator_parenthesized_in_for_init():
    roundtrip("for (var i = ('a' in o); i; ) { stop(); }")


_simple_expr = st.recursive(
    st.sampled_from(["1", "x", '"s"', "true", "null"]),
    lambda inner: st.builds(
        lambda a, op, b: f"({a} {op} {b})",
        inner, st.sampled_from(["+", "-", "*", "==", "&&"]), inner,
    ),
    max_leaves=8,
)


@settings(max_examples=60, deadline=None)
@given(_simple_expr)
def test_expression_roundtrip_property(expr):
    roundtrip(f"y = {expr};")
