"""Tokenizer behavior: classification, escapes, regex disambiguation."""

from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from jsdeob.lexer import tokenize


def kinds(source: str) -> list[tuple[str, object]]:
    tokens, errors = tokenize(source)
    assert not errors, errors
    return [(t.type, t.value) for t in tokens if t.type != "eof"]


def test_basic_statement():
    assert kinds("var x = 1;") == [
        ("keyword", "var"),
        ("ident", "x"),
        ("punct", "="),
        ("num", 1.0),
        ("punct", ";"),
    ]


def test_string_escapes():
    assert kinds(r'"a\x41B\n"') == [("str", "aAB\n")]
    assert kinds(r"'it\'s'") == [("str", "it's")]


def test_numeric_forms():
    assert kinds("0x10 0.5 1e3 2E-2") == [
        ("num", 16.0), ("num", 0.5), ("num", 1000.0), ("num", 0.02),
    ]


def test_regex_vs_division():
    out = kinds("a = b / c; x = /ab+/g;")
    assert ("punct", "/") in out
    assert ("regex", ("ab+", "g")) in out


def test_regex_after_operators_and_keywords():
    out = kinds("return /x/; y = 1 + /z/i;")
    regexes = [v for t, v in out if t == "regex"]
    assert regexes == [("x", ""), ("z", "i")]


def test_multichar_punctuators_longest_match():
    assert [v for _, v in kinds("a >>>= b >>> c >> d > e")] == [
        "a", ">>>=", "b", ">>>", "c", ">>", "d", ">", "e",
    ]


def test_comments_skipped():
    assert kinds("1 /* block */ + 2 // line\n + 3") == [
        ("num", 1.0), ("punct", "+"), ("num", 2.0), ("punct", "+"), ("num", 3.0),
    ]


def test_newline_before_flag():
    tokens, _ = tokenize("a\nb")
    b = [t for t in tokens if t.value == "b"][0]
    assert b.newline_before


def test_dollar_and_underscore_identifiers():
    assert kinds("$ _ $_ _0xabc") == [
        ("ident", "$"), ("ident", "_"), ("ident", "$_"), ("ident", "_0xabc"),
    ]


def test_unterminated_string_reports_error():
    tokens, errors = tokenize('"abc')
    assert errors


@given(st.text(alphabet=st.characters(whitelist_categories=("Ll", "Lu"),
                                      max_codepoint=0x7F), min_size=1, max_size=12))
def test_identifier_roundtrip(name):
    tokens, errors = tokenize(name)
    if name in ("var", "if", "in", "do", "for", "new", "try"):
        return
    assert not errors
    values = [t.value for t in tokens if t.type in ("ident", "keyword")]
    assert "".join(str(v) for v in values) == name
