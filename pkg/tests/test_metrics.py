"""Complexity metrics, entropy, technique detection, and fingerprints."""

from __future__ import annotations

import math
import re
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import TECHNIQUE_FIXTURES, fixture_text
from jsdeob.ast_nodes import walk
from jsdeob.metrics import (
    EntropyWeights,
    HalsteadMetrics,
    ast_entropy,
    detect_techniques,
    halstead,
    normalize_for_dedup,
    obfuscation_score,
    reduction_scores,
    text_entropy,
)
from jsdeob.parser import parse


# -- Halstead --------------------------------------------------------------

def counts(source: str) -> HalsteadMetrics:
    program, diags = parse(source)
    assert not diags
    return halstead(program)


def test_halstead_hand_counted_example():
    # a = b + 1;  operators: = + ;  operands: a b 1
    h = counts("a = b + 1;")
    assert (h.N1, h.N2) == (3, 3)
    assert (h.n1, h.n2) == (3, 3)
    assert h.length == 6


def test_halstead_empty_program():
    h = counts("")
    assert h.length == 0 and h.volume == 0.0 and h.effort == 0.0


def test_halstead_reformat_invariant():
    dense = counts("var x=1;function f(a){return a+x;}f(2);")
    spaced = counts("var x = 1;\nfunction f(a) {\n  return a + x;\n}\nf(2);\n")
    assert (dense.n1, dense.n2, dense.N1, dense.N2) == \
        (spaced.n1, spaced.n2, spaced.N1, spaced.N2)


def test_keywords_count_as_operators():
    h = counts("if (x) return y;")
    assert h.N1 >= 2  # if and return at minimum


def test_reduction_scores():
    before = HalsteadMetrics(4, 4, 100, 100)
    after = HalsteadMetrics(4, 4, 50, 50)
    red = reduction_scores(before, after)
    assert red.hlr == pytest.approx(0.5)
    assert not red.flagged


def test_reduction_zero_before_is_zero():
    red = reduction_scores(HalsteadMetrics(), HalsteadMetrics(1, 1, 1, 1))
    assert red.hlr == 0.0


def test_reduction_growth_flagged():
    red = reduction_scores(HalsteadMetrics(2, 2, 10, 10),
                           HalsteadMetrics(2, 2, 20, 20))
    assert red.hlr < 0 and red.flagged


# -- entropy oracles -------------------------------------------------------

def shannon_oracle(items) -> float:
    """Independent histogram entropy used to cross-check the library."""
    freq = Counter(items)
    total = sum(freq.values())
    if total == 0:
        return 0.0
    return -sum((c / total) * math.log2(c / total) for c in freq.values())


def test_text_entropy_matches_oracle_on_corpus():
    word_re = re.compile(r"[A-Za-z0-9_$]+")
    for name in TECHNIQUE_FIXTURES:
        src = fixture_text(name)
        h_char, h_word = text_entropy(src)
        assert h_char == pytest.approx(shannon_oracle(src), abs=1e-9)
        assert h_word == pytest.approx(shannon_oracle(word_re.findall(src)), abs=1e-9)


def test_text_entropy_degenerate_cases():
    assert text_entropy("") == (0.0, 0.0)
    h_char, _ = text_entropy("aaaa")
    assert h_char == 0.0
    h_char, _ = text_entropy("ab")
    assert h_char == pytest.approx(1.0)


def ast_entropy_oracle(program, weights: EntropyWeights):
    """Recompute the four structural distributions independently."""
    kinds, out_edges, degrees, depths = [], [], [], []

    def visit(node, depth, parent_edges):
        children = list(node.children())
        kinds.append(node.type)
        out_edges.append(len(children))
        degrees.append(len(children) + parent_edges)
        depths.append(depth)
        for child in children:
            visit(child, depth + 1, 1)

    visit(program, 0, 0)
    return (weights.w1 * shannon_oracle(kinds)
            + weights.w2 * shannon_oracle(out_edges)
            + weights.w3 * shannon_oracle(degrees)
            + weights.w4 * shannon_oracle(depths))


def test_ast_entropy_matches_oracle_on_corpus():
    weights = EntropyWeights()
    for name in TECHNIQUE_FIXTURES:
        program, _ = parse(fixture_text(name))
        report = ast_entropy(program)
        assert report.h_ast == pytest.approx(
            ast_entropy_oracle(program, weights), abs=1e-9), name


def test_entropy_weights_are_fixed_constants():
    w = EntropyWeights()
    assert (w.w1, w.w2, w.w3, w.w4) == (0.61, 0.79, 1.58, 1.02)


def test_entropy_components_nonnegative():
    program, _ = parse(fixture_text("t18.js"))
    report = ast_entropy(program)
    for value in (report.h_node_num, report.h_edge_num,
                  report.h_node_degree, report.h_node_depth):
        assert value >= 0.0
    assert report.h_text == report.h_char + report.h_word


@settings(max_examples=40, deadline=None)
@given(st.text(min_size=0, max_size=200))
def test_text_entropy_oracle_property(text):
    h_char, _ = text_entropy(text)
    assert h_char == pytest.approx(shannon_oracle(text), abs=1e-9)


# -- technique detection ---------------------------------------------------

@pytest.mark.parametrize("index", range(20))
def test_each_fixture_detects_its_own_technique(index):
    name = f"t{index:02d}.js"
    src = fixture_text(name)
    program, _ = parse(src)
    tags = detect_techniques(src, program)
    assert f"T{index}" in {t.id for t in tags}, sorted(t.id for t in tags)


def test_baseline_detects_nothing():
    src = fixture_text("baseline.js")
    program, _ = parse(src)
    tags = detect_techniques(src, program)
    assert tags == set()
    assert obfuscation_score(tags).value == 0


def test_category_points():
    from jsdeob.metrics import tag
    assert tag("T0").points == 1
    assert tag("T5").points == 2
    assert tag("T11").points == 3
    assert tag("T18").points == 4


def test_score_counts_each_technique_once():
    from jsdeob.metrics import tag
    tags = {tag("T0"), tag("T11"), tag("T18")}
    assert obfuscation_score(tags).value == 1 + 3 + 4


def test_score_maximum_is_46():
    from jsdeob.metrics import TECHNIQUE_CATEGORIES, tag
    all_tags = {tag(tid) for tid in TECHNIQUE_CATEGORIES}
    assert obfuscation_score(all_tags).value == 46


# -- dedup fingerprint -----------------------------------------------------

def test_fingerprint_ignores_whitespace():
    a = normalize_for_dedup("var x = 1;\nuse(x);")
    b = normalize_for_dedup("var x=1;use(x);")
    assert a == b


def test_fingerprint_neutralizes_string_content():
    a = normalize_for_dedup('send("alpha");')
    b = normalize_for_dedup('send("beta");')
    assert a == b


def test_fingerprint_distinguishes_structure():
    a = normalize_for_dedup("f(1);")
    b = normalize_for_dedup("f(1); g(2);")
    assert a != b


def test_fingerprint_is_sha256_hex():
    fp = normalize_for_dedup("x;")
    assert re.fullmatch(r"[0-9a-f]{64}", fp)
