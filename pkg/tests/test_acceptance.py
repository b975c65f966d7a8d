"""End-to-end acceptance gates for the deobfuscation engine.

Eight criteria, each standing alone:
  1. behavioral equivalence across the 20-technique corpus
  2. syntactic robustness on the corpus plus adversarial mutations
  3. Halstead length reduction thresholds
  4. entropy reduction plus oracle agreement
  5. coercion conformance battery
  6. sandbox safety under hostile inputs
  7. rename soundness after humanization
  8. idempotence and batch determinism
"""

from __future__ import annotations

import json
import math
import random
import re
import shutil
import time
from collections import Counter
from pathlib import Path

import pytest

from conftest import FIXTURES, TECHNIQUE_FIXTURES, fixture_text, observable, run_js
from jsdeob.ast_nodes import walk
from jsdeob.cli import main
from jsdeob.engine import deobfuscate
from jsdeob.interp.interpreter import EvalBudget
from jsdeob.interp.sandbox import SandboxEnv, evaluate
from jsdeob.metrics import (
    EntropyWeights,
    ast_entropy,
    halstead,
    reduction_scores,
    source_entropy,
    text_entropy,
)
from jsdeob.parser import parse
from jsdeob.scopes import build_scopes


def parse_strict_clean(source: str):
    program, diags = parse(source)
    assert not diags, diags
    return program


# -- criterion 1: taxonomy coverage ----------------------------------------

@pytest.mark.parametrize("name", TECHNIQUE_FIXTURES)
def test_1_behavioral_equivalence(name, tmp_path):
    src_path = tmp_path / name
    src_path.write_text(fixture_text(name))
    started = time.monotonic()
    code = main(["deobfuscate", str(src_path), "--model=none",
                 "--out-dir", str(tmp_path)])
    elapsed = time.monotonic() - started
    assert code == 0
    assert elapsed < 5.0, f"{name} took {elapsed:.2f}s"
    output = (tmp_path / f"{Path(name).stem}.deob.js").read_text()
    parse_strict_clean(output)
    assert observable(run_js(fixture_text(name))) == observable(run_js(output))


# -- criterion 2: syntactic robustness -------------------------------------

def adversarial_mutations(count: int = 50) -> list[str]:
    """Deterministic truncations and garbage injections over the corpus."""
    rng = random.Random(0x5EED)
    sources = [fixture_text(n) for n in TECHNIQUE_FIXTURES]
    garbage = ["]][[", "%%&&", "\x00\x01", "<<<>>>", "/*", '"unclosed',
               "};;;{", "\\u00zz", "function(", "0x"]
    mutations = []
    for i in range(count):
        base = sources[i % len(sources)]
        if i % 2 == 0:
            cut = rng.randrange(1, len(base))
            mutations.append(base[:cut])
        else:
            pos = rng.randrange(0, len(base))
            chunk = rng.choice(garbage)
            mutations.append(base[:pos] + chunk + base[pos:])
    return mutations


def test_2_robustness_corpus_and_mutations():
    inputs = [fixture_text(n) for n in TECHNIQUE_FIXTURES]
    inputs += adversarial_mutations(50)
    # Mutated inputs rarely resolve; a tight evaluation budget keeps the
    # crash-freedom check fast without weakening it.
    budget = EvalBudget(max_steps=200_000, wall_clock_ms=250)
    for i, source in enumerate(inputs):
        result = deobfuscate(source, enable_humanize=False,
                             budget=budget)  # must not raise
        reparsed, rediags = parse(result.text)
        assert reparsed.type == "Program", f"input {i}"
        assert not any(d.kind == "lexical" for d in rediags), f"input {i}"


# -- criterion 3: complexity reduction -------------------------------------

def hlr_for(name: str) -> float:
    src = fixture_text(name)
    before = halstead(parse(src)[0])
    result = deobfuscate(src, enable_humanize=False)
    after = halstead(parse_strict_clean(result.text))
    return reduction_scores(before, after).hlr


@pytest.mark.parametrize("name", ["t10.js", "t15.js", "t18.js"])
def test_3_heavy_encodings_reduce_by_half(name):
    assert hlr_for(name) >= 0.5


@pytest.mark.parametrize("name", [f"t{i:02d}.js" for i in range(11, 20)])
def test_3_semantic_and_multilayer_reduce(name):
    assert hlr_for(name) > 0


# -- criterion 4: entropy reduction ----------------------------------------

ENTROPY_EXEMPT = {"t00.js", "t19.js"}  # renaming-dominated shapes


def test_4_entropy_strictly_decreases():
    decreased = 0
    offenders = []
    for name in TECHNIQUE_FIXTURES:
        src = fixture_text(name)
        result = deobfuscate(src, enable_humanize=False)
        before = source_entropy(src, parse(src)[0])
        after = source_entropy(result.text, parse_strict_clean(result.text))
        if after.h_text < before.h_text and after.h_ast < before.h_ast:
            decreased += 1
        elif name not in ENTROPY_EXEMPT:
            offenders.append(name)
    assert decreased >= 18, offenders


def shannon_oracle(items) -> float:
    freq = Counter(items)
    total = sum(freq.values())
    if total == 0:
        return 0.0
    return -sum((c / total) * math.log2(c / total) for c in freq.values())


def test_4_entropy_matches_independent_oracles():
    word_re = re.compile(r"[A-Za-z0-9_$]+")
    weights = EntropyWeights()
    for name in TECHNIQUE_FIXTURES:
        src = fixture_text(name)
        h_char, h_word = text_entropy(src)
        assert abs(h_char - shannon_oracle(src)) < 1e-9
        assert abs(h_word - shannon_oracle(word_re.findall(src))) < 1e-9

        program = parse(src)[0]
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
        expected = (weights.w1 * shannon_oracle(kinds)
                    + weights.w2 * shannon_oracle(out_edges)
                    + weights.w3 * shannon_oracle(degrees)
                    + weights.w4 * shannon_oracle(depths))
        assert abs(ast_entropy(program).h_ast - expected) < 1e-9, name


# -- criterion 5: coercion conformance -------------------------------------

def test_5_coercion_battery_exact(coercion_cases):
    from test_coercion import reference_repr

    assert len(coercion_cases) >= 50
    for case in coercion_cases:
        program = parse_strict_clean(case["src"] + ";")
        outcome = evaluate(program.body[0].expression, SandboxEnv())
        assert outcome.status == "value", case["src"]
        assert reference_repr(outcome.value) == (case["type"], case["repr"]), case["src"]


# -- criterion 6: sandbox safety -------------------------------------------

@pytest.mark.parametrize("bomb,budget", [
    ("bombs/loop.js", EvalBudget(max_steps=100_000)),
    ("bombs/recursion.js", EvalBudget()),
    ("bombs/heap.js", EvalBudget(max_steps=10_000_000, max_heap_cells=50_000)),
])
def test_6_bombs_terminate_with_budget_error(bomb, budget):
    program, _ = parse(fixture_text(bomb))
    started = time.monotonic()
    outcome = evaluate(program, SandboxEnv(), budget)
    elapsed = time.monotonic() - started
    assert outcome.status == "error-budget"
    assert elapsed < budget.wall_clock_ms / 1000 + 2.0  # cap plus slack


def test_6_no_host_operations_full_corpus(monkeypatch):
    import builtins
    import socket
    import subprocess

    def forbidden(*args, **kwargs):
        raise AssertionError("host operation from sandbox")

    programs = [parse(fixture_text(n))[0] for n in TECHNIQUE_FIXTURES]
    monkeypatch.setattr(builtins, "open", forbidden)
    monkeypatch.setattr(socket, "socket", forbidden)
    monkeypatch.setattr(socket, "create_connection", forbidden)
    monkeypatch.setattr(subprocess, "Popen", forbidden)
    for program in programs:
        evaluate(program, SandboxEnv(follow_captures=True))


# -- criterion 7: rename soundness -----------------------------------------

def binding_signature(source: str) -> list:
    """Canonical form of the binding-reference graph: every identifier
    occurrence, in traversal order, labeled by the first-occurrence index of
    its binding (free names keep their text).  Two programs have isomorphic
    binding graphs iff their signatures agree."""
    program = parse_strict_clean(source)
    scopes = build_scopes(program)
    first_seen: dict[int, int] = {}
    signature = []
    for node in walk(program):
        if node.type != "Identifier":
            continue
        binding = scopes.binding_of(node)
        if binding is None:
            owner = None
            for free_name, idents in scopes.free.items():
                if any(i is node for i in idents):
                    owner = free_name
                    break
            signature.append(("free", owner if owner is not None else node.name))
        else:
            key = id(binding)
            if key not in first_seen:
                first_seen[key] = len(first_seen)
            signature.append(("bound", first_seen[key]))
    return signature


@pytest.mark.parametrize("name", TECHNIQUE_FIXTURES)
def test_7_rename_soundness(name):
    src = fixture_text(name)
    plain = deobfuscate(src, enable_humanize=False)
    renamed = deobfuscate(src, enable_humanize=True)
    # Behavior unchanged by renaming.
    assert observable(run_js(renamed.text)) == observable(run_js(plain.text))
    # Renaming is a pure relabeling: the binding graph is isomorphic.
    assert binding_signature(renamed.text) == binding_signature(plain.text)


# -- criterion 8: idempotence and determinism ------------------------------

@pytest.mark.parametrize("name", TECHNIQUE_FIXTURES)
def test_8_second_run_makes_zero_changes(name):
    first = deobfuscate(fixture_text(name), enable_humanize=False)
    second = deobfuscate(first.text, enable_humanize=False)
    assert second.text == first.text
    assert all(t.total_changes == 0 for t in second.traces)


def test_8_serial_and_parallel_batch_identical(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    for name in TECHNIQUE_FIXTURES:
        shutil.copy(FIXTURES / name, corpus / name)
    serial = tmp_path / "serial"
    parallel = tmp_path / "parallel"
    assert main(["batch", str(corpus), "--workers", "1",
                 "--out-dir", str(serial)]) == 0
    assert main(["batch", str(corpus), "--workers", "4",
                 "--out-dir", str(parallel)]) == 0
    reports = sorted(serial.glob("*.report.json"))
    assert len(reports) == len(TECHNIQUE_FIXTURES)
    for report in reports:
        assert report.read_bytes() == (parallel / report.name).read_bytes()
    summary = json.loads((serial / "batch.summary.json").read_text())
    assert summary["failures"] == 0
