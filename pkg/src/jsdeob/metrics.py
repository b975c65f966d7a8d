"""Complexity and obfuscation measurement.

Halstead counts are derived from the token stream of the canonically
printed program: operator tokens are punctuation and keywords, operand
tokens are identifiers and literals (including the keyword-shaped
literals true/false/null/this).  Printing first makes the counts
invariant under the input's formatting.
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .ast_nodes import Node, walk
from .lexer import tokenize
from .printer import FormatOptions, print_source


@dataclass
class HalsteadMetrics:
    n1: int = 0  # distinct operators
    n2: int = 0  # distinct operands
    N1: int = 0  # total operators
    N2: int = 0  # total operands

    @property
    def length(self) -> int:
        return self.N1 + self.N2

    @property
    def vocabulary(self) -> int:
        return self.n1 + self.n2

    @property
    def volume(self) -> float:
        if self.vocabulary == 0:
            return 0.0
        return self.length * math.log2(self.vocabulary)

    @property
    def difficulty(self) -> float:
        if self.n2 == 0:
            return 0.0
        return (self.n1 / 2) * (self.N2 / self.n2)

    @property
    def effort(self) -> float:
        return self.difficulty * self.volume


@dataclass
class ReductionScores:
    hlr: float
    her: float
    flagged: bool = False  # complexity grew


@dataclass
class EntropyWeights:
    w1: float = 0.61
    w2: float = 0.79
    w3: float = 1.58
    w4: float = 1.02


@dataclass
class EntropyReport:
    h_char: float = 0.0
    h_word: float = 0.0
    h_node_num: float = 0.0
    h_edge_num: float = 0.0
    h_node_degree: float = 0.0
    h_node_depth: float = 0.0
    weights: EntropyWeights = field(default_factory=EntropyWeights)

    @property
    def h_text(self) -> float:
        return self.h_char + self.h_word

    @property
    def h_ast(self) -> float:
        w = self.weights
        return (w.w1 * self.h_node_num + w.w2 * self.h_edge_num
                + w.w3 * self.h_node_degree + w.w4 * self.h_node_depth)


_CATEGORY = {"lexical": 1, "syntactic": 2, "semantic": 3, "multilayer": 4}

TECHNIQUE_CATEGORIES: dict[str, str] = {}
for _tid in range(0, 5):
    TECHNIQUE_CATEGORIES[f"T{_tid}"] = "lexical"
for _tid in range(5, 11):
    TECHNIQUE_CATEGORIES[f"T{_tid}"] = "syntactic"
for _tid in range(11, 18):
    TECHNIQUE_CATEGORIES[f"T{_tid}"] = "semantic"
for _tid in range(18, 20):
    TECHNIQUE_CATEGORIES[f"T{_tid}"] = "multilayer"


@dataclass(frozen=True)
class TechniqueTag:
    id: str
    category: str

    @property
    def points(self) -> int:
        return _CATEGORY[self.category]


def tag(tid: str) -> TechniqueTag:
    return TechniqueTag(tid, TECHNIQUE_CATEGORIES[tid])


@dataclass
class ObfuscationScore:
    value: int
    tags: frozenset[TechniqueTag]


# -- Halstead --------------------------------------------------------------

_OPERAND_KEYWORDS = frozenset({"true", "false", "null", "this"})


def halstead(program: Node, fmt: Optional[FormatOptions] = None) -> HalsteadMetrics:
    text = print_source(program, fmt or FormatOptions())
    tokens, _ = tokenize(text)
    operators: Counter[str] = Counter()
    operands: Counter[str] = Counter()
    for tok in tokens:
        if tok.type == "eof":
            continue
        if tok.type in ("ident", "num", "str", "regex"):
            operands[f"{tok.type}:{tok.value}"] += 1
        elif tok.type == "keyword":
            if tok.value in _OPERAND_KEYWORDS:
                operands[f"kw:{tok.value}"] += 1
            else:
                operators[tok.value] += 1
        else:
            operators[tok.value] += 1
    return HalsteadMetrics(
        n1=len(operators), n2=len(operands),
        N1=sum(operators.values()), N2=sum(operands.values()),
    )


def reduction_scores(before: HalsteadMetrics, after: HalsteadMetrics) -> ReductionScores:
    def ratio(b: float, a: float) -> float:
        if b == 0:
            return 0.0
        return (b - a) / b

    hlr = ratio(before.length, after.length)
    her = ratio(before.effort, after.effort)
    return ReductionScores(hlr=hlr, her=her, flagged=hlr < 0 or her < 0)


# -- entropy ---------------------------------------------------------------

def _shannon(counts: Counter) -> float:
    total = sum(counts.values())
    if total == 0:
        return 0.0
    h = 0.0
    for c in counts.values():
        p = c / total
        h -= p * math.log2(p)
    return h


_WORD_RE = re.compile(r"[A-Za-z0-9_$]+")


def text_entropy(src: str) -> tuple[float, float]:
    if not src:
        return 0.0, 0.0
    h_char = _shannon(Counter(src))
    h_word = _shannon(Counter(_WORD_RE.findall(src)))
    return h_char, h_word


def ast_entropy(program: Node, weights: Optional[EntropyWeights] = None) -> EntropyReport:
    weights = weights or EntropyWeights()
    kinds: Counter[str] = Counter()
    out_edges: Counter[int] = Counter()
    degrees: Counter[int] = Counter()
    depths: Counter[int] = Counter()

    def visit(node: Node, depth: int, has_parent: bool) -> None:
        children = node.children()
        kinds[node.type] += 1
        out_edges[len(children)] += 1
        degrees[len(children) + (1 if has_parent else 0)] += 1
        depths[depth] += 1
        for child in children:
            visit(child, depth + 1, True)

    visit(program, 0, False)
    return EntropyReport(
        h_node_num=_shannon(kinds),
        h_edge_num=_shannon(out_edges),
        h_node_degree=_shannon(degrees),
        h_node_depth=_shannon(depths),
        weights=weights,
    )


def source_entropy(src: str, program: Node,
                   weights: Optional[EntropyWeights] = None) -> EntropyReport:
    report = ast_entropy(program, weights)
    report.h_char, report.h_word = text_entropy(src)
    return report


# -- technique detection ---------------------------------------------------

@dataclass
class DetectorConfig:
    hex_ident_density: float = 0.3
    soup_ident_count: int = 6
    nonascii_ident_count: int = 3


_HEX_IDENT = re.compile(r"^_0x[0-9a-fA-F]+$")
_SOUP_IDENT = re.compile(r"^[$_]+$")
_HEX_ESCAPE = re.compile(r"\\x[0-9a-fA-F]{2}")
_DOTTED_CODES = re.compile(r"^(\d{1,3}\.){3,}$")


def detect_techniques(src: str, program: Node,
                      cfg: Optional[DetectorConfig] = None) -> set[TechniqueTag]:
    cfg = cfg or DetectorConfig()
    tags: set[TechniqueTag] = set()

    idents: list[str] = []
    prop_idents: set[int] = set()
    string_literals: list[str] = []
    for node in walk(program):
        if node.type == "MemberExpression" and not node.computed:
            prop_idents.add(id(node.property))
        elif node.type == "Property" and node.key.type == "Identifier":
            prop_idents.add(id(node.key))
    for node in walk(program):
        if node.type == "Identifier" and id(node) not in prop_idents:
            idents.append(node.name)
        elif node.type == "Literal" and node.get("raw_kind") == "string":
            string_literals.append(node.value)

    # T0: dominant share of machine-generated hex identifiers
    if idents:
        hex_count = sum(1 for n in idents if _HEX_IDENT.match(n))
        if hex_count / len(idents) >= cfg.hex_ident_density:
            tags.add(tag("T0"))

    # T1: computed member access whose key is written with hex escapes
    for m in re.finditer(r"\[\s*(['\"])((?:\\x[0-9a-fA-F]{2})+)\1\s*\]", src):
        tags.add(tag("T1"))
        break

    # T2: XOR between integer literals
    for node in walk(program):
        if (
            node.type == "BinaryExpression" and node.operator == "^"
            and node.left.type == "Literal" and node.right.type == "Literal"
        ):
            tags.add(tag("T2"))
            break

    # T3: base64 decode of a string literal
    for node in walk(program):
        if (
            node.type == "CallExpression"
            and node.callee.type == "Identifier"
            and node.callee.name == "atob"
            and node.arguments
            and node.arguments[0].type == "Literal"
        ):
            tags.add(tag("T3"))
            break

    # T4: coerced boolean idioms !![] / ![]
    if re.search(r"!!\[\]|!\[\]", src.replace(" ", "")):
        tags.add(tag("T4"))

    # T5/T6: value-producing IIFE feeding a declaration or assignment
    for node in walk(program):
        if node.type in ("VariableDeclarator", "AssignmentExpression"):
            value = node.get("init") or node.get("right")
            if (
                value is not None
                and value.type == "CallExpression"
                and value.callee.type == "FunctionExpression"
            ):
                body = value.callee.body.body
                if len(body) == 1 and body[0].type == "ReturnStatement":
                    if value.callee.params:
                        tags.add(tag("T5"))
                    else:
                        tags.add(tag("T6"))

    # T7: split-reverse-join chain
    if re.search(r"\.split\((''|\"\")\)\s*\.reverse\(\)\s*\.join\(", src):
        tags.add(tag("T7"))

    # T8: non-ASCII (AAEncode-style) identifiers
    nonascii = sum(1 for n in set(idents) if any(ord(ch) > 127 for ch in n))
    if nonascii >= cfg.nonascii_ident_count:
        tags.add(tag("T8"))

    # T9: $/_ symbol-soup identifier or key cluster
    soup_names = {n.name for n in walk(program)
                  if n.type == "Identifier" and _SOUP_IDENT.match(n.name)}
    if len(soup_names) >= cfg.soup_ident_count:
        tags.add(tag("T9"))

    # T10: whole source restricted to the JSFUCK character set
    stripped = re.sub(r"\s", "", src)
    if stripped and set(stripped) <= set("[]()!+"):
        tags.add(tag("T10"))

    # T11/T12/T18: string tables, encoded tables, rotation
    has_table = False
    has_encoded_table = False
    for node in walk(program):
        if node.type == "VariableDeclarator" and node.init is not None \
                and node.init.type == "ArrayExpression" and node.init.elements:
            elements = node.init.elements
            if all(e is not None and e.type == "Literal"
                   and e.get("raw_kind") == "string" for e in elements):
                has_table = True
                if any(_DOTTED_CODES.match(e.value) for e in elements):
                    has_encoded_table = True
    if has_table:
        tags.add(tag("T11"))
    has_decoder = bool(re.search(r"String\.fromCharCode\([^)]*\^", src))
    if has_encoded_table and has_decoder:
        tags.add(tag("T12"))

    # T13: JSON.parse over decoded/encoded content
    if "JSON.parse" in src and (has_encoded_table or has_decoder):
        tags.add(tag("T13"))

    # T14: RegExp constructed from decoded/encoded content
    if re.search(r"new\s+RegExp\s*\(", src) and (has_encoded_table or has_decoder):
        tags.add(tag("T14"))

    # T15: eval of a packer-shaped IIFE (p,a,c,k,e,d)
    for node in walk(program):
        if (
            node.type == "CallExpression"
            and node.callee.type == "Identifier"
            and node.callee.name == "eval"
            and node.arguments
            and node.arguments[0].type == "CallExpression"
            and node.arguments[0].callee.type == "FunctionExpression"
            and len(node.arguments[0].callee.params) >= 6
        ):
            tags.add(tag("T15"))
            break

    # T16: while-switch dispatcher over a split order string
    has_dispatch_order = bool(re.search(r"\"[\d|]+\"\.split\(\"\|\"\)|'[\d|]+'\.split\('\|'\)", src))
    has_switch_in_loop = False
    for node in walk(program):
        if node.type in ("WhileStatement", "ForStatement", "DoWhileStatement"):
            body = node.get("body")
            if body is not None and any(
                inner.type == "SwitchStatement" for inner in walk(body)
            ):
                has_switch_in_loop = True
    if has_dispatch_order and has_switch_in_loop:
        tags.add(tag("T16"))

    # T17: literally-false branches or unreachable trailing code
    for node in walk(program):
        if node.type == "IfStatement":
            test = node.test
            if test.type == "Literal" and test.value is False:
                tags.add(tag("T17"))
            if (
                test.type == "BinaryExpression"
                and test.operator in ("===", "==")
                and test.left.type == "Literal"
                and test.right.type == "Literal"
                and test.left.get("value") != test.right.get("value")
            ):
                tags.add(tag("T17"))

    # T18: rotated string table (push/shift loop) plus offset decoder
    rotation = bool(re.search(r"push.{0,60}shift", src, re.S))
    if has_table and rotation:
        tags.add(tag("T18"))

    # T19: blended natural-style obfuscation: dead branches plus
    # char-array string splitting under otherwise readable names
    char_split = False
    for node in walk(program):
        if node.type == "VariableDeclarator" and node.init is not None \
                and node.init.type == "ArrayExpression":
            els = node.init.elements
            if len(els) >= 5 and all(
                e is not None and e.type == "Literal"
                and e.get("raw_kind") == "string" and len(e.value) == 1
                for e in els
            ):
                char_split = True
    if char_split and tag("T17") in tags and tag("T0") not in tags:
        tags.add(tag("T19"))

    return tags


def obfuscation_score(tags: set[TechniqueTag]) -> ObfuscationScore:
    return ObfuscationScore(
        value=sum(t.points for t in tags),
        tags=frozenset(tags),
    )


# -- dedup fingerprint -----------------------------------------------------

def normalize_for_dedup(src: str) -> str:
    """Hash of the source with string payloads neutralized and all
    whitespace removed."""
    out: list[str] = []
    tokens, _ = tokenize(src)
    for tok in tokens:
        if tok.type == "eof":
            continue
        if tok.type == "str":
            out.append('"S"')
        else:
            out.append(src[tok.start:tok.end])
    normalized = "".join(re.sub(r"\s+", "", piece) for piece in out)
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()
