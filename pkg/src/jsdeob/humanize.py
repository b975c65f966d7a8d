"""Scope-safe identifier renaming and final formatting.

Name suggestions come from a pluggable provider: an offline heuristic
that derives names from initializers and observed usage, or a remote
chat-completion endpoint.  Renaming always operates on resolved bindings,
never on raw name strings, so dynamic lookup keys (string literals,
computed member arguments) are structurally out of reach.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from typing import Any, Optional

from .ast_nodes import Node, walk
from .printer import FormatOptions, print_source
from .scopes import Binding, ScopeTable, build_scopes

_IDENT_RE = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$]*$")
_MACHINE_NAME_RE = re.compile(r"^_0x[0-9a-fA-F]+$|^[_$]{2,}$|^[a-z]$|^[_$][0-9a-z]?$")

_RESERVED = frozenset(
    """var let const function return if else while do for break continue
    switch case default new delete typeof instanceof in void this null true
    false try catch finally throw class import export super yield async await
    with debugger undefined NaN Infinity arguments eval window document""".split()
)


@dataclass
class RenameContext:
    binding: Binding
    kind: str
    initializer: Optional[tuple[str, Any]]  # (shape, payload) or None
    member_accesses: list[str] = field(default_factory=list)
    call_arities: list[int] = field(default_factory=list)
    string_arguments: list[str] = field(default_factory=list)
    enclosing_function: str = ""
    sink_calls: list[str] = field(default_factory=list)


@dataclass
class RenameEntry:
    binding: Binding
    proposed: str
    provenance: str  # llm | heuristic | kept


@dataclass
class RenamePlan:
    entries: list[RenameEntry] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass
class ProviderConfig:
    provider: str = "offline-heuristic"  # or "remote-llm"
    base_url: str = ""
    model: str = ""
    api_key: str = ""
    timeout: float = 30.0
    max_retries: int = 3
    chunk_chars: int = 8000


@dataclass
class HumanizeResult:
    text: str
    plan: RenamePlan
    applied: int = 0
    rejected: int = 0


# -- context building ------------------------------------------------------

_SINKS = {"log", "warn", "error", "info", "alert", "write", "fetch", "send"}


def build_contexts(program: Node, scopes: ScopeTable) -> list[RenameContext]:
    contexts = []
    declarator_by_ident: dict[int, Node] = {}
    fn_by_ident: dict[int, Node] = {}
    for node in walk(program):
        if node.type == "VariableDeclarator" and node.id.type == "Identifier":
            declarator_by_ident[id(node.id)] = node
        elif node.type == "FunctionDeclaration":
            fn_by_ident[id(node.id)] = node
    for binding in scopes.all_bindings():
        ctx = RenameContext(binding=binding, kind=binding.kind, initializer=None)
        for decl_ident in binding.declarations:
            declarator = declarator_by_ident.get(id(decl_ident))
            if declarator is not None and declarator.init is not None:
                ctx.initializer = _summarize_initializer(declarator.init)
            fn = fn_by_ident.get(id(decl_ident))
            if fn is not None:
                ctx.initializer = ("function", None)
                ctx.sink_calls = _collect_sinks(fn.body)
                ctx.string_arguments.extend(_collect_string_args(fn.body))
        contexts.append(ctx)
    return contexts


def _summarize_initializer(init: Node) -> tuple[str, Any]:
    if init.type == "Literal":
        return (init.raw_kind, init.get("value"))
    if init.type == "FunctionExpression":
        return ("function", None)
    if init.type == "CallExpression":
        callee = init.callee
        name = callee.name if callee.type == "Identifier" else None
        return ("call", name)
    if init.type == "ArrayExpression":
        return ("array", len(init.elements))
    if init.type == "ObjectExpression":
        return ("object", len(init.properties))
    return ("expr", None)


def _collect_sinks(body: Node) -> list[str]:
    sinks = []
    for node in walk(body):
        if node.type != "CallExpression":
            continue
        callee = node.callee
        if callee.type == "Identifier" and callee.name in _SINKS:
            sinks.append(callee.name)
        elif (
            callee.type == "MemberExpression"
            and not callee.computed
            and callee.property.type == "Identifier"
            and callee.property.name in _SINKS
        ):
            sinks.append(callee.property.name)
    return sinks


def _collect_string_args(body: Node) -> list[str]:
    out = []
    for node in walk(body):
        if node.type == "CallExpression":
            for arg in node.arguments:
                if arg.type == "Literal" and arg.get("raw_kind") == "string":
                    out.append(arg.value)
    return out


# -- offline heuristic -----------------------------------------------------

def _camel(words: list[str]) -> str:
    words = [re.sub(r"[^A-Za-z0-9]", "", w) for w in words]
    words = [w for w in words if w]
    if not words:
        return ""
    head = words[0].lower()
    tail = "".join(w[:1].upper() + w[1:].lower() for w in words[1:])
    name = head + tail
    if name and name[0].isdigit():
        name = "v" + name
    return name


def _needs_rename(name: str) -> bool:
    return bool(_MACHINE_NAME_RE.match(name))


def heuristic_name(ctx: RenameContext) -> Optional[str]:
    """Derive a name from the context, or None to keep the original."""
    init = ctx.initializer
    if init is None:
        return None
    shape, payload = init
    if shape == "function":
        if ctx.sink_calls:
            verb = {"alert": "show", "write": "write", "fetch": "fetch",
                    "send": "send"}.get(ctx.sink_calls[0], "log")
            if ctx.string_arguments:
                noun = _camel(ctx.string_arguments[0].split()[:1]).capitalize() or "Output"
            else:
                noun = "Output"
            return verb + noun
        return "computeResult"
    if shape == "string" and isinstance(payload, str):
        base = _camel(payload.split()[:2])
        if base:
            return base + "Text"
        return "emptyText"
    if shape == "number":
        return "numericValue"
    if shape == "boolean":
        return "isEnabled"
    if shape == "array":
        return "itemList"
    if shape == "object":
        return "config"
    if shape == "null":
        return "emptyValue"
    return None


def _offline_plan(contexts: list[RenameContext]) -> RenamePlan:
    plan = RenamePlan()
    for ctx in contexts:
        name = ctx.binding.name
        if not _needs_rename(name):
            plan.entries.append(RenameEntry(ctx.binding, name, "kept"))
            continue
        proposal = heuristic_name(ctx)
        if proposal is None or not _valid_identifier(proposal):
            plan.entries.append(RenameEntry(ctx.binding, name, "kept"))
        else:
            plan.entries.append(RenameEntry(ctx.binding, proposal, "heuristic"))
    return plan


def _valid_identifier(name: str) -> bool:
    return bool(_IDENT_RE.match(name)) and name not in _RESERVED


# -- remote provider -------------------------------------------------------

def _context_prompt(contexts: list[RenameContext]) -> str:
    lines = [
        "Rename these JavaScript identifiers to descriptive camelCase names.",
        "Respond with a JSON object mapping each original name to a new name.",
        "",
    ]
    for ctx in contexts:
        desc = f"- {ctx.binding.name} ({ctx.kind}"
        if ctx.initializer:
            desc += f", init={ctx.initializer[0]}:{ctx.initializer[1]!r}"
        if ctx.sink_calls:
            desc += f", calls={','.join(ctx.sink_calls[:3])}"
        desc += ")"
        lines.append(desc)
    return "\n".join(lines)


def _chunk_contexts(contexts: list[RenameContext], limit: int) -> list[list[RenameContext]]:
    chunks: list[list[RenameContext]] = []
    current: list[RenameContext] = []
    for ctx in contexts:
        current.append(ctx)
        if len(_context_prompt(current)) > limit and len(current) > 1:
            current.pop()
            chunks.append(current)
            current = [ctx]
    if current:
        chunks.append(current)
    return chunks


def _remote_suggest(contexts: list[RenameContext], cfg: ProviderConfig,
                    plan: RenamePlan) -> dict[str, str]:
    import requests

    url = cfg.base_url.rstrip("/") + "/chat/completions"
    payload = {
        "model": cfg.model,
        "messages": [{"role": "user", "content": _context_prompt(contexts)}],
    }
    headers = {"Authorization": f"Bearer {cfg.api_key}"} if cfg.api_key else {}
    delay = 0.5
    for attempt in range(cfg.max_retries):
        try:
            resp = requests.post(url, json=payload, headers=headers, timeout=cfg.timeout)
            resp.raise_for_status()
            content = resp.json()["choices"][0]["message"]["content"]
            match = re.search(r"\{.*\}", content, re.S)
            if match is None:
                raise ValueError("no JSON object in response")
            mapping = json.loads(match.group(0))
            return {k: v for k, v in mapping.items() if isinstance(v, str)}
        except Exception as exc:  # network, HTTP, or shape errors all retry
            if attempt + 1 >= cfg.max_retries:
                plan.warnings.append(f"provider unreachable: {exc}")
                return {}
            time.sleep(delay)
            delay *= 2
    return {}


def suggest_names(contexts: list[RenameContext], cfg: ProviderConfig) -> RenamePlan:
    """One plan entry per context; remote misses fall back per-binding."""
    if cfg.provider != "remote-llm":
        return _offline_plan(contexts)
    plan = RenamePlan()
    suggestions: dict[str, str] = {}
    for chunk in _chunk_contexts(contexts, cfg.chunk_chars):
        suggestions.update(_remote_suggest(chunk, cfg, plan))
    fallback = _offline_plan(contexts)
    for ctx, fb in zip(contexts, fallback.entries):
        proposal = suggestions.get(ctx.binding.name)
        if proposal is not None and _valid_identifier(proposal):
            plan.entries.append(RenameEntry(ctx.binding, proposal, "llm"))
        else:
            plan.entries.append(fb)
    return plan


# -- application -----------------------------------------------------------

def apply_renames(program: Node, scopes: ScopeTable, plan: RenamePlan) -> tuple[int, int]:
    """Rewrite accepted renames in place; returns (applied, rejected).

    A proposal colliding with a pre-existing visible name is rejected and
    the original kept; a proposal colliding with a name this plan already
    assigned gets a numeric suffix instead.
    """
    applied = 0
    rejected = 0
    assigned: set[str] = set()
    for entry in plan.entries:
        if entry.provenance == "kept" or entry.proposed == entry.binding.name:
            continue
        name = entry.proposed
        if not _valid_identifier(name):
            entry.provenance = "kept"
            rejected += 1
            continue
        if scopes.is_safe_rename(entry.binding, name):
            scopes.rename(entry.binding, name)
            assigned.add(name)
            applied += 1
            continue
        if name in assigned:
            chosen = None
            for i in range(2, 100):
                candidate = f"{name}{i}"
                if scopes.is_safe_rename(entry.binding, candidate):
                    chosen = candidate
                    break
            if chosen is not None:
                scopes.rename(entry.binding, chosen)
                assigned.add(chosen)
                entry.proposed = chosen
                applied += 1
                continue
        entry.provenance = "kept"
        rejected += 1
    return applied, rejected


def humanize(
    program: Node,
    scopes: Optional[ScopeTable] = None,
    cfg: Optional[ProviderConfig] = None,
    fmt: Optional[FormatOptions] = None,
) -> HumanizeResult:
    """Rename bindings via the configured provider and pretty-print."""
    cfg = cfg or ProviderConfig()
    fmt = fmt or FormatOptions()
    scopes = scopes or build_scopes(program)
    contexts = build_contexts(program, scopes)
    plan = suggest_names(contexts, cfg)
    applied, rejected = apply_renames(program, scopes, plan)
    text = print_source(program, fmt)
    return HumanizeResult(text=text, plan=plan, applied=applied, rejected=rejected)
