"""Identifier humanization: heuristic plans, rename safety, provider client."""

from __future__ import annotations

import json

import pytest

from conftest import fixture_text, observable, run_js
from jsdeob.ast_nodes import walk
from jsdeob.engine import deobfuscate
from jsdeob.humanize import (
    ProviderConfig,
    apply_renames,
    build_contexts,
    heuristic_name,
    humanize,
    suggest_names,
)
from jsdeob.parser import parse
from jsdeob.printer import print_source
from jsdeob.scopes import build_scopes


def plan_for(source: str, cfg: ProviderConfig = None):
    program, diags = parse(source)
    assert not diags
    scopes = build_scopes(program)
    contexts = build_contexts(program, scopes)
    return program, scopes, suggest_names(contexts, cfg or ProviderConfig())


# -- offline heuristic -----------------------------------------------------

def test_machine_names_renamed_human_names_kept():
    src = "var _0x1abc = 'text'; var total = 0; use(_0x1abc, total);"
    program, scopes, plan = plan_for(src)
    apply_renames(program, scopes, plan)
    out = print_source(program)
    assert "_0x1abc" not in out
    assert "total" in out


def test_heuristic_names_reflect_initializer_kind():
    src = (
        "var _0xa = 'words'; var _0xb = 12; var _0xc = true;"
        "var _0xd = [1]; use(_0xa, _0xb, _0xc, _0xd);"
    )
    program, scopes, plan = plan_for(src)
    apply_renames(program, scopes, plan)
    out = print_source(program)
    assert "Text" in out
    assert "numericValue" in out
    assert "isEnabled" in out
    assert "itemList" in out


def test_offline_renaming_preserves_behavior():
    src = fixture_text("t00.js")
    plain = deobfuscate(src, enable_humanize=False)
    renamed = deobfuscate(src, enable_humanize=True)
    assert observable(run_js(plain.text)) == observable(run_js(renamed.text))


def test_empty_program():
    result = humanize(parse("")[0], build_scopes(parse("")[0]))
    assert result.text == ""


def test_free_globals_untouched():
    src = "console.log(document.title);"
    program, _ = parse(src)
    result = humanize(program, build_scopes(program))
    assert result.text == print_source(program)


# -- rename application safety ---------------------------------------------

def test_collision_with_existing_name_rejected():
    src = "var _0xa = 1; var numericValue = 2; use(_0xa, numericValue);"
    program, scopes, plan = plan_for(src)
    applied, rejected = apply_renames(program, scopes, plan)
    out = print_source(program)
    # Whatever happened, no two bindings may share a name afterwards.
    scopes2 = build_scopes(parse(out)[0])
    top_names = list(scopes2.root.bindings)
    assert len(top_names) == len(set(top_names)) == 2


def test_plan_internal_collision_gets_suffix():
    src = "var _0xa = 5; var _0xb = 6; use(_0xa + _0xb);"
    program, scopes, plan = plan_for(src)
    apply_renames(program, scopes, plan)
    out = print_source(program)
    scopes2 = build_scopes(parse(out)[0])
    assert len(scopes2.root.bindings) == 2
    assert "_0xa" not in out and "_0xb" not in out


def test_invalid_proposal_rejected():
    program, scopes, plan = plan_for("var _0xa = 1; use(_0xa);")
    for entry in plan.entries:
        entry.proposed = "not a name!"
    applied, rejected = apply_renames(program, scopes, plan)
    assert applied == 0 and rejected >= 1
    assert "_0xa" in print_source(program)


# -- remote provider client ------------------------------------------------

class RecordingTransport:
    """Stand-in for requests.post that records calls and replays responses."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def __call__(self, url, json=None, headers=None, timeout=None):
        self.calls.append({"url": url, "json": json, "headers": headers})
        item = self.responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


class FakeResponse:
    def __init__(self, content: str, status: int = 200):
        self._content = content
        self.status_code = status

    def raise_for_status(self):
        if self.status_code >= 400:
            raise RuntimeError(f"HTTP {self.status_code}")

    def json(self):
        return {"choices": [{"message": {"content": self._content}}]}


def remote_cfg(**kw) -> ProviderConfig:
    defaults = dict(provider="remote-llm", model="test-model",
                    api_key="k", base_url="https://llm.example/v1",
                    max_retries=2)
    defaults.update(kw)
    return ProviderConfig(**defaults)


def test_remote_suggestions_used(monkeypatch):
    import requests
    transport = RecordingTransport([
        FakeResponse(json.dumps({"_0xa": "greetingText"})),
    ])
    monkeypatch.setattr(requests, "post", transport)
    program, scopes, plan = plan_for("var _0xa = 'hi'; use(_0xa);", remote_cfg())
    assert any(e.proposed == "greetingText" and e.provenance == "llm"
               for e in plan.entries)
    call = transport.calls[0]
    assert call["url"] == "https://llm.example/v1/chat/completions"
    assert call["headers"]["Authorization"] == "Bearer k"


def test_remote_invalid_shape_falls_back(monkeypatch):
    import requests
    transport = RecordingTransport([
        FakeResponse(json.dumps({"_0xa": "two words"})),
    ])
    monkeypatch.setattr(requests, "post", transport)
    _, _, plan = plan_for("var _0xa = 'hi'; use(_0xa);", remote_cfg())
    entry = [e for e in plan.entries if e.binding.name == "_0xa"][0]
    assert entry.provenance == "heuristic"


def test_remote_retries_then_warns(monkeypatch):
    import requests
    transport = RecordingTransport([
        ConnectionError("down"), ConnectionError("still down"),
    ])
    monkeypatch.setattr(requests, "post", transport)
    monkeypatch.setattr("time.sleep", lambda s: None)
    _, _, plan = plan_for("var _0xa = 'hi'; use(_0xa);", remote_cfg())
    assert len(transport.calls) == 2
    assert any("provider" in w for w in plan.warnings)
    assert all(e.provenance in ("heuristic", "kept") for e in plan.entries)


def test_offline_provider_makes_no_network_calls(monkeypatch):
    import requests

    def forbidden(*args, **kwargs):
        raise AssertionError("network call attempted in offline mode")

    monkeypatch.setattr(requests, "post", forbidden)
    monkeypatch.setattr(requests, "get", forbidden)
    monkeypatch.setattr(requests, "request", forbidden)
    result = deobfuscate(fixture_text("t00.js"), enable_humanize=True)
    assert result.text


def test_chunking_respects_character_budget(monkeypatch):
    import requests
    transport = RecordingTransport([FakeResponse("{}")] * 50)
    monkeypatch.setattr(requests, "post", transport)
    names = " ".join(f"var _0x{i:x} = {i}; use(_0x{i:x});" for i in range(40))
    plan_for(names, remote_cfg(chunk_chars=300))
    assert len(transport.calls) > 1
    # Rebuilding each request prompt stays near the budget.
    for call in transport.calls:
        prompt = call["json"]["messages"][0]["content"]
        assert len(prompt) < 600
