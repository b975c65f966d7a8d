"""Scope analysis: binding resolution, shadowing, rename safety."""

from __future__ import annotations

from jsdeob.parser import parse
from jsdeob.scopes import build_scopes


def scopes_of(source: str):
    program, diags = parse(source)
    assert not diags
    return program, build_scopes(program)


def test_var_hoists_to_function_scope():
    _, table = scopes_of("function f() { if (a) { var x = 1; } return x; }")
    f_scope = table.root.children[0]
    assert f_scope.kind == "function"
    binding = f_scope.bindings["x"]
    assert binding.kind == "var"
    assert len(binding.references) == 1


def test_params_and_shadowing():
    _, table = scopes_of("var x = 1; function f(x) { return x; } f(x);")
    outer = table.root.bindings["x"]
    inner = table.root.children[0].bindings["x"]
    assert inner.kind == "param"
    assert outer is not inner
    assert len(inner.references) == 1
    assert len(outer.references) == 1  # the call argument; declarator is not a reference


def test_free_names_recorded():
    _, table = scopes_of("console.log(unknown + 1);")
    assert "console" in table.free_names()
    assert "unknown" in table.free_names()
    assert "log" not in table.free_names()  # member property, not a reference


def test_function_declaration_binding():
    _, table = scopes_of("function g() {} g(); g();")
    binding = table.root.bindings["g"]
    assert binding.kind == "function"
    assert len(binding.references) == 2


def test_catch_parameter_scoped():
    _, table = scopes_of("try { f(); } catch (e) { log(e); } ")
    assert "e" not in table.root.bindings
    catch_scopes = [s for s in table.root.iter_scopes() if "e" in s.bindings]
    assert len(catch_scopes) == 1


def test_rename_rewrites_all_sites():
    program, table = scopes_of("var abc = 1; abc = abc + 2; use(abc);")
    binding = table.root.bindings["abc"]
    table.rename(binding, "total")
    from jsdeob.printer import print_source
    out = print_source(program)
    assert "abc" not in out
    assert out.count("total") == 4


def test_is_safe_rename_rejects_collision():
    _, table = scopes_of("var a = 1; var b = 2; use(a, b);")
    assert not table.is_safe_rename(table.root.bindings["a"], "b")
    assert table.is_safe_rename(table.root.bindings["a"], "c")


def test_is_safe_rename_rejects_capture_of_free_name():
    _, table = scopes_of("var a = 1; console.log(a);")
    assert not table.is_safe_rename(table.root.bindings["a"], "console")


def test_is_safe_rename_rejects_shadow_at_use_site():
    src = "var a = 1; function f() { var inner = 2; return a + inner; }"
    _, table = scopes_of(src)
    assert not table.is_safe_rename(table.root.bindings["a"], "inner")


def test_binding_of_maps_identifiers():
    program, table = scopes_of("var q = 1; use(q);")
    from jsdeob.ast_nodes import walk
    idents = [n for n in walk(program) if n.type == "Identifier" and n.name == "q"]
    assert len(idents) == 2
    bindings = {id(table.binding_of(i)) for i in idents}
    assert len(bindings) == 1
