"""Whitelisted built-in objects and methods for the sandbox.

Everything here is self-contained: no host file, network, environment, or
real-clock access.  Math.random is a seeded generator and Date is pinned
to a fixed epoch so runs are deterministic.
"""

from __future__ import annotations

import base64
import binascii
import json
import math
import random
import re
from typing import Any, Optional

from .coerce import (
    number_to_string,
    string_to_number,
    to_boolean,
    to_int32,
    to_number,
    to_primitive,
    to_string,
    to_uint32,
)
from .values import (
    NULL,
    UNDEFINED,
    JSArray,
    JSFunction,
    JSObject,
    JSRegExp,
    NativeFunction,
    is_callable,
)

FIXED_EPOCH_MS = 1577836800000.0  # 2020-01-01T00:00:00Z


def native(name):
    def deco(fn):
        return NativeFunction(fn, name)
    return deco


def _arg(args: list, i: int) -> Any:
    return args[i] if i < len(args) else UNDEFINED


# -- regexp translation ----------------------------------------------------

def compile_js_regex(pattern: str, flags: str) -> re.Pattern:
    py_flags = 0
    if "i" in flags:
        py_flags |= re.IGNORECASE
    if "m" in flags:
        py_flags |= re.MULTILINE
    if "s" in flags:
        py_flags |= re.DOTALL
    return re.compile(_translate_pattern(pattern), py_flags)


def _translate_pattern(pattern: str) -> str:
    # The common JS escapes map directly onto Python's re syntax; only a few
    # need rewriting.
    out = []
    i = 0
    while i < len(pattern):
        ch = pattern[i]
        if ch == "\\" and i + 1 < len(pattern):
            nxt = pattern[i + 1]
            if nxt == "d" or nxt == "D" or nxt == "w" or nxt == "W" or nxt == "s" or nxt == "S" or nxt == "b" or nxt == "B":
                out.append(ch + nxt)
            elif nxt == "u" and pattern[i + 2:i + 6] and len(pattern) >= i + 6:
                out.append("\\u" + pattern[i + 2:i + 6])
                i += 6
                continue
            else:
                out.append(ch + nxt)
            i += 2
            continue
        if ch == "$" and i == len(pattern) - 1:
            out.append(r"\Z")
            i += 1
            continue
        out.append(ch)
        i += 1
    return "".join(out)


# -- string methods --------------------------------------------------------

def string_method(interp, this: str, name: str) -> Optional[NativeFunction]:
    s = this

    if name == "charAt":
        def char_at(it, t, a):
            idx = to_number(_arg(a, 0), it)
            idx = 0 if math.isnan(idx) else int(idx)
            return s[idx] if 0 <= idx < len(s) else ""
        return NativeFunction(char_at, "charAt")
    if name == "charCodeAt":
        def char_code_at(it, t, a):
            idx = to_number(_arg(a, 0), it)
            idx = 0 if math.isnan(idx) else int(idx)
            if 0 <= idx < len(s):
                return float(ord(s[idx]))
            return float("nan")
        return NativeFunction(char_code_at, "charCodeAt")
    if name == "indexOf":
        def index_of(it, t, a):
            return float(s.find(to_string(_arg(a, 0), it)))
        return NativeFunction(index_of, "indexOf")
    if name == "lastIndexOf":
        return NativeFunction(lambda it, t, a: float(s.rfind(to_string(_arg(a, 0), it))), "lastIndexOf")
    if name == "split":
        def split(it, t, a):
            sep = _arg(a, 0)
            if sep is UNDEFINED:
                return JSArray([s])
            if isinstance(sep, JSRegExp):
                parts = compile_js_regex(sep.pattern, sep.flags).split(s)
                return JSArray([p for p in parts])
            sep_s = to_string(sep, it)
            if sep_s == "":
                return JSArray(list(s))
            return JSArray(s.split(sep_s))
        return NativeFunction(split, "split")
    if name == "slice":
        def str_slice(it, t, a):
            start = _slice_index(to_number(_arg(a, 0), it), len(s))
            end = len(s) if _arg(a, 1) is UNDEFINED else _slice_index(to_number(_arg(a, 1), it), len(s))
            return s[start:max(start, end)]
        return NativeFunction(str_slice, "slice")
    if name == "substring":
        def substring(it, t, a):
            start = _clamp_index(to_number(_arg(a, 0), it), len(s))
            end = len(s) if _arg(a, 1) is UNDEFINED else _clamp_index(to_number(_arg(a, 1), it), len(s))
            if start > end:
                start, end = end, start
            return s[start:end]
        return NativeFunction(substring, "substring")
    if name == "substr":
        def substr(it, t, a):
            start = _slice_index(to_number(_arg(a, 0), it), len(s))
            length = len(s) if _arg(a, 1) is UNDEFINED else int(to_number(_arg(a, 1), it))
            return s[start:start + max(0, length)]
        return NativeFunction(substr, "substr")
    if name == "replace":
        def replace(it, t, a):
            pattern = _arg(a, 0)
            repl = _arg(a, 1)
            if isinstance(pattern, JSRegExp):
                rx = compile_js_regex(pattern.pattern, pattern.flags)
                count = 0 if "g" in pattern.flags else 1
                if is_callable(repl):
                    def do(m: re.Match) -> str:
                        groups = [m.group(0)] + ["" if g is None else g for g in m.groups()]
                        call_args = [g for g in groups] + [float(m.start()), s]
                        return to_string(it.call_function(repl, UNDEFINED, call_args), it)
                    return rx.sub(do, s, count=count)
                repl_s = to_string(repl, it)
                return rx.sub(lambda m: _expand_replacement(repl_s, m), s, count=count)
            pat_s = to_string(pattern, it)
            if is_callable(repl):
                idx = s.find(pat_s)
                if idx < 0:
                    return s
                rep = to_string(it.call_function(repl, UNDEFINED, [pat_s, float(idx), s]), it)
                return s[:idx] + rep + s[idx + len(pat_s):]
            return s.replace(pat_s, to_string(repl, it).replace("$&", pat_s), 1)
        return NativeFunction(replace, "replace")
    if name == "concat":
        return NativeFunction(lambda it, t, a: s + "".join(to_string(x, it) for x in a), "concat")
    if name == "toUpperCase":
        return NativeFunction(lambda it, t, a: s.upper(), "toUpperCase")
    if name == "toLowerCase":
        return NativeFunction(lambda it, t, a: s.lower(), "toLowerCase")
    if name == "trim":
        return NativeFunction(lambda it, t, a: s.strip(), "trim")
    if name == "repeat":
        return NativeFunction(lambda it, t, a: s * int(to_number(_arg(a, 0), it)), "repeat")
    if name == "startsWith":
        return NativeFunction(lambda it, t, a: s.startswith(to_string(_arg(a, 0), it)), "startsWith")
    if name == "endsWith":
        return NativeFunction(lambda it, t, a: s.endswith(to_string(_arg(a, 0), it)), "endsWith")
    if name == "includes":
        return NativeFunction(lambda it, t, a: to_string(_arg(a, 0), it) in s, "includes")
    if name == "match":
        def str_match(it, t, a):
            pattern = _arg(a, 0)
            if not isinstance(pattern, JSRegExp):
                pattern = JSRegExp(to_string(pattern, it), "")
            rx = compile_js_regex(pattern.pattern, pattern.flags)
            if "g" in pattern.flags:
                found = rx.findall(s)
                if not found:
                    return NULL
                return JSArray([f if isinstance(f, str) else f[0] for f in found])
            m = rx.search(s)
            if m is None:
                return NULL
            return JSArray([m.group(0)] + ["" if g is None else g for g in m.groups()])
        return NativeFunction(str_match, "match")
    if name == "toString" or name == "valueOf":
        return NativeFunction(lambda it, t, a: s, name)
    return None


def _expand_replacement(repl: str, m: re.Match) -> str:
    out = []
    i = 0
    while i < len(repl):
        if repl[i] == "$" and i + 1 < len(repl):
            nxt = repl[i + 1]
            if nxt == "&":
                out.append(m.group(0))
                i += 2
                continue
            if nxt.isdigit():
                num = int(nxt)
                try:
                    out.append(m.group(num) or "")
                except (IndexError, re.error):
                    out.append("$" + nxt)
                i += 2
                continue
            if nxt == "$":
                out.append("$")
                i += 2
                continue
        out.append(repl[i])
        i += 1
    return "".join(out)


def _slice_index(value: float, length: int) -> int:
    if math.isnan(value):
        return 0
    idx = int(value)
    if idx < 0:
        idx += length
    return max(0, min(idx, length))


def _clamp_index(value: float, length: int) -> int:
    if math.isnan(value):
        return 0
    return max(0, min(int(value), length))


# -- array methods ---------------------------------------------------------

def array_method(interp, this: JSArray, name: str) -> Optional[NativeFunction]:
    arr = this

    if name == "push":
        def push(it, t, a):
            arr.elements.extend(a)
            return float(len(arr.elements))
        return NativeFunction(push, "push")
    if name == "pop":
        return NativeFunction(lambda it, t, a: arr.elements.pop() if arr.elements else UNDEFINED, "pop")
    if name == "shift":
        return NativeFunction(lambda it, t, a: arr.elements.pop(0) if arr.elements else UNDEFINED, "shift")
    if name == "unshift":
        def unshift(it, t, a):
            arr.elements[:0] = a
            return float(len(arr.elements))
        return NativeFunction(unshift, "unshift")
    if name == "join":
        def join(it, t, a):
            sep = "," if _arg(a, 0) is UNDEFINED else to_string(_arg(a, 0), it)
            return it.array_join(arr, sep)
        return NativeFunction(join, "join")
    if name == "reverse":
        def reverse(it, t, a):
            arr.elements.reverse()
            return arr
        return NativeFunction(reverse, "reverse")
    if name == "slice":
        def arr_slice(it, t, a):
            start = _slice_index(to_number(_arg(a, 0), it) if _arg(a, 0) is not UNDEFINED else 0.0, len(arr.elements))
            end = len(arr.elements) if _arg(a, 1) is UNDEFINED else _slice_index(to_number(_arg(a, 1), it), len(arr.elements))
            return JSArray(arr.elements[start:max(start, end)])
        return NativeFunction(arr_slice, "slice")
    if name == "splice":
        def splice(it, t, a):
            start = _slice_index(to_number(_arg(a, 0), it), len(arr.elements))
            count = len(arr.elements) - start if _arg(a, 1) is UNDEFINED else max(0, int(to_number(_arg(a, 1), it)))
            removed = arr.elements[start:start + count]
            arr.elements[start:start + count] = list(a[2:])
            return JSArray(removed)
        return NativeFunction(splice, "splice")
    if name == "concat":
        def concat(it, t, a):
            out = list(arr.elements)
            for item in a:
                if isinstance(item, JSArray):
                    out.extend(item.elements)
                else:
                    out.append(item)
            return JSArray(out)
        return NativeFunction(concat, "concat")
    if name == "indexOf":
        def index_of(it, t, a):
            from .coerce import strict_equals
            target = _arg(a, 0)
            for i, el in enumerate(arr.elements):
                if strict_equals(el, target):
                    return float(i)
            return -1.0
        return NativeFunction(index_of, "indexOf")
    if name == "includes":
        def includes(it, t, a):
            from .coerce import strict_equals
            return any(strict_equals(el, _arg(a, 0)) for el in arr.elements)
        return NativeFunction(includes, "includes")
    if name == "map":
        def arr_map(it, t, a):
            fn = _arg(a, 0)
            return JSArray([
                it.call_function(fn, UNDEFINED, [el, float(i), arr])
                for i, el in enumerate(arr.elements)
            ])
        return NativeFunction(arr_map, "map")
    if name == "forEach":
        def for_each(it, t, a):
            fn = _arg(a, 0)
            for i, el in enumerate(arr.elements):
                it.call_function(fn, UNDEFINED, [el, float(i), arr])
            return UNDEFINED
        return NativeFunction(for_each, "forEach")
    if name == "filter":
        def arr_filter(it, t, a):
            fn = _arg(a, 0)
            return JSArray([
                el for i, el in enumerate(arr.elements)
                if to_boolean(it.call_function(fn, UNDEFINED, [el, float(i), arr]))
            ])
        return NativeFunction(arr_filter, "filter")
    if name == "toString":
        return NativeFunction(lambda it, t, a: it.array_join(arr, ","), "toString")
    return None


# -- number methods --------------------------------------------------------

_RADIX_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def number_to_radix(value: float, radix: int) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    if radix == 10:
        return number_to_string(value)
    negative = value < 0
    value = abs(value)
    int_part = int(value)
    frac = value - int_part
    digits = []
    if int_part == 0:
        digits.append("0")
    while int_part:
        digits.append(_RADIX_DIGITS[int_part % radix])
        int_part //= radix
    text = "".join(reversed(digits))
    if frac > 0:
        out = ["."]
        for _ in range(20):
            frac *= radix
            digit = int(frac)
            out.append(_RADIX_DIGITS[digit])
            frac -= digit
            if frac <= 0:
                break
        text += "".join(out)
    return ("-" if negative else "") + text


def number_method(interp, this: float, name: str) -> Optional[NativeFunction]:
    n = this
    if name == "toString":
        def to_str(it, t, a):
            radix = 10 if _arg(a, 0) is UNDEFINED else int(to_number(_arg(a, 0), it))
            return number_to_radix(n, radix)
        return NativeFunction(to_str, "toString")
    if name == "toFixed":
        def to_fixed(it, t, a):
            places = 0 if _arg(a, 0) is UNDEFINED else int(to_number(_arg(a, 0), it))
            return f"{n:.{places}f}"
        return NativeFunction(to_fixed, "toFixed")
    if name == "valueOf":
        return NativeFunction(lambda it, t, a: n, "valueOf")
    return None


# -- global environment construction --------------------------------------

def make_string_ctor() -> NativeFunction:
    def string_ctor(it, t, a):
        return "" if not a else to_string(a[0], it)
    ctor = NativeFunction(string_ctor, "String")

    def from_char_code(it, t, a):
        return "".join(chr(int(to_number(x, it)) & 0xFFFF) for x in a)
    ctor.props["fromCharCode"] = NativeFunction(from_char_code, "fromCharCode")
    return ctor


def make_number_ctor() -> NativeFunction:
    def number_ctor(it, t, a):
        return 0.0 if not a else to_number(a[0], it)
    ctor = NativeFunction(number_ctor, "Number")
    ctor.props["MAX_SAFE_INTEGER"] = 9007199254740991.0
    ctor.props["isInteger"] = NativeFunction(
        lambda it, t, a: isinstance(_arg(a, 0), float) and not isinstance(_arg(a, 0), bool)
        and not math.isnan(_arg(a, 0)) and not math.isinf(_arg(a, 0))
        and _arg(a, 0) == int(_arg(a, 0)),
        "isInteger",
    )
    return ctor


def make_boolean_ctor() -> NativeFunction:
    return NativeFunction(lambda it, t, a: to_boolean(_arg(a, 0)) if a else False, "Boolean")


def make_array_ctor() -> NativeFunction:
    def array_ctor(it, t, a):
        if len(a) == 1 and isinstance(a[0], float):
            return JSArray([UNDEFINED] * int(a[0]))
        return JSArray(list(a))
    ctor = NativeFunction(array_ctor, "Array")
    ctor.props["isArray"] = NativeFunction(lambda it, t, a: isinstance(_arg(a, 0), JSArray), "isArray")
    return ctor


def make_object_ctor() -> NativeFunction:
    def object_ctor(it, t, a):
        if a and isinstance(a[0], JSObject):
            return a[0]
        return JSObject()
    ctor = NativeFunction(object_ctor, "Object")
    ctor.props["keys"] = NativeFunction(
        lambda it, t, a: JSArray(list(_arg(a, 0).props.keys())) if isinstance(_arg(a, 0), JSObject) else JSArray([]),
        "keys",
    )
    return ctor


def make_math(seed: int = 0x5DEECE66D) -> JSObject:
    rng = random.Random(seed)
    m = JSObject()

    def unary(fn, name):
        return NativeFunction(lambda it, t, a: _safe_num(fn, to_number(_arg(a, 0), it)), name)

    m.props.update({
        "PI": math.pi,
        "E": math.e,
        "abs": unary(abs, "abs"),
        "floor": unary(lambda x: float(math.floor(x)) if not (math.isnan(x) or math.isinf(x)) else x, "floor"),
        "ceil": unary(lambda x: float(math.ceil(x)) if not (math.isnan(x) or math.isinf(x)) else x, "ceil"),
        "round": unary(lambda x: float(math.floor(x + 0.5)) if not (math.isnan(x) or math.isinf(x)) else x, "round"),
        "trunc": unary(lambda x: float(math.trunc(x)) if not (math.isnan(x) or math.isinf(x)) else x, "trunc"),
        "sqrt": unary(lambda x: math.sqrt(x) if x >= 0 else float("nan"), "sqrt"),
        "sin": unary(math.sin, "sin"),
        "cos": unary(math.cos, "cos"),
        "tan": unary(math.tan, "tan"),
        "log": unary(lambda x: math.log(x) if x > 0 else (float("-inf") if x == 0 else float("nan")), "log"),
        "exp": unary(math.exp, "exp"),
        "sign": unary(lambda x: x if math.isnan(x) or x == 0 else (1.0 if x > 0 else -1.0), "sign"),
        "random": NativeFunction(lambda it, t, a: rng.random(), "random"),
        "pow": NativeFunction(lambda it, t, a: _safe_pow(to_number(_arg(a, 0), it), to_number(_arg(a, 1), it)), "pow"),
        "max": NativeFunction(lambda it, t, a: _minmax(max, [to_number(x, it) for x in a], float("-inf")), "max"),
        "min": NativeFunction(lambda it, t, a: _minmax(min, [to_number(x, it) for x in a], float("inf")), "min"),
    })
    return m


def _safe_num(fn, x: float) -> float:
    try:
        return float(fn(x))
    except (ValueError, OverflowError):
        return float("nan")


def _safe_pow(base: float, exp: float) -> float:
    try:
        result = base ** exp
        if isinstance(result, complex):
            return float("nan")
        return float(result)
    except (ValueError, OverflowError, ZeroDivisionError):
        return float("nan")


def _minmax(fn, values: list[float], empty: float) -> float:
    if any(math.isnan(v) for v in values):
        return float("nan")
    return fn(values) if values else empty


def make_json() -> JSObject:
    obj = JSObject()

    def js_parse(it, t, a):
        text = to_string(_arg(a, 0), it)
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            it.throw_error("SyntaxError", "Unexpected token in JSON")
        return python_to_js(data)

    def js_stringify(it, t, a):
        value = _arg(a, 0)
        data = js_to_python(value, it)
        if data is _UNSERIALIZABLE:
            return UNDEFINED
        return json.dumps(data, separators=(",", ":"), ensure_ascii=False)

    obj.props["parse"] = NativeFunction(js_parse, "parse")
    obj.props["stringify"] = NativeFunction(js_stringify, "stringify")
    return obj


_UNSERIALIZABLE = object()


def python_to_js(data: Any) -> Any:
    if data is None:
        return NULL
    if isinstance(data, bool):
        return data
    if isinstance(data, (int, float)):
        return float(data)
    if isinstance(data, str):
        return data
    if isinstance(data, list):
        return JSArray([python_to_js(x) for x in data])
    if isinstance(data, dict):
        return JSObject({k: python_to_js(v) for k, v in data.items()})
    return UNDEFINED


def js_to_python(value: Any, interp: Any = None, seen: Optional[set] = None) -> Any:
    seen = seen or set()
    if value is NULL or value is UNDEFINED:
        return None
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return value if value == value else None
    if isinstance(value, str):
        return value
    if isinstance(value, JSArray):
        if id(value) in seen:
            return _UNSERIALIZABLE
        seen = seen | {id(value)}
        out = []
        for el in value.elements:
            item = js_to_python(el, interp, seen)
            out.append(None if item is _UNSERIALIZABLE else item)
        return out
    if isinstance(value, JSObject) and not isinstance(value, JSRegExp):
        if id(value) in seen:
            return _UNSERIALIZABLE
        seen = seen | {id(value)}
        out = {}
        for k, v in value.props.items():
            if is_callable(v):
                continue
            item = js_to_python(v, interp, seen)
            if item is _UNSERIALIZABLE:
                return _UNSERIALIZABLE
            out[k] = item
        return out
    return _UNSERIALIZABLE


def make_regexp_ctor() -> NativeFunction:
    def regexp_ctor(it, t, a):
        pattern = "" if not a else (
            a[0].pattern if isinstance(a[0], JSRegExp) else to_string(a[0], it)
        )
        flags = "" if len(a) < 2 or a[1] is UNDEFINED else to_string(a[1], it)
        return JSRegExp(pattern, flags)
    return NativeFunction(regexp_ctor, "RegExp")


def regexp_method(interp, this: JSRegExp, name: str) -> Optional[NativeFunction]:
    rx = this
    if name == "test":
        def test(it, t, a):
            return compile_js_regex(rx.pattern, rx.flags).search(to_string(_arg(a, 0), it)) is not None
        return NativeFunction(test, "test")
    if name == "exec":
        def exec_(it, t, a):
            m = compile_js_regex(rx.pattern, rx.flags).search(to_string(_arg(a, 0), it))
            if m is None:
                return NULL
            return JSArray([m.group(0)] + ["" if g is None else g for g in m.groups()])
        return NativeFunction(exec_, "exec")
    if name == "toString":
        return NativeFunction(lambda it, t, a: f"/{rx.pattern}/{rx.flags}", "toString")
    return None


def make_date_ctor() -> NativeFunction:
    def date_ctor(it, t, a):
        obj = JSObject()
        obj.class_name = "Object"
        obj.props["getTime"] = NativeFunction(lambda i2, t2, a2: FIXED_EPOCH_MS, "getTime")
        obj.props["valueOf"] = NativeFunction(lambda i2, t2, a2: FIXED_EPOCH_MS, "valueOf")
        obj.props["toString"] = NativeFunction(
            lambda i2, t2, a2: "Wed Jan 01 2020 00:00:00 GMT+0000", "toString"
        )
        obj.props["getFullYear"] = NativeFunction(lambda i2, t2, a2: 2020.0, "getFullYear")
        return obj
    ctor = NativeFunction(date_ctor, "Date")
    ctor.props["now"] = NativeFunction(lambda it, t, a: FIXED_EPOCH_MS, "now")
    return ctor


def make_error_ctor(name: str = "Error") -> NativeFunction:
    def error_ctor(it, t, a):
        obj = JSObject()
        obj.props["name"] = name
        obj.props["message"] = to_string(_arg(a, 0), it) if a else ""
        return obj
    return NativeFunction(error_ctor, name)


def js_atob(it, t, a) -> str:
    text = to_string(_arg(a, 0), it)
    try:
        raw = base64.b64decode(text + "=" * (-len(text) % 4), validate=False)
    except (binascii.Error, ValueError):
        it.throw_error("InvalidCharacterError", "invalid base64")
    return raw.decode("latin-1")


def js_btoa(it, t, a) -> str:
    text = to_string(_arg(a, 0), it)
    try:
        raw = text.encode("latin-1")
    except UnicodeEncodeError:
        it.throw_error("InvalidCharacterError", "character out of range")
    return base64.b64encode(raw).decode("ascii")


def js_parse_int(it, t, a) -> float:
    text = to_string(_arg(a, 0), it).strip(" \t\n\r\v\f")
    radix = 0 if _arg(a, 1) is UNDEFINED else int(to_number(_arg(a, 1), it))
    sign = 1
    if text[:1] in "+-":
        sign = -1 if text[0] == "-" else 1
        text = text[1:]
    if radix in (0, 16) and text[:2].lower() == "0x":
        text = text[2:]
        radix = 16
    if radix == 0:
        radix = 10
    digits = ""
    for ch in text:
        try:
            if int(ch, radix) < radix:
                digits += ch
            else:
                break
        except ValueError:
            break
    if not digits:
        return float("nan")
    return float(sign * int(digits, radix))


def js_parse_float(it, t, a) -> float:
    text = to_string(_arg(a, 0), it).strip(" \t\n\r\v\f")
    m = re.match(r"^[+-]?(Infinity|\d+\.?\d*([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?)", text)
    if not m:
        return float("nan")
    frag = m.group(0)
    if frag.endswith("Infinity"):
        return float("-inf") if frag.startswith("-") else float("inf")
    return float(frag)


def js_escape(it, t, a) -> str:
    text = to_string(_arg(a, 0), it)
    out = []
    for ch in text:
        code = ord(ch)
        if ch.isalnum() and ch.isascii() or ch in "@*_+-./":
            out.append(ch)
        elif code < 256:
            out.append(f"%{code:02X}")
        else:
            out.append(f"%u{code:04X}")
    return "".join(out)


def js_unescape(it, t, a) -> str:
    text = to_string(_arg(a, 0), it)
    out = []
    i = 0
    while i < len(text):
        if text[i] == "%" and text[i + 1:i + 2] == "u" and len(text) >= i + 6:
            try:
                out.append(chr(int(text[i + 2:i + 6], 16)))
                i += 6
                continue
            except ValueError:
                pass
        if text[i] == "%" and len(text) >= i + 3:
            try:
                out.append(chr(int(text[i + 1:i + 3], 16)))
                i += 3
                continue
            except ValueError:
                pass
        out.append(text[i])
        i += 1
    return "".join(out)
