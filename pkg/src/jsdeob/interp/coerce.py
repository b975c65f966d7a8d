"""ECMAScript abstract coercion operations.

Covers ToPrimitive / ToNumber / ToString / ToBoolean / ToInt32 / ToUint32
and abstract equality for the value universe in ``values``.  Object
coercion dispatches through valueOf/toString in spec order; arrays
stringify by comma-join, plain objects as "[object Object]".
"""

from __future__ import annotations

import math
import re
from typing import Any

from .values import (
    NULL,
    UNDEFINED,
    CapturedCode,
    JSArray,
    JSFunction,
    JSObject,
    JSRegExp,
    NativeFunction,
    is_callable,
)


class CoercionError(Exception):
    """Raised when coercion needs a throw (e.g. ToPrimitive failure)."""


def number_to_string(value: float) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    if value == 0:
        return "0"
    if value == int(value) and abs(value) < 1e21:
        return str(int(value))
    text = repr(value)
    if "e" in text:
        mantissa, exp = text.split("e")
        exp_val = int(exp)
        sign = "+" if exp_val >= 0 else "-"
        text = f"{mantissa}e{sign}{abs(exp_val)}"
    elif text.startswith("0."):
        text = text
    return text


_TRIM = " \t\n\r\v\f﻿   "
_HEX_RE = re.compile(r"^[+-]?0[xX][0-9a-fA-F]+$")
_OCT_RE = re.compile(r"^0[oO][0-7]+$")
_BIN_RE = re.compile(r"^0[bB][01]+$")
_DEC_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_INF_RE = re.compile(r"^[+-]?Infinity$")


def string_to_number(text: str) -> float:
    text = text.strip(_TRIM)
    if text == "":
        return 0.0
    if _HEX_RE.match(text):
        sign = -1.0 if text[0] == "-" else 1.0
        digits = text.lstrip("+-")
        return sign * float(int(digits, 16))
    if _OCT_RE.match(text):
        return float(int(text[2:], 8))
    if _BIN_RE.match(text):
        return float(int(text[2:], 2))
    if _INF_RE.match(text):
        return float("-inf") if text[0] == "-" else float("inf")
    if _DEC_RE.match(text):
        return float(text)
    return float("nan")


def to_primitive(value: Any, hint: str = "default", interp: Any = None) -> Any:
    if not isinstance(value, (JSObject, JSFunction, NativeFunction)):
        return value
    order = ("toString", "valueOf") if hint == "string" else ("valueOf", "toString")
    for method in order:
        result = _call_conversion(value, method, interp)
        if result is not _NO_RESULT and not isinstance(
            result, (JSObject, JSFunction, NativeFunction)
        ):
            return result
    raise CoercionError("cannot convert object to primitive value")


_NO_RESULT = object()


def _call_conversion(value: Any, method: str, interp: Any) -> Any:
    # User-defined overrides first.
    props = getattr(value, "props", None)
    if props and method in props and is_callable(props[method]):
        if interp is not None:
            return interp.call_function(props[method], value, [])
        return _NO_RESULT
    if method == "valueOf":
        return _NO_RESULT  # default valueOf returns the object itself
    # Default toString.
    if isinstance(value, JSArray):
        if interp is not None:
            return interp.array_join(value, ",")
        return ",".join(
            "" if el is UNDEFINED or el is NULL else to_string(el)
            for el in value.elements
        )
    if isinstance(value, JSRegExp):
        return f"/{value.pattern}/{value.flags}"
    if isinstance(value, JSFunction):
        if interp is not None:
            return interp.function_source(value)
        return f"function {value.name}() {{ }}"
    if isinstance(value, NativeFunction):
        return f"function {value.name}() {{ [native code] }}"
    return "[object Object]"


def to_number(value: Any, interp: Any = None) -> float:
    if isinstance(value, bool):
        return 1.0 if value else 0.0
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        return string_to_number(value)
    if value is UNDEFINED:
        return float("nan")
    if value is NULL:
        return 0.0
    prim = to_primitive(value, "number", interp)
    return to_number(prim, interp)


def to_string(value: Any, interp: Any = None) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return number_to_string(value)
    if isinstance(value, str):
        return value
    if value is UNDEFINED:
        return "undefined"
    if value is NULL:
        return "null"
    if isinstance(value, CapturedCode):
        return value.source
    prim = to_primitive(value, "string", interp)
    return to_string(prim, interp)


def to_boolean(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return not (value == 0 or math.isnan(value))
    if isinstance(value, str):
        return len(value) > 0
    if value is UNDEFINED or value is NULL:
        return False
    return True


def to_int32(value: Any, interp: Any = None) -> int:
    n = to_number(value, interp)
    if math.isnan(n) or math.isinf(n):
        return 0
    n = int(n)
    n &= 0xFFFFFFFF
    if n >= 0x80000000:
        n -= 0x100000000
    return n


def to_uint32(value: Any, interp: Any = None) -> int:
    n = to_number(value, interp)
    if math.isnan(n) or math.isinf(n):
        return 0
    return int(n) & 0xFFFFFFFF


def strict_equals(a: Any, b: Any) -> bool:
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    if isinstance(a, bool) and isinstance(b, bool):
        return a is b
    if isinstance(a, float) and isinstance(b, float):
        return a == b  # NaN != NaN falls out of float semantics
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if (a is UNDEFINED and b is UNDEFINED) or (a is NULL and b is NULL):
        return True
    return a is b


def abstract_equals(a: Any, b: Any, interp: Any = None) -> bool:
    a_null = a is UNDEFINED or a is NULL
    b_null = b is UNDEFINED or b is NULL
    if a_null or b_null:
        return a_null and b_null
    a_obj = isinstance(a, (JSObject, JSFunction, NativeFunction))
    b_obj = isinstance(b, (JSObject, JSFunction, NativeFunction))
    if a_obj and b_obj:
        return a is b
    if a_obj:
        return abstract_equals(to_primitive(a, "default", interp), b, interp)
    if b_obj:
        return abstract_equals(a, to_primitive(b, "default", interp), interp)
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return to_number(a, interp) == to_number(b, interp)
