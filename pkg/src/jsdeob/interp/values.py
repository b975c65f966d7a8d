"""Value universe of the sandboxed interpreter.

Python natives carry the primitive tags: ``bool`` for booleans, ``float``
for numbers, ``str`` for strings.  Undefined and null are singletons so
identity checks work.  Host resources are never referenced from any value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional


class JSUndefined:
    _instance: Optional["JSUndefined"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "undefined"


class JSNull:
    _instance: Optional["JSNull"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "null"


UNDEFINED = JSUndefined()
NULL = JSNull()


class JSObject:
    """Plain object: ordered string-keyed property map."""

    class_name = "Object"

    def __init__(self, props: Optional[dict[str, Any]] = None):
        self.props: dict[str, Any] = props or {}

    def get_own(self, key: str):
        return self.props.get(key, UNDEFINED)

    def has_own(self, key: str) -> bool:
        return key in self.props

    def set(self, key: str, value: Any) -> None:
        self.props[key] = value

    def delete(self, key: str) -> bool:
        return self.props.pop(key, None) is not None or True

    def __repr__(self):
        return f"JSObject({list(self.props)[:4]})"


class JSArray(JSObject):
    class_name = "Array"

    def __init__(self, elements: Optional[list[Any]] = None):
        super().__init__()
        self.elements: list[Any] = elements if elements is not None else []

    def __repr__(self):
        return f"JSArray(len={len(self.elements)})"


@dataclass
class JSFunction:
    """Interpreted function: AST body plus captured environment."""

    params: list[str]
    body: Any  # BlockStatement node
    env: Any  # Environment
    name: str = ""
    # Set when the function came from the Function constructor sink; calling
    # it either interprets a single-return body or raises a capture signal.
    from_code_string: Optional[str] = None
    props: dict[str, Any] = field(default_factory=dict)

    class_name = "Function"

    def __repr__(self):
        return f"JSFunction({self.name or '<anonymous>'})"


@dataclass
class NativeFunction:
    fn: Callable  # fn(interp, this, args) -> value
    name: str = ""
    props: dict[str, Any] = field(default_factory=dict)

    class_name = "Function"

    def __repr__(self):
        return f"NativeFunction({self.name})"


class JSRegExp(JSObject):
    class_name = "RegExp"

    def __init__(self, pattern: str, flags: str):
        super().__init__()
        self.pattern = pattern
        self.flags = flags
        self.last_index = 0

    def __repr__(self):
        return f"/{self.pattern}/{self.flags}"


@dataclass
class CapturedCode:
    """Source text intercepted at a dynamic-code sink, never executed."""

    source: str
    sink: str  # eval | Function | setTimeout | setInterval | document.write


def is_callable(value: Any) -> bool:
    return isinstance(value, (JSFunction, NativeFunction))


def type_of(value: Any) -> str:
    if value is UNDEFINED:
        return "undefined"
    if value is NULL:
        return "object"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, float):
        return "number"
    if isinstance(value, str):
        return "string"
    if is_callable(value):
        return "function"
    return "object"
