"""Tokenizer for the supported ECMAScript subset.

Regex-vs-division ambiguity is resolved with the usual previous-token
heuristic.  Lexical errors never raise: the lexer records a diagnostic and
resynchronizes, which is what keeps tolerant parsing total.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Optional

KEYWORDS = frozenset(
    """var let const function return if else while do for break continue
    switch case default new delete typeof instanceof in void this null true
    false try catch finally throw""".split()
)

# Words the parser treats as the start of an unsupported construct.
UNSUPPORTED_KEYWORDS = frozenset(
    "class import export super yield async await with debugger".split()
)

PUNCTUATORS = [
    ">>>=", "===", "!==", ">>>", "<<=", ">>=", "**=",
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "<<", ">>", "=>", "**", "...",
    "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-", "*", "/",
    "%", "&", "|", "^", "!", "~", "?", ":", "=", ".", "`",
]

_SIMPLE_ESCAPES = {
    "n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v",
    "0": "\0", "'": "'", '"': '"', "\\": "\\", "\n": "",
}


@dataclass
class Token:
    type: str  # ident | keyword | num | str | regex | punct | eof
    value: object
    start: int
    end: int
    newline_before: bool = False

    def is_punct(self, value: str) -> bool:
        return self.type == "punct" and self.value == value

    def is_keyword(self, value: str) -> bool:
        return self.type == "keyword" and self.value == value


@dataclass
class LexError:
    offset: int
    message: str


def is_id_start(ch: str) -> bool:
    if ch in "$_":
        return True
    if ch.isascii():
        return ch.isalpha()
    # Tolerant: obfuscators use exotic identifiers (kaomoji encodings), so
    # any non-ASCII, non-whitespace character may open an identifier.
    return not ch.isspace()


def is_id_part(ch: str) -> bool:
    return is_id_start(ch) or (ch.isdigit() and ch.isascii()) or ch in "‌‍"


@dataclass
class Lexer:
    source: str
    pos: int = 0
    errors: list[LexError] = field(default_factory=list)
    _tokens: list[Token] = field(default_factory=list)

    def tokenize(self) -> list[Token]:
        """Full token list (regex decided by previous-token heuristic)."""
        while True:
            tok = self._next_token()
            self._tokens.append(tok)
            if tok.type == "eof":
                break
        return self._tokens

    # -- scanning ---------------------------------------------------------

    def _skip_trivia(self) -> bool:
        saw_newline = False
        src, n = self.source, len(self.source)
        while self.pos < n:
            ch = src[self.pos]
            if ch in "\n\r  ":
                saw_newline = True
                self.pos += 1
            elif ch.isspace():
                self.pos += 1
            elif src.startswith("//", self.pos):
                end = src.find("\n", self.pos)
                self.pos = n if end < 0 else end
            elif src.startswith("/*", self.pos):
                end = src.find("*/", self.pos + 2)
                if end < 0:
                    self.errors.append(LexError(self.pos, "unterminated comment"))
                    self.pos = n
                else:
                    if "\n" in src[self.pos:end]:
                        saw_newline = True
                    self.pos = end + 2
            else:
                break
        return saw_newline

    def _regex_allowed(self) -> bool:
        for tok in reversed(self._tokens):
            if tok.type in ("ident", "num", "str", "regex"):
                return False
            if tok.type == "keyword":
                return tok.value not in ("this", "null", "true", "false")
            if tok.type == "punct":
                return tok.value not in (")", "]", "}", "++", "--")
            return True
        return True

    def _next_token(self) -> Token:
        newline = self._skip_trivia()
        start = self.pos
        src, n = self.source, len(self.source)
        if start >= n:
            return Token("eof", None, start, start, newline)
        ch = src[start]

        if ch in "\"'":
            value = self._read_string(ch)
            return Token("str", value, start, self.pos, newline)
        if ch.isdigit() or (ch == "." and start + 1 < n and src[start + 1].isdigit()):
            value = self._read_number()
            return Token("num", value, start, self.pos, newline)
        if is_id_start(ch):
            self.pos += 1
            while self.pos < n and is_id_part(src[self.pos]):
                self.pos += 1
            word = src[start:self.pos]
            kind = "keyword" if word in KEYWORDS else "ident"
            return Token(kind, word, start, self.pos, newline)
        if ch == "/" and self._regex_allowed():
            value = self._read_regex()
            if value is not None:
                return Token("regex", value, start, self.pos, newline)
        for punct in PUNCTUATORS:
            if src.startswith(punct, start):
                self.pos = start + len(punct)
                return Token("punct", punct, start, self.pos, newline)
        self.errors.append(LexError(start, f"unexpected character {ch!r}"))
        self.pos += 1
        return self._next_token()

    def _read_string(self, quote: str) -> str:
        src, n = self.source, len(self.source)
        self.pos += 1
        out: list[str] = []
        while self.pos < n:
            ch = src[self.pos]
            if ch == quote:
                self.pos += 1
                return "".join(out)
            if ch in "\n\r":
                break
            if ch == "\\":
                self.pos += 1
                out.append(self._read_escape())
            else:
                out.append(ch)
                self.pos += 1
        self.errors.append(LexError(self.pos, "unterminated string literal"))
        return "".join(out)

    def _read_escape(self) -> str:
        src, n = self.source, len(self.source)
        if self.pos >= n:
            return ""
        ch = src[self.pos]
        if ch == "x":
            digits = src[self.pos + 1:self.pos + 3]
            if len(digits) == 2 and _is_hex(digits):
                self.pos += 3
                return chr(int(digits, 16))
            self.pos += 1
            return "x"
        if ch == "u":
            if src[self.pos + 1:self.pos + 2] == "{":
                end = src.find("}", self.pos + 2)
                if end > 0 and _is_hex(src[self.pos + 2:end]):
                    value = int(src[self.pos + 2:end], 16)
                    self.pos = end + 1
                    return chr(value)
            digits = src[self.pos + 1:self.pos + 5]
            if len(digits) == 4 and _is_hex(digits):
                self.pos += 5
                return chr(int(digits, 16))
            self.pos += 1
            return "u"
        if ch in "01234567":
            # Legacy octal escape, up to three digits (non-strict sources).
            digits = ch
            self.pos += 1
            while (
                len(digits) < 3
                and self.pos < n
                and src[self.pos] in "01234567"
                and int(digits + src[self.pos], 8) < 256
            ):
                digits += src[self.pos]
                self.pos += 1
            if digits == "0" and (self.pos >= n or src[self.pos] not in "0123456789"):
                return "\0"
            return chr(int(digits, 8))
        self.pos += 1
        if ch in _SIMPLE_ESCAPES:
            return _SIMPLE_ESCAPES[ch]
        if ch in "  ":
            return ""
        return ch

    def _read_number(self) -> float:
        src, n = self.source, len(self.source)
        start = self.pos
        if src.startswith(("0x", "0X"), start):
            self.pos += 2
            while self.pos < n and _is_hex(src[self.pos]):
                self.pos += 1
            return float(int(src[start + 2:self.pos] or "0", 16))
        if src.startswith(("0o", "0O"), start):
            self.pos += 2
            while self.pos < n and src[self.pos] in "01234567":
                self.pos += 1
            return float(int(src[start + 2:self.pos] or "0", 8))
        if src.startswith(("0b", "0B"), start):
            self.pos += 2
            while self.pos < n and src[self.pos] in "01":
                self.pos += 1
            return float(int(src[start + 2:self.pos] or "0", 2))
        while self.pos < n and src[self.pos].isdigit():
            self.pos += 1
        # Legacy octal: 0 followed only by octal digits.
        text = src[start:self.pos]
        if len(text) > 1 and text[0] == "0" and all(c in "01234567" for c in text):
            if self.pos >= n or src[self.pos] not in ".eE89":
                return float(int(text, 8))
        if self.pos < n and src[self.pos] == ".":
            self.pos += 1
            while self.pos < n and src[self.pos].isdigit():
                self.pos += 1
        if self.pos < n and src[self.pos] in "eE":
            mark = self.pos
            self.pos += 1
            if self.pos < n and src[self.pos] in "+-":
                self.pos += 1
            if self.pos < n and src[self.pos].isdigit():
                while self.pos < n and src[self.pos].isdigit():
                    self.pos += 1
            else:
                self.pos = mark
        try:
            return float(src[start:self.pos])
        except ValueError:
            self.errors.append(LexError(start, "malformed number"))
            return 0.0

    def _read_regex(self) -> Optional[tuple[str, str]]:
        src, n = self.source, len(self.source)
        start = self.pos
        self.pos += 1
        in_class = False
        while self.pos < n:
            ch = src[self.pos]
            if ch == "\\":
                self.pos += 2
                continue
            if ch in "\n\r":
                self.pos = start
                return None
            if ch == "[":
                in_class = True
            elif ch == "]":
                in_class = False
            elif ch == "/" and not in_class:
                pattern = src[start + 1:self.pos]
                self.pos += 1
                flag_start = self.pos
                while self.pos < n and is_id_part(src[self.pos]):
                    self.pos += 1
                return pattern, src[flag_start:self.pos]
            self.pos += 1
        self.pos = start
        return None


def _is_hex(text: str) -> bool:
    return bool(text) and all(c in "0123456789abcdefABCDEF" for c in text)


def tokenize(source: str) -> tuple[list[Token], list[LexError]]:
    lexer = Lexer(source)
    tokens = lexer.tokenize()
    return tokens, lexer.errors
