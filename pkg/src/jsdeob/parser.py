"""Recursive-descent parser with strict and tolerant modes.

Tolerant mode is total: any input yields a Program.  Unparseable stretches
become ``RecoveredStatement`` placeholders, and constructs outside the
supported grammar (classes, arrows, templates, modules, async) become
``OpaqueStatement`` nodes that carry their raw text and are skipped by all
passes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast_nodes import Node
from .lexer import Token, UNSUPPORTED_KEYWORDS, tokenize


class ParseError(Exception):
    def __init__(self, offset: int, message: str):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.message = message


class _Unsupported(Exception):
    """Internal: statement uses a construct outside the supported grammar."""


@dataclass
class Diagnostic:
    offset: int
    message: str
    kind: str = "recovery"  # recovery | lexical | note


ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=", "**="}

_BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6, "!=": 6, "===": 6, "!==": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "in": 7, "instanceof": 7,
    "<<": 8, ">>": 8, ">>>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
    "**": 11,
}

_UNARY_OPS = {"+", "-", "!", "~", "typeof", "void", "delete"}


class Parser:
    def __init__(self, source: str, mode: str = "tolerant"):
        if mode not in ("strict", "tolerant"):
            raise ValueError(f"unknown parse mode: {mode}")
        self.source = source
        self.mode = mode
        self.tokens, lex_errors = tokenize(source)
        self.index = 0
        self.diagnostics: list[Diagnostic] = [
            Diagnostic(e.offset, e.message, "lexical") for e in lex_errors
        ]
        if mode == "strict" and self.diagnostics:
            first = self.diagnostics[0]
            raise ParseError(first.offset, first.message)

    # -- token helpers ----------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def peek(self, offset: int = 1) -> Token:
        i = min(self.index + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.index]
        if self.index < len(self.tokens) - 1:
            self.index += 1
        return tok

    def at_punct(self, value: str) -> bool:
        return self.current.is_punct(value)

    def at_keyword(self, value: str) -> bool:
        return self.current.is_keyword(value)

    def eat_punct(self, value: str) -> bool:
        if self.at_punct(value):
            self.advance()
            return True
        return False

    def expect_punct(self, value: str) -> Token:
        if self.at_punct(value):
            return self.advance()
        raise ParseError(self.current.start, f"expected {value!r}")

    def _consume_semicolon(self) -> None:
        if self.eat_punct(";"):
            return
        tok = self.current
        if tok.type == "eof" or tok.is_punct("}") or tok.newline_before:
            return
        raise ParseError(tok.start, "expected ';'")

    # -- entry ------------------------------------------------------------

    def parse_program(self) -> Node:
        body: list[Node] = []
        start = self.current.start
        while self.current.type != "eof":
            stmt = self._statement_tolerant()
            if stmt is not None:
                body.append(stmt)
        return Node("Program", (start, len(self.source)), body=body)

    def _statement_tolerant(self) -> Optional[Node]:
        mark = self.index
        try:
            return self.parse_statement()
        except _Unsupported:
            self.index = mark
            return self._consume_opaque("OpaqueStatement")
        except ParseError as err:
            if self.mode == "strict":
                raise
            self.index = mark
            node = self._recover_statement(err)
            return node

    def _recover_statement(self, err: ParseError) -> Node:
        start_tok = self.current
        start = start_tok.start
        self.diagnostics.append(Diagnostic(err.offset, err.message))
        depth = 0
        while self.current.type != "eof":
            tok = self.advance()
            if tok.type == "punct":
                if tok.value in "([{":
                    depth += 1
                elif tok.value in ")]}":
                    if depth == 0 and tok.value == "}":
                        self.index -= 1
                        break
                    depth = max(0, depth - 1)
                elif tok.value == ";" and depth == 0:
                    break
            nxt = self.current
            if depth == 0 and nxt.newline_before:
                break
        end = self.tokens[self.index - 1].end if self.index > 0 else start
        if end <= start:
            # Zero progress (e.g. lone '}'): swallow one token to stay total.
            end = self.advance().end
        raw = self.source[start:end]
        return Node("RecoveredStatement", (start, end), raw=raw)

    def _consume_opaque(self, node_type: str) -> Node:
        start = self.current.start
        depth = 0
        while self.current.type != "eof":
            tok = self.advance()
            if tok.type == "punct":
                if tok.value in "([{":
                    depth += 1
                elif tok.value in ")]}":
                    if depth == 0 and tok.value == "}":
                        self.index -= 1
                        break
                    depth -= 1
                    if depth == 0 and tok.value == "}":
                        # Block-shaped construct (class body, function body).
                        if not self.current.is_punct("(") and not self.current.is_punct("."):
                            break
                elif tok.value == ";" and depth == 0:
                    break
            if depth == 0 and self.current.newline_before and not self.current.is_punct("=>"):
                if tok.type != "punct" or tok.value not in ("=>", "=", ",", "(", "[", "{", "."):
                    break
        end = self.tokens[self.index - 1].end if self.index > 0 else start
        if end <= start:
            end = self.advance().end
        return Node(node_type, (start, end), raw=self.source[start:end])

    # -- statements -------------------------------------------------------

    def parse_statement(self) -> Node:
        tok = self.current
        if tok.type == "keyword":
            handler = {
                "var": self._var_statement,
                "let": self._var_statement,
                "const": self._var_statement,
                "function": self._function_declaration,
                "if": self._if_statement,
                "switch": self._switch_statement,
                "while": self._while_statement,
                "do": self._do_while_statement,
                "for": self._for_statement,
                "return": self._return_statement,
                "break": lambda: self._break_continue("BreakStatement"),
                "continue": lambda: self._break_continue("ContinueStatement"),
                "try": self._try_statement,
                "throw": self._throw_statement,
            }.get(tok.value)
            if handler is not None:
                return handler()
        if tok.type == "ident" and tok.value in UNSUPPORTED_KEYWORDS:
            raise _Unsupported()
        if tok.is_punct("`"):
            raise _Unsupported()
        if tok.is_punct("{"):
            return self._block_statement()
        if tok.is_punct(";"):
            self.advance()
            return Node("EmptyStatement", (tok.start, tok.end))
        if tok.type == "ident" and self.peek().is_punct(":"):
            label = self.advance().value
            self.advance()
            body = self.parse_statement()
            return Node("LabeledStatement", (tok.start, _end(body, tok)), label=label, body=body)
        expr = self.parse_expression()
        self._consume_semicolon()
        return Node("ExpressionStatement", (tok.start, expr.span[1] if expr.span else tok.end), expression=expr)

    def _block_statement(self) -> Node:
        start = self.expect_punct("{").start
        body: list[Node] = []
        while not self.at_punct("}"):
            if self.current.type == "eof":
                raise ParseError(self.current.start, "unterminated block")
            stmt = self._statement_tolerant() if self.mode == "tolerant" else self.parse_statement()
            if stmt is not None:
                body.append(stmt)
        end = self.expect_punct("}").end
        return Node("BlockStatement", (start, end), body=body)

    def _var_statement(self) -> Node:
        kw = self.advance()
        node = self._var_declaration_core(kw)
        self._consume_semicolon()
        return node

    def _var_declaration_core(self, kw: Token, no_in: bool = False) -> Node:
        declarations = []
        while True:
            ident = self._binding_target()
            init = None
            if self.eat_punct("="):
                init = self.parse_assignment(no_in=no_in)
            declarations.append(
                Node("VariableDeclarator", (ident.span[0] if ident.span else kw.start,
                                            _end(init or ident, kw)),
                     id=ident, init=init)
            )
            if not self.eat_punct(","):
                break
        return Node("VariableDeclaration", (kw.start, _end(declarations[-1], kw)),
                    kind=kw.value, declarations=declarations)

    def _binding_target(self) -> Node:
        tok = self.current
        if tok.is_punct("["):
            return self._array_pattern()
        if tok.type in ("ident", "keyword") and tok.type == "ident":
            self.advance()
            return Node("Identifier", (tok.start, tok.end), name=tok.value)
        raise ParseError(tok.start, "expected binding identifier")

    def _array_pattern(self) -> Node:
        start = self.expect_punct("[").start
        elements: list[Optional[Node]] = []
        while not self.at_punct("]"):
            if self.at_punct(","):
                self.advance()
                elements.append(None)
                continue
            elements.append(self._binding_target())
            if not self.at_punct("]"):
                self.expect_punct(",")
        end = self.expect_punct("]").end
        return Node("ArrayPattern", (start, end), elements=elements)

    def _function_declaration(self) -> Node:
        kw = self.advance()
        if self.current.type != "ident":
            raise ParseError(self.current.start, "expected function name")
        name_tok = self.advance()
        ident = Node("Identifier", (name_tok.start, name_tok.end), name=name_tok.value)
        params = self._param_list()
        body = self._block_statement()
        return Node("FunctionDeclaration", (kw.start, _end(body, kw)),
                    id=ident, params=params, body=body)

    def _param_list(self) -> list[Node]:
        self.expect_punct("(")
        params = []
        while not self.at_punct(")"):
            if self.at_punct("..."):
                raise _Unsupported()
            tok = self.current
            if tok.type != "ident":
                raise ParseError(tok.start, "expected parameter name")
            self.advance()
            if self.at_punct("="):
                raise _Unsupported()
            params.append(Node("Identifier", (tok.start, tok.end), name=tok.value))
            if not self.at_punct(")"):
                self.expect_punct(",")
        self.expect_punct(")")
        return params

    def _if_statement(self) -> Node:
        kw = self.advance()
        self.expect_punct("(")
        test = self.parse_expression()
        self.expect_punct(")")
        consequent = self.parse_statement()
        alternate = None
        if self.at_keyword("else"):
            self.advance()
            alternate = self.parse_statement()
        return Node("IfStatement", (kw.start, _end(alternate or consequent, kw)),
                    test=test, consequent=consequent, alternate=alternate)

    def _switch_statement(self) -> Node:
        kw = self.advance()
        self.expect_punct("(")
        discriminant = self.parse_expression()
        self.expect_punct(")")
        self.expect_punct("{")
        cases = []
        while not self.at_punct("}"):
            if self.at_keyword("case"):
                case_kw = self.advance()
                test = self.parse_expression()
            elif self.at_keyword("default"):
                case_kw = self.advance()
                test = None
            else:
                raise ParseError(self.current.start, "expected 'case' or 'default'")
            self.expect_punct(":")
            consequent = []
            while not (self.at_punct("}") or self.at_keyword("case") or self.at_keyword("default")):
                stmt = self._statement_tolerant() if self.mode == "tolerant" else self.parse_statement()
                if stmt is not None:
                    consequent.append(stmt)
            end = consequent[-1].span[1] if consequent and consequent[-1].span else case_kw.end
            cases.append(Node("SwitchCase", (case_kw.start, end), test=test, consequent=consequent))
        end_tok = self.expect_punct("}")
        return Node("SwitchStatement", (kw.start, end_tok.end), discriminant=discriminant, cases=cases)

    def _while_statement(self) -> Node:
        kw = self.advance()
        self.expect_punct("(")
        test = self.parse_expression()
        self.expect_punct(")")
        body = self.parse_statement()
        return Node("WhileStatement", (kw.start, _end(body, kw)), test=test, body=body)

    def _do_while_statement(self) -> Node:
        kw = self.advance()
        body = self.parse_statement()
        if not self.at_keyword("while"):
            raise ParseError(self.current.start, "expected 'while'")
        self.advance()
        self.expect_punct("(")
        test = self.parse_expression()
        end = self.expect_punct(")").end
        self.eat_punct(";")
        return Node("DoWhileStatement", (kw.start, end), body=body, test=test)

    def _for_statement(self) -> Node:
        kw = self.advance()
        self.expect_punct("(")
        init: Optional[Node] = None
        if self.at_punct(";"):
            self.advance()
        elif self.current.type == "keyword" and self.current.value in ("var", "let", "const"):
            decl_kw = self.advance()
            init = self._var_declaration_core(decl_kw, no_in=True)
            if self.at_keyword("in"):
                return self._for_in_tail(kw, init)
            if self.current.type == "ident" and self.current.value == "of":
                raise _Unsupported()
            self.expect_punct(";")
        else:
            init = self.parse_expression(no_in=True)
            if self.at_keyword("in"):
                return self._for_in_tail(kw, init)
            if self.current.type == "ident" and self.current.value == "of":
                raise _Unsupported()
            init = Node("ExpressionStatement", init.span, expression=init)
            self.expect_punct(";")
        test = None if self.at_punct(";") else self.parse_expression()
        self.expect_punct(";")
        update = None if self.at_punct(")") else self.parse_expression()
        self.expect_punct(")")
        body = self.parse_statement()
        return Node("ForStatement", (kw.start, _end(body, kw)),
                    init=init, test=test, update=update, body=body)

    def _for_in_tail(self, kw: Token, left: Node) -> Node:
        self.advance()  # in
        right = self.parse_expression()
        self.expect_punct(")")
        body = self.parse_statement()
        return Node("ForInStatement", (kw.start, _end(body, kw)), left=left, right=right, body=body)

    def _return_statement(self) -> Node:
        kw = self.advance()
        argument = None
        tok = self.current
        if not (tok.is_punct(";") or tok.is_punct("}") or tok.type == "eof" or tok.newline_before):
            argument = self.parse_expression()
        self._consume_semicolon()
        return Node("ReturnStatement", (kw.start, _end(argument, kw) if argument else kw.end),
                    argument=argument)

    def _break_continue(self, node_type: str) -> Node:
        kw = self.advance()
        label = None
        tok = self.current
        if tok.type == "ident" and not tok.newline_before:
            label = self.advance().value
        self._consume_semicolon()
        return Node(node_type, (kw.start, kw.end), label=label)

    def _try_statement(self) -> Node:
        kw = self.advance()
        block = self._block_statement()
        handler = None
        finalizer = None
        if self.at_keyword("catch"):
            catch_kw = self.advance()
            param = None
            if self.eat_punct("("):
                tok = self.current
                if tok.type != "ident":
                    raise ParseError(tok.start, "expected catch parameter")
                self.advance()
                param = Node("Identifier", (tok.start, tok.end), name=tok.value)
                self.expect_punct(")")
            body = self._block_statement()
            handler = Node("CatchClause", (catch_kw.start, _end(body, catch_kw)), param=param, body=body)
        if self.at_keyword("finally"):
            self.advance()
            finalizer = self._block_statement()
        if handler is None and finalizer is None:
            raise ParseError(self.current.start, "expected 'catch' or 'finally'")
        return Node("TryStatement", (kw.start, _end(finalizer or handler, kw)),
                    block=block, handler=handler, finalizer=finalizer)

    def _throw_statement(self) -> Node:
        kw = self.advance()
        if self.current.newline_before:
            raise ParseError(self.current.start, "newline after 'throw'")
        argument = self.parse_expression()
        self._consume_semicolon()
        return Node("ThrowStatement", (kw.start, _end(argument, kw)), argument=argument)

    # -- expressions ------------------------------------------------------

    def parse_expression(self, no_in: bool = False) -> Node:
        expr = self.parse_assignment(no_in=no_in)
        if self.at_punct(","):
            expressions = [expr]
            while self.eat_punct(","):
                expressions.append(self.parse_assignment(no_in=no_in))
            span = (expressions[0].span[0], expressions[-1].span[1]) if expressions[0].span and expressions[-1].span else None
            return Node("SequenceExpression", span, expressions=expressions)
        return expr

    def parse_assignment(self, no_in: bool = False) -> Node:
        left = self._conditional(no_in=no_in)
        tok = self.current
        if tok.type == "punct" and tok.value in ASSIGN_OPS:
            op = self.advance().value
            target = self._to_assignment_target(left, op)
            right = self.parse_assignment(no_in=no_in)
            span = (target.span[0], right.span[1]) if target.span and right.span else None
            return Node("AssignmentExpression", span, operator=op, left=target, right=right)
        return left

    def _to_assignment_target(self, node: Node, op: str) -> Node:
        if node.type in ("Identifier", "MemberExpression", "ArrayPattern"):
            return node
        if node.type == "ArrayExpression" and op == "=":
            elements: list[Optional[Node]] = []
            for el in node.elements:
                elements.append(None if el is None else self._to_assignment_target(el, "="))
            return Node("ArrayPattern", node.span, elements=elements)
        raise ParseError(node.span[0] if node.span else 0, "invalid assignment target")

    def _conditional(self, no_in: bool = False) -> Node:
        test = self._binary(0, no_in=no_in)
        if self.at_punct("?"):
            self.advance()
            consequent = self.parse_assignment()
            self.expect_punct(":")
            alternate = self.parse_assignment(no_in=no_in)
            span = (test.span[0], alternate.span[1]) if test.span and alternate.span else None
            return Node("ConditionalExpression", span, test=test,
                        consequent=consequent, alternate=alternate)
        return test

    def _binary(self, min_prec: int, no_in: bool = False) -> Node:
        left = self._unary()
        while True:
            tok = self.current
            op = None
            if tok.type == "punct" and tok.value in _BINARY_PRECEDENCE:
                op = tok.value
            elif tok.type == "keyword" and tok.value in ("in", "instanceof"):
                if tok.value == "in" and no_in:
                    break
                op = tok.value
            if op is None:
                break
            prec = _BINARY_PRECEDENCE[op]
            if prec <= min_prec:
                break
            self.advance()
            right = self._binary(prec if op != "**" else prec - 1, no_in=no_in)
            node_type = "LogicalExpression" if op in ("&&", "||") else "BinaryExpression"
            span = (left.span[0], right.span[1]) if left.span and right.span else None
            left = Node(node_type, span, operator=op, left=left, right=right)
        return left

    def _unary(self) -> Node:
        tok = self.current
        if (tok.type == "punct" and tok.value in ("+", "-", "!", "~")) or (
            tok.type == "keyword" and tok.value in ("typeof", "void", "delete")
        ):
            self.advance()
            argument = self._unary()
            span = (tok.start, argument.span[1]) if argument.span else (tok.start, tok.end)
            return Node("UnaryExpression", span, operator=str(tok.value), argument=argument)
        if tok.is_punct("++") or tok.is_punct("--"):
            self.advance()
            argument = self._unary()
            span = (tok.start, argument.span[1]) if argument.span else (tok.start, tok.end)
            return Node("UpdateExpression", span, operator=str(tok.value), argument=argument, prefix=True)
        expr = self._postfix()
        return expr

    def _postfix(self) -> Node:
        expr = self._call_member(self._primary())
        tok = self.current
        if (tok.is_punct("++") or tok.is_punct("--")) and not tok.newline_before:
            self.advance()
            span = (expr.span[0], tok.end) if expr.span else None
            return Node("UpdateExpression", span, operator=str(tok.value), argument=expr, prefix=False)
        return expr

    def _call_member(self, expr: Node, allow_call: bool = True) -> Node:
        while True:
            tok = self.current
            if tok.is_punct("."):
                self.advance()
                prop_tok = self.current
                if prop_tok.type not in ("ident", "keyword"):
                    raise ParseError(prop_tok.start, "expected property name")
                self.advance()
                prop = Node("Identifier", (prop_tok.start, prop_tok.end), name=str(prop_tok.value))
                span = (expr.span[0], prop_tok.end) if expr.span else None
                expr = Node("MemberExpression", span, object=expr, property=prop, computed=False)
            elif tok.is_punct("["):
                self.advance()
                prop = self.parse_expression()
                end = self.expect_punct("]").end
                span = (expr.span[0], end) if expr.span else None
                expr = Node("MemberExpression", span, object=expr, property=prop, computed=True)
            elif tok.is_punct("(") and allow_call:
                args, end = self._arguments()
                span = (expr.span[0], end) if expr.span else None
                expr = Node("CallExpression", span, callee=expr, arguments=args)
            elif tok.is_punct("`"):
                raise _Unsupported()
            else:
                return expr

    def _arguments(self) -> tuple[list[Node], int]:
        self.expect_punct("(")
        args = []
        while not self.at_punct(")"):
            if self.at_punct("..."):
                raise _Unsupported()
            args.append(self.parse_assignment())
            if not self.at_punct(")"):
                self.expect_punct(",")
        end = self.expect_punct(")").end
        return args, end

    def _primary(self) -> Node:
        tok = self.current
        if tok.type == "num":
            self.advance()
            return Node("Literal", (tok.start, tok.end), value=float(tok.value), raw_kind="number", regex=None)
        if tok.type == "str":
            self.advance()
            return Node("Literal", (tok.start, tok.end), value=tok.value, raw_kind="string", regex=None)
        if tok.type == "regex":
            self.advance()
            pattern, flags = tok.value
            return Node("Literal", (tok.start, tok.end), value=None, raw_kind="regexp", regex=(pattern, flags))
        if tok.type == "keyword":
            if tok.value in ("true", "false"):
                self.advance()
                return Node("Literal", (tok.start, tok.end), value=(tok.value == "true"), raw_kind="boolean", regex=None)
            if tok.value == "null":
                self.advance()
                return Node("Literal", (tok.start, tok.end), value=None, raw_kind="null", regex=None)
            if tok.value == "this":
                self.advance()
                return Node("ThisExpression", (tok.start, tok.end))
            if tok.value == "function":
                return self._function_expression()
            if tok.value == "new":
                return self._new_expression()
            raise ParseError(tok.start, f"unexpected keyword {tok.value!r}")
        if tok.type == "ident":
            if tok.value in UNSUPPORTED_KEYWORDS:
                raise _Unsupported()
            if self.peek().is_punct("=>"):
                raise _Unsupported()
            self.advance()
            return Node("Identifier", (tok.start, tok.end), name=tok.value)
        if tok.is_punct("("):
            if self._looks_like_arrow_params():
                raise _Unsupported()
            self.advance()
            expr = self.parse_expression()
            self.expect_punct(")")
            return expr
        if tok.is_punct("["):
            return self._array_expression()
        if tok.is_punct("{"):
            return self._object_expression()
        if tok.is_punct("`"):
            raise _Unsupported()
        raise ParseError(tok.start, f"unexpected token {tok.value!r}")

    def _looks_like_arrow_params(self) -> bool:
        depth = 0
        i = self.index
        while i < len(self.tokens):
            tok = self.tokens[i]
            if tok.is_punct("("):
                depth += 1
            elif tok.is_punct(")"):
                depth -= 1
                if depth == 0:
                    nxt = self.tokens[i + 1] if i + 1 < len(self.tokens) else None
                    return nxt is not None and nxt.is_punct("=>")
            elif tok.type == "eof":
                return False
            i += 1
        return False

    def _function_expression(self) -> Node:
        kw = self.advance()
        ident = None
        if self.current.type == "ident":
            name_tok = self.advance()
            ident = Node("Identifier", (name_tok.start, name_tok.end), name=name_tok.value)
        params = self._param_list()
        body = self._block_statement()
        return Node("FunctionExpression", (kw.start, _end(body, kw)),
                    id=ident, params=params, body=body)

    def _new_expression(self) -> Node:
        kw = self.advance()
        callee = self._call_member(self._primary(), allow_call=False)
        args: list[Node] = []
        end = callee.span[1] if callee.span else kw.end
        if self.at_punct("("):
            args, end = self._arguments()
        node = Node("NewExpression", (kw.start, end), callee=callee, arguments=args)
        return self._call_member(node)

    def _array_expression(self) -> Node:
        start = self.expect_punct("[").start
        elements: list[Optional[Node]] = []
        while not self.at_punct("]"):
            if self.at_punct(","):
                self.advance()
                elements.append(None)
                continue
            if self.at_punct("..."):
                raise _Unsupported()
            elements.append(self.parse_assignment())
            if not self.at_punct("]"):
                self.expect_punct(",")
        end = self.expect_punct("]").end
        return Node("ArrayExpression", (start, end), elements=elements)

    def _object_expression(self) -> Node:
        start = self.expect_punct("{").start
        properties = []
        while not self.at_punct("}"):
            tok = self.current
            computed = False
            if tok.type in ("ident", "keyword"):
                self.advance()
                key = Node("Identifier", (tok.start, tok.end), name=str(tok.value))
            elif tok.type == "str":
                self.advance()
                key = Node("Literal", (tok.start, tok.end), value=tok.value, raw_kind="string", regex=None)
            elif tok.type == "num":
                self.advance()
                key = Node("Literal", (tok.start, tok.end), value=float(tok.value), raw_kind="number", regex=None)
            elif tok.is_punct("["):
                self.advance()
                key = self.parse_assignment()
                self.expect_punct("]")
                computed = True
            else:
                raise ParseError(tok.start, "expected property key")
            if self.at_punct("(") or (key.type == "Identifier" and key.name in ("get", "set") and not self.at_punct(":")):
                raise _Unsupported()  # method shorthand / accessors
            if not self.at_punct(":"):
                raise _Unsupported()  # shorthand property
            self.advance()
            value = self.parse_assignment()
            span = (tok.start, value.span[1]) if value.span else (tok.start, tok.end)
            properties.append(Node("Property", span, key=key, value=value, computed=computed))
            if not self.at_punct("}"):
                self.expect_punct(",")
        end = self.expect_punct("}").end
        return Node("ObjectExpression", (start, end), properties=properties)


def _end(node: Optional[Node], fallback: Token) -> int:
    if node is not None and node.span is not None:
        return node.span[1]
    return fallback.end


def parse(source: str, mode: str = "tolerant") -> tuple[Node, list[Diagnostic]]:
    """Parse source text; tolerant mode always returns a Program."""
    try:
        parser = Parser(source, mode)
        program = parser.parse_program()
        return program, parser.diagnostics
    except ParseError:
        if mode == "strict":
            raise
        # Lexer-level failure path; should not happen, but stay total.
        program = Node("Program", (0, len(source)), body=[
            Node("RecoveredStatement", (0, len(source)), raw=source)
        ])
        return program, [Diagnostic(0, "unparseable input")]
