"""Recursive-descent parser for the REModel subset.

Only Service, Actor and Contract blocks are read. Anything else at top level
(UseCaseModel, Interaction, EntityModel, ...) is skipped with its span kept in
``ModelAst.ignored``. Expressions that fall outside the grammar become
``Opaque`` nodes plus a warning, so one odd conjunct does not sink a file.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from .ast import (
    ActorDecl, Binary, Call, CollectionCall, ContractAst, Definition, Diagnostic,
    EnumLiteral, Expr, If, Iterator, Let, LetBinding, Literal, ModelAst, Name, Opaque,
    OperationSig, Param, Property, Self, ServiceDecl, Span, TempProperty, TypeRef, Unary,
)
from .lexer import LexError, Token, tokenize

SECTION_KEYWORDS = ("definition", "precondition", "postcondition")
# blocks whose contents never hold declarations we read
_OPAQUE_BLOCKS = ("Interaction", "EntityModel", "DomainModel")
_KEYWORDS = {"and", "or", "xor", "implies", "not", "if", "then", "else", "endif",
             "let", "in", "true", "false", "null", "self"}


class ModelSyntaxError(Exception):
    """Raised when a model cannot be parsed; carries every error found."""

    def __init__(self, diagnostics: List[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class _ExprError(Exception):
    pass


class _Parser:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source
        self.tokens = tokenize(text, source)
        self.i = 0
        self.errors: List[Diagnostic] = []
        self.warnings: List[Diagnostic] = []
        self.ignored: List[Span] = []
        self.services: List[ServiceDecl] = []
        self.actors: List[ActorDecl] = []
        self.contracts: List[ContractAst] = []

    # ------------------------------------------------------------------ tokens

    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def at_op(self, *values: str) -> bool:
        return self.peek().is_op(*values)

    def at_id(self, *values: str) -> bool:
        return self.peek().is_id(*values)

    def accept_op(self, value: str) -> bool:
        if self.at_op(value):
            self.next()
            return True
        return False

    def error(self, message: str, tok: Optional[Token] = None) -> None:
        tok = tok or self.peek()
        self.errors.append(Diagnostic("error", message, tok.span, self.source))

    def warn(self, message: str, tok: Optional[Token] = None) -> None:
        tok = tok or self.peek()
        self.warnings.append(Diagnostic("warning", message, tok.span, self.source))

    @staticmethod
    def describe(tok: Token) -> str:
        return "end of file" if tok.kind == "EOF" else repr(tok.value)

    def expect_op(self, value: str) -> Token:
        tok = self.peek()
        if not tok.is_op(value):
            raise _ExprError(f"expected {value!r}, found {self.describe(tok)}")
        return self.next()

    def expect_id(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.kind != "ID":
            raise _ExprError(f"expected {what}, found {self.describe(tok)}")
        return self.next()

    def at_section(self) -> bool:
        return self.at_id(*SECTION_KEYWORDS) and self.peek(1).is_op(":")

    # ---------------------------------------------------------------- skipping

    def skip_block(self) -> Optional[Token]:
        """Skip a balanced ``{ ... }``; the cursor is on the ``{``.

        Returns the closing token, or None (after reporting) if it never closes.
        """
        open_tok = self.next()
        depth = 1
        while True:
            tok = self.next()
            if tok.kind == "EOF":
                self.error(f"unclosed '{{' opened at {open_tok.line}:{open_tok.col}", open_tok)
                return None
            if tok.is_op("{"):
                depth += 1
            elif tok.is_op("}"):
                depth -= 1
                if depth == 0:
                    return tok

    def skip_annotation(self) -> Optional[str]:
        """Skip ``@Name( ... )`` and return the first string inside, if any."""
        self.next()
        if not self.at_op("("):
            return None
        open_tok = self.next()
        depth, text = 1, None
        while depth:
            tok = self.next()
            if tok.kind == "EOF":
                self.error(f"unclosed '(' opened at {open_tok.line}:{open_tok.col}", open_tok)
                return text
            if tok.is_op("("):
                depth += 1
            elif tok.is_op(")"):
                depth -= 1
            elif tok.kind == "STRING" and text is None:
                text = _unquote(tok.value)
        return text

    # --------------------------------------------------------------- top level

    def parse_items(self, closing: bool) -> None:
        """Parse declarations until EOF, or until a ``}`` when ``closing``."""
        header: Optional[Token] = None  # first token of an unrecognised block header
        while True:
            tok = self.peek()
            if tok.kind == "EOF":
                return
            if tok.kind == "ID" and not tok.is_id("Service", "Actor", "Contract") \
                    and tok.value not in _OPAQUE_BLOCKS:
                header = header or tok
                self.next()
                continue
            start, header = header or tok, None
            if tok.is_op("}"):
                if closing:
                    return
                self.error("unmatched '}'", tok)
                self.next()
            elif tok.is_id("Service") and self.peek(1).kind == "ID":
                self.parse_service()
            elif tok.is_id("Actor") and self.peek(1).kind == "ID":
                self.parse_actor()
            elif tok.is_id("Contract"):
                self.parse_contract()
            elif tok.kind == "ANNOT":
                self.skip_annotation()
            elif tok.is_op("{"):
                self.skip_unknown(start, recurse=True)
            elif tok.kind == "ID" and tok.value in _OPAQUE_BLOCKS:
                self.next()
                while not self.at_op("{", "}") and self.peek().kind != "EOF":
                    self.next()
                if self.at_op("{"):
                    self.skip_unknown(tok, recurse=False)
            else:
                self.next()

    def skip_unknown(self, start: Token, recurse: bool) -> None:
        if recurse:
            open_tok = self.next()
            self.parse_items(closing=True)
            if self.peek().kind == "EOF":
                self.error(f"unclosed '{{' opened at {open_tok.line}:{open_tok.col}", open_tok)
                return
            end = self.next()
        else:
            end = self.skip_block()
            if end is None:
                return
        self.ignored.append(Span(start.line, start.col, end.line, end.col))

    def open_brace(self, what: str) -> bool:
        if self.at_op("{"):
            self.next()
            return True
        self.error(f"expected '{{' to open {what}, found {self.describe(self.peek())}")
        return False

    def close_brace(self, open_tok: Token) -> None:
        if self.at_op("}"):
            self.next()
        else:
            self.error(f"unclosed '{{' opened at {open_tok.line}:{open_tok.col}", open_tok)

    # ----------------------------------------------------------------- service

    def parse_service(self) -> None:
        start = self.next()
        name = self.next().value
        open_tok = self.peek()
        if not self.open_brace(f"service {name}"):
            return
        section = None
        operations: List[OperationSig] = []
        props: List[TempProperty] = []
        seen = set()
        while not self.at_op("}") and self.peek().kind != "EOF":
            tok = self.peek()
            if tok.is_op("[") and self.peek(1).kind == "ID" and self.peek(2).is_op("]"):
                section = self.peek(1).value
                self.i += 3
            elif section == "Operation" and tok.kind == "ID" and self.peek(1).is_op("("):
                operations.append(self.parse_operation_sig())
            elif section == "TempProperty" and tok.kind == "ID" and self.peek(1).is_op(":"):
                self.next()
                self.next()
                try:
                    type_ = self.parse_type()
                except _ExprError as exc:
                    self.error(str(exc))
                    self.next()
                    continue
                if tok.value in seen:
                    self.error(f"duplicate property {tok.value!r} in service {name}", tok)
                seen.add(tok.value)
                props.append(TempProperty(tok.value, type_, tok.span))
            elif tok.is_op("{"):
                self.skip_block()
            elif tok.kind == "ANNOT":
                self.skip_annotation()
            else:
                self.next()
        self.close_brace(open_tok)
        self.services.append(ServiceDecl(name, tuple(operations), tuple(props), start.span))

    def parse_operation_sig(self) -> OperationSig:
        name = self.next().value
        self.next()
        params = []
        while not self.at_op(")") and self.peek().kind != "EOF" and not self.at_op("}"):
            tok = self.next()
            if tok.kind == "ID":
                params.append(tok.value)
        self.accept_op(")")
        return OperationSig(name, tuple(params))

    # ------------------------------------------------------------------- actor

    def parse_actor(self) -> None:
        start = self.next()
        name = self.next().value
        parent = None
        if self.at_id("extends"):
            self.next()
            if self.peek().kind != "ID":
                self.error(f"expected a parent actor after 'extends', found {self.describe(self.peek())}")
            else:
                parent = self.next().value
        open_tok = self.peek()
        if not self.open_brace(f"actor {name}"):
            return
        use_cases: List[str] = []
        description = None
        while not self.at_op("}") and self.peek().kind != "EOF":
            tok = self.peek()
            if tok.kind == "ANNOT":
                text = self.skip_annotation()
                if tok.value == "@Description" and description is None:
                    description = text
            elif tok.kind == "ID":
                use_cases.append(self.next().value)
            elif tok.is_op("{"):
                self.skip_block()
            else:
                self.next()
        self.close_brace(open_tok)
        self.actors.append(ActorDecl(name, parent, tuple(use_cases), description, start.span))

    # ---------------------------------------------------------------- contract

    def parse_contract(self) -> None:
        start = self.next()
        try:
            service = self.expect_id("service name").value
            self.expect_op("::")
            operation = self.expect_id("operation name").value
            self.expect_op("(")
            params = []
            if not self.at_op(")"):
                params.append(self.parse_param())
                while self.accept_op(","):
                    params.append(self.parse_param())
            self.expect_op(")")
            return_type = None
            if self.accept_op(":"):
                return_type = self.parse_type()
            open_tok = self.expect_op("{")
        except _ExprError as exc:
            self.error(f"malformed contract header: {exc}")
            # resynchronise on the body so later contracts still parse
            while not self.at_op("{") and not self.at_id("Contract") and self.peek().kind != "EOF":
                self.next()
            if self.at_op("{"):
                self.skip_block()
            return

        definitions: List[Definition] = []
        pre = post = None
        while self.at_section():
            keyword = self.next()
            self.next()
            if keyword.value == "definition":
                definitions.extend(self.parse_definitions())
            elif keyword.value == "precondition":
                if pre is not None:
                    self.error("duplicate precondition section", keyword)
                pre = self.parse_section_expr()
            else:
                if post is not None:
                    self.error("duplicate postcondition section", keyword)
                post = self.parse_section_expr()
        if not self.at_op("}"):
            if self.peek().kind == "EOF":
                self.error(f"unclosed '{{' opened at {open_tok.line}:{open_tok.col}", open_tok)
                return
            self.error(f"unexpected {self.describe(self.peek())} in contract {service}::{operation}")
            depth = 0
            while self.peek().kind != "EOF" and not (depth == 0 and self.at_op("}")):
                depth += self.at_op("{") - self.at_op("}")
                self.next()
            if self.peek().kind == "EOF":
                self.error(f"unclosed '{{' opened at {open_tok.line}:{open_tok.col}", open_tok)
                return
            self.next()
        else:
            self.next()
        self.contracts.append(ContractAst(service, operation, tuple(params), return_type,
                                          tuple(definitions), pre, post, start.span))

    def parse_param(self) -> Param:
        name = self.expect_id("parameter name").value
        type_ = None
        if self.accept_op(":"):
            type_ = self.parse_type()
        return Param(name, type_)

    def parse_definitions(self) -> List[Definition]:
        out = []
        while self.at_id() and not self.at_section() and self.peek(1).is_op(":"):
            tok = self.next()
            self.next()
            start = self.i
            try:
                type_ = self.parse_type()
                self.expect_op("=")
            except _ExprError as exc:
                self.error(f"malformed definition {tok.value!r}: {exc}", tok)
                self.i = start
                self.sync_expr()
                continue
            out.append(Definition(tok.value, type_, self.parse_guarded(), tok.span))
            self.accept_op(",")
        return out

    def parse_section_expr(self) -> Optional[Expr]:
        if self.at_op("}") or self.at_section():
            return None
        return self.parse_guarded()

    def parse_guarded(self) -> Expr:
        """Parse one expression, falling back to an opaque node on failure."""
        start = self.i
        try:
            expr = self.expression()
            if not self.at_expr_end():
                raise _ExprError(f"unexpected {self.describe(self.peek())}")
            return expr
        except _ExprError as exc:
            bad = self.peek()
            self.i = start
            first = self.peek()
            self.sync_expr()
            last = self.tokens[self.i - 1] if self.i > start else first
            text = self.text[first.offset:last.end]
            self.warn(f"could not parse expression ({exc}); kept as opaque text", bad)
            return Opaque(text, first.span)

    def at_expr_end(self) -> bool:
        return (self.at_section() or self.at_op("}", ",") or self.peek().kind == "EOF")

    def sync_expr(self) -> None:
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind == "EOF":
                return
            if depth == 0 and (self.at_section() or tok.is_op("}")):
                return
            if tok.is_op("(", "{", "["):
                depth += 1
            elif tok.is_op(")", "}", "]"):
                depth -= 1
            self.next()

    # ------------------------------------------------------------------- types

    def parse_type(self) -> TypeRef:
        name_tok = self.expect_id("type name")
        name = name_tok.value
        if self.at_op("(") and self.peek(1).kind == "ID":
            self.next()
            element = self.parse_type()
            self.expect_op(")")
            return TypeRef(name, element=element)
        # enum values must sit on the same line, otherwise '[' opens a section
        if self.at_op("[") and self.peek().line == name_tok.line:
            bracket = self.next()
            values = []
            while True:
                if self.peek().kind != "ID":
                    raise _ExprError(f"bad enum syntax at {bracket.line}:{bracket.col}: "
                                     f"expected a value, found {self.describe(self.peek())}")
                values.append(self.next().value)
                if self.at_op("]"):
                    break
                if not self.at_op("|", ","):
                    raise _ExprError(f"bad enum syntax at {bracket.line}:{bracket.col}: "
                                     f"expected ']', found {self.describe(self.peek())}")
                self.next()
            self.next()
            return TypeRef(name, enum_values=tuple(values))
        return TypeRef(name)

    # ------------------------------------------------------------- expressions

    def expression(self) -> Expr:
        if self.at_id("let"):
            return self.let_expr()
        return self.implies()

    def let_expr(self) -> Expr:
        start = self.next()
        bindings = [self.let_binding()]
        while self.accept_op(","):
            bindings.append(self.let_binding())
        if not self.at_id("in"):
            raise _ExprError(f"expected 'in', found {self.describe(self.peek())}")
        self.next()
        return Let(tuple(bindings), self.expression(), start.span)

    def let_binding(self) -> LetBinding:
        name = self.expect_id("variable name").value
        type_ = None
        init = None
        if self.accept_op(":"):
            type_ = self.parse_type()
        if self.accept_op("="):
            init = self.expression()
        return LetBinding(name, type_, init)

    def _binary(self, ops, operand) -> Expr:
        left = operand()
        while self.at_id(*ops) or self.at_op(*ops):
            tok = self.next()
            if tok.value == "and" and self.dangling():
                self.warn("dangling 'and' ignored", tok)
                break
            left = Binary(tok.value, left, operand(), tok.span)
        return left

    def dangling(self) -> bool:
        tok = self.peek()
        return (tok.kind == "EOF" or tok.is_op("}", ")", ",")
                or tok.is_id("else", "endif", "then", "in") or self.at_section())

    def implies(self) -> Expr:
        return self._binary(("implies",), self.xor)

    def xor(self) -> Expr:
        return self._binary(("xor",), self.or_)

    def or_(self) -> Expr:
        return self._binary(("or",), self.and_)

    def and_(self) -> Expr:
        return self._binary(("and",), self.equality)

    def equality(self) -> Expr:
        return self._binary(("=", "<>"), self.relational)

    def relational(self) -> Expr:
        return self._binary(("<", ">", "<=", ">="), self.additive)

    def additive(self) -> Expr:
        return self._binary(("+", "-"), self.multiplicative)

    def multiplicative(self) -> Expr:
        return self._binary(("*", "/", "div", "mod"), self.unary)

    def unary(self) -> Expr:
        if self.at_id("not") or self.at_op("-"):
            tok = self.next()
            return Unary(tok.value, self.unary(), tok.span)
        return self.postfix()

    def postfix(self) -> Expr:
        expr = self.primary()
        while True:
            if self.at_op("."):
                self.next()
                name = self.expect_id("property name")
                if self.at_op("("):
                    args = self.arguments()
                    expr = Call(expr, name.value, args, self.accept_at_pre(), name.span)
                else:
                    expr = Property(expr, name.value, self.accept_at_pre(), name.span)
            elif self.at_op("->"):
                self.next()
                expr = self.collection_call(expr)
            elif self.peek().kind == "ATPRE":
                raise _ExprError("'@pre' must follow a dotted expression")
            else:
                return expr

    def accept_at_pre(self) -> bool:
        if self.peek().kind == "ATPRE":
            self.next()
            return True
        return False

    def arguments(self) -> Tuple[Expr, ...]:
        self.expect_op("(")
        args = []
        if not self.at_op(")"):
            args.append(self.expression())
            while self.accept_op(","):
                args.append(self.expression())
        self.expect_op(")")
        return tuple(args)

    def collection_call(self, target: Expr) -> Expr:
        op = self.expect_id("collection operation")
        self.expect_op("(")
        # iterator form: v | body   or   v : T | body
        if self.peek().kind == "ID" and (
            self.peek(1).is_op("|")
            or (self.peek(1).is_op(":") and self.peek(2).kind == "ID" and self._bar_after_type(2))
        ):
            var = self.next().value
            type_ = None
            if self.accept_op(":"):
                type_ = self.parse_type()
            self.expect_op("|")
            body = self.expression()
            self.expect_op(")")
            return CollectionCall(target, op.value, (), Iterator(var, type_), body, op.span)
        args = []
        if not self.at_op(")"):
            args.append(self.expression())
            while self.accept_op(","):
                args.append(self.expression())
        self.expect_op(")")
        return CollectionCall(target, op.value, tuple(args), None, None, op.span)

    def _bar_after_type(self, k: int) -> bool:
        # peek past `T`, `T(T)` to see whether a '|' follows
        k += 1
        if self.peek(k).is_op("(") and self.peek(k + 1).kind == "ID" and self.peek(k + 2).is_op(")"):
            k += 3
        return self.peek(k).is_op("|")

    def primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "INT":
            self.next()
            return Literal(int(tok.value), "int", tok.span)
        if tok.kind == "REAL":
            self.next()
            return Literal(float(tok.value), "real", tok.span)
        if tok.kind == "STRING":
            self.next()
            return Literal(_unquote(tok.value), "string", tok.span)
        if tok.is_op("("):
            self.next()
            expr = self.expression()
            self.expect_op(")")
            return expr
        if tok.kind != "ID":
            raise _ExprError(f"unexpected {self.describe(tok)}")
        if tok.value in ("true", "false"):
            self.next()
            return Literal(tok.value == "true", "bool", tok.span)
        if tok.value == "null":
            self.next()
            return Literal(None, "null", tok.span)
        if tok.value == "self":
            self.next()
            return Self(tok.span)
        if tok.value == "if":
            return self.if_expr()
        if tok.value == "let":
            return self.let_expr()
        if tok.value in _KEYWORDS:
            raise _ExprError(f"unexpected keyword {tok.value!r}")
        self.next()
        if self.at_op("::") and self.peek(1).kind == "ID":
            self.next()
            return EnumLiteral(tok.value, self.next().value, tok.span)
        if self.at_op("("):
            return Call(None, tok.value, self.arguments(), False, tok.span)
        return Name(tok.value, tok.span)

    def if_expr(self) -> Expr:
        start = self.next()
        cond = self.expression()
        if not self.at_id("then"):
            raise _ExprError(f"expected 'then', found {self.describe(self.peek())}")
        self.next()
        then = self.expression()
        else_ = None
        if self.at_id("else"):
            self.next()
            else_ = self.expression() if not self.at_id("endif") else Literal(True, "bool")
        if not self.at_id("endif"):
            raise _ExprError(f"expected 'endif', found {self.describe(self.peek())}")
        self.next()
        return If(cond, then, else_, start.span)

    # ------------------------------------------------------------------ result

    def run(self) -> ModelAst:
        self.parse_items(closing=False)
        if self.errors:
            raise ModelSyntaxError(self.errors)
        return ModelAst(tuple(self.services), tuple(self.actors), tuple(self.contracts),
                        tuple(self.ignored), tuple(self.warnings))


def _unquote(text: str) -> str:
    body = text[1:-1]
    return body.encode("utf-8").decode("unicode_escape") if "\\" in body else body


def parse_model(text: str, source: str = "<input>") -> ModelAst:
    """Parse REModel text; raises ModelSyntaxError with line/col diagnostics."""
    try:
        parser = _Parser(text, source)
    except LexError as exc:
        raise ModelSyntaxError([exc.diagnostic]) from None
    return parser.run()
