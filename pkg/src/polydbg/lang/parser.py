"""Recursive-descent parser producing a tag-annotated AST.

Parsing is a pure function of the source text: identical input yields an
identical AST and identical tagged locations.
"""

from __future__ import annotations

from polydbg.lang import ast
from polydbg.lang.lexer import LexError, Token, tokenize
from polydbg.location import SourceLocation, line_offsets
from polydbg.protocol.symbols import SymbolTable

SPAWN_KINDS = {"spawn": "Thread", "task": "Task", "process": "Process"}

_KEYWORD_TAGS = {
    "spawn": ast.TAG_ACTIVITY_CREATION,
    "task": ast.TAG_ACTIVITY_CREATION,
    "process": ast.TAG_ACTIVITY_CREATION,
    "actor": ast.TAG_ACTIVITY_CREATION,
    "join": ast.TAG_ACTIVITY_JOIN,
    "atomic": ast.TAG_ATOMIC,
    "acquire": ast.TAG_ACQUIRE_LOCK,
    "release": ast.TAG_RELEASE_LOCK,
    "monitor": ast.TAG_ACQUIRE_LOCK,
}


class ParseError(Exception):
    def __init__(self, message: str, location: SourceLocation):
        super().__init__(f"{location.line}:{location.column}: {message}")
        self.message = message
        self.location = location


class _Parser:
    def __init__(self, unit: ast.SourceUnit, file_symbol: int):
        self.unit = unit
        self.file_symbol = file_symbol
        try:
            self.tokens, self.trivia = tokenize(unit.text)
        except LexError as e:
            raise ParseError(e.message, SourceLocation(file_symbol, e.line, e.column, 1)) from None
        self.pos = 0
        self.offsets = line_offsets(unit.text)
        self.tags: dict[SourceLocation, set[str]] = {}

    # --- token plumbing --------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def prev(self) -> Token:
        return self.tokens[self.pos - 1]

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            self.pos += 1
            return self.prev()
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.accept(kind, text)
        if tok is None:
            want = text or kind
            got = self.peek().text or "end of file"
            raise ParseError(f"expected {want!r}, got {got!r}", self.loc_of(self.peek()))
        return tok

    # --- locations and tags ----------------------------------------------

    def loc_of(self, tok: Token) -> SourceLocation:
        return SourceLocation(self.file_symbol, tok.line, tok.column, max(tok.length, 1))

    def abs_of(self, tok: Token) -> int:
        return self.offsets[tok.line] + tok.column - 1

    def span(self, first: Token, last: Token) -> SourceLocation:
        length = self.abs_of(last) + last.length - self.abs_of(first)
        return SourceLocation(self.file_symbol, first.line, first.column, max(length, 1))

    def tag(self, loc: SourceLocation, *names: str):
        self.tags.setdefault(loc, set()).update(names)

    def tag_token(self, tok: Token, *names: str) -> SourceLocation:
        loc = self.loc_of(tok)
        self.tag(loc, *names)
        return loc

    # --- grammar ----------------------------------------------------------

    def parse_program(self) -> ast.Program:
        functions: dict[str, ast.FnDef] = {}
        while not self.at("eof"):
            fn = self.parse_fndef()
            if fn.name in functions:
                raise ParseError(f"duplicate function {fn.name!r}", fn.name_loc)
            functions[fn.name] = fn
        if "main" not in functions:
            raise ParseError("expected fn main", self.loc_of(self.peek()))
        for comment in self.trivia:
            loc = SourceLocation(self.file_symbol, comment.line, comment.column, comment.length)
            self.tag(loc, ast.TAG_COMMENT)
        program = ast.Program(
            unit=self.unit,
            file_symbol=self.file_symbol,
            functions=functions,
            tag_table={loc: frozenset(tags) for loc, tags in self.tags.items()},
        )
        return program

    def parse_fndef(self) -> ast.FnDef:
        kw = self.expect("keyword", "fn")
        self.tag_token(kw, ast.TAG_KEYWORD)
        name_tok = self.expect("ident")
        self.expect("(")
        params: list[str] = []
        if not self.at(")"):
            params.append(self.expect("ident").text)
            while self.accept(","):
                params.append(self.expect("ident").text)
        self.expect(")")
        body = self.parse_block()
        return ast.FnDef(
            name=name_tok.text,
            params=params,
            body=body,
            loc=self.loc_of(kw),
            name_loc=self.loc_of(name_tok),
        )

    def parse_block(self) -> ast.Block:
        open_tok = self.expect("{")
        statements: list[ast.Stmt] = []
        while not self.at("}"):
            if self.at("eof"):
                raise ParseError("unterminated block", self.loc_of(self.peek()))
            statements.append(self.parse_statement())
        close_tok = self.expect("}")
        return ast.Block(statements, self.loc_of(open_tok), self.loc_of(close_tok))

    def parse_statement(self) -> ast.Stmt:
        first = self.peek()

        if self.accept("keyword", "let"):
            self.tag_token(first, ast.TAG_KEYWORD)
            name = self.expect("ident").text
            self.expect("=")
            expr = self.parse_expr()
            self.expect(";")
            stmt: ast.Stmt = ast.Let(self.span(first, self.prev()), name, expr)

        elif self.at("keyword", "if"):
            stmt = self.parse_if()

        elif self.at("keyword", "while"):
            kw = self.expect("keyword", "while")
            self.tag_token(kw, ast.TAG_KEYWORD)
            self.expect("(")
            cond = self.parse_expr()
            close = self.expect(")")
            body = self.parse_block()
            stmt = ast.While(self.span(kw, close), cond, body)

        elif self.accept("keyword", "return"):
            self.tag_token(first, ast.TAG_KEYWORD)
            expr = None if self.at(";") else self.parse_expr()
            self.expect(";")
            stmt = ast.Return(self.span(first, self.prev()), expr)

        elif self.accept("keyword", "atomic"):
            kw_loc = self.tag_token(first, ast.TAG_KEYWORD, ast.TAG_ATOMIC)
            body = self.parse_block()
            stmt = ast.AtomicBlock(self.span(first, self.prev()), body,
                                   kw_loc=kw_loc, end_loc=body.end_loc)

        elif self.accept("keyword", "monitor"):
            kw_loc = self.tag_token(first, ast.TAG_KEYWORD, ast.TAG_ACQUIRE_LOCK)
            self.expect("(")
            lock = self.parse_expr()
            self.expect(")")
            body = self.parse_block()
            self.tag(body.end_loc, ast.TAG_RELEASE_LOCK)
            stmt = ast.MonitorBlock(self.span(first, self.prev()), lock, body,
                                    kw_loc=kw_loc, end_loc=body.end_loc)

        else:
            expr = self.parse_expr()
            if self.accept("="):
                if not isinstance(expr, (ast.Name, ast.Index)):
                    raise ParseError("assignment target must be a variable or index", expr.loc)
                value = self.parse_expr()
                self.expect(";")
                stmt = ast.Assign(self.span(first, self.prev()), expr, value)
            else:
                self.expect(";")
                stmt = ast.ExprStmt(self.span(first, self.prev()), expr)

        self.tag(stmt.loc, ast.TAG_STATEMENT)
        return stmt

    def parse_if(self) -> ast.Stmt:
        kw = self.expect("keyword", "if")
        self.tag_token(kw, ast.TAG_KEYWORD)
        self.expect("(")
        cond = self.parse_expr()
        close = self.expect(")")
        then = self.parse_block()
        orelse = None
        else_tok = self.accept("keyword", "else")
        if else_tok:
            self.tag_token(else_tok, ast.TAG_KEYWORD)
            orelse = self.parse_block()
        return ast.If(self.span(kw, close), cond, then, orelse)

    # --- expressions -------------------------------------------------------

    def parse_expr(self) -> ast.Expr:
        expr = self.parse_or()
        arrow = self.accept("<-")
        if arrow:
            arrow_loc = self.tag_token(arrow, ast.TAG_EVENTUAL_MESSAGE_SEND, ast.TAG_PROMISE_CREATION)
            method = self.expect("ident")
            self.expect("(")
            args = self.parse_args()
            close = self.expect(")")
            return ast.Send(self.span_expr(expr, close), expr, method.text, args, arrow_loc)
        return expr

    def span_expr(self, first_expr: ast.Expr, last: Token) -> SourceLocation:
        start = self.offsets[first_expr.loc.line] + first_expr.loc.column - 1
        length = self.abs_of(last) + last.length - start
        return SourceLocation(self.file_symbol, first_expr.loc.line, first_expr.loc.column, max(length, 1))

    def parse_args(self) -> list[ast.Expr]:
        args: list[ast.Expr] = []
        if not self.at(")") and not self.at("]"):
            args.append(self.parse_expr())
            while self.accept(","):
                args.append(self.parse_expr())
        return args

    def parse_or(self) -> ast.Expr:
        expr = self.parse_and()
        while self.at("||"):
            op = self.expect("||")
            right = self.parse_and()
            expr = ast.Binary(self.loc_of(op), "||", expr, right)
        return expr

    def parse_and(self) -> ast.Expr:
        expr = self.parse_cmp()
        while self.at("&&"):
            op = self.expect("&&")
            right = self.parse_cmp()
            expr = ast.Binary(self.loc_of(op), "&&", expr, right)
        return expr

    def parse_cmp(self) -> ast.Expr:
        expr = self.parse_add()
        for op_text in ("==", "!=", "<=", ">=", "<", ">"):
            if self.at(op_text):
                op = self.expect(op_text)
                right = self.parse_add()
                return ast.Binary(self.loc_of(op), op_text, expr, right)
        return expr

    def parse_add(self) -> ast.Expr:
        expr = self.parse_mul()
        while self.at("+") or self.at("-"):
            op = self.expect(self.peek().kind)
            right = self.parse_mul()
            expr = ast.Binary(self.loc_of(op), op.text, expr, right)
        return expr

    def parse_mul(self) -> ast.Expr:
        expr = self.parse_unary()
        while self.at("*") or self.at("/") or self.at("%"):
            op = self.expect(self.peek().kind)
            right = self.parse_unary()
            expr = ast.Binary(self.loc_of(op), op.text, expr, right)
        return expr

    def parse_unary(self) -> ast.Expr:
        if self.at("-") or self.at("!"):
            op = self.expect(self.peek().kind)
            operand = self.parse_unary()
            return ast.Unary(self.loc_of(op), op.text, operand)
        return self.parse_postfix()

    def parse_postfix(self) -> ast.Expr:
        expr = self.parse_primary()
        while True:
            if self.at("("):
                self.expect("(")
                args = self.parse_args()
                close = self.expect(")")
                if isinstance(expr, ast.Name):
                    self.tag(expr.loc, ast.TAG_METHOD_CALL)
                expr = ast.Call(self.span_expr(expr, close), expr, args)
            elif self.at("."):
                self.expect(".")
                method = self.expect("ident")
                tags = [ast.TAG_METHOD_CALL]
                if method.text == "send":
                    tags.append(ast.TAG_CHANNEL_WRITE)
                elif method.text == "receive":
                    tags.append(ast.TAG_CHANNEL_READ)
                method_loc = self.tag_token(method, *tags)
                self.expect("(")
                args = self.parse_args()
                close = self.expect(")")
                expr = ast.MethodCall(self.span_expr(expr, close), expr, method.text, method_loc, args)
            elif self.at("["):
                self.expect("[")
                index = self.parse_expr()
                close = self.expect("]")
                expr = ast.Index(self.span_expr(expr, close), expr, index)
            else:
                return expr

    def parse_primary(self) -> ast.Expr:
        tok = self.peek()

        if self.accept("int"):
            self.tag_token(tok, ast.TAG_LITERAL)
            return ast.IntLit(self.loc_of(tok), int(tok.text))
        if self.accept("string"):
            self.tag_token(tok, ast.TAG_LITERAL)
            return ast.StrLit(self.loc_of(tok), tok.value)  # type: ignore[attr-defined]
        if self.accept("keyword", "true") or self.accept("keyword", "false"):
            self.tag_token(tok, ast.TAG_LITERAL)
            return ast.BoolLit(self.loc_of(tok), tok.text == "true")
        if self.accept("ident"):
            return ast.Name(self.loc_of(tok), tok.text)
        if self.accept("("):
            expr = self.parse_expr()
            self.expect(")")
            return expr
        if self.accept("["):
            items = self.parse_args()
            close = self.expect("]")
            return ast.ArrayLit(self.span(tok, close), items)

        if tok.kind == "keyword" and (tok.text in SPAWN_KINDS or tok.text in (
                "actor", "join", "channel", "lock", "cond", "cell",
                "acquire", "release", "wait", "signal", "whenResolved", "resolve")):
            return self.parse_builtin_form()

        raise ParseError(f"unexpected token {tok.text or 'end of file'!r}", self.loc_of(tok))

    def parse_builtin_form(self) -> ast.Expr:
        kw = self.expect("keyword")
        word = kw.text
        tags = [ast.TAG_KEYWORD]
        if word in _KEYWORD_TAGS:
            tags.append(_KEYWORD_TAGS[word])
        kw_loc = self.tag_token(kw, *tags)
        self.expect("(")
        args = self.parse_args()
        close = self.expect(")")
        loc = self.span(kw, close)

        def arity(n: int):
            if len(args) != n:
                raise ParseError(f"{word} takes {n} argument(s), got {len(args)}", loc)

        if word in SPAWN_KINDS:
            if not args:
                raise ParseError(f"{word} needs a function reference", loc)
            return ast.SpawnExpr(loc, SPAWN_KINDS[word], args[0], args[1:], kw_loc)
        if word == "actor":
            arity(1)
            return ast.ActorExpr(loc, args[0], kw_loc)
        if word == "join":
            arity(1)
            return ast.JoinExpr(loc, args[0], kw_loc)
        if word == "channel":
            arity(0)
            return ast.ChannelExpr(loc)
        if word == "lock":
            arity(0)
            return ast.LockExpr(loc)
        if word == "cond":
            arity(0)
            return ast.CondExpr(loc)
        if word == "cell":
            arity(1)
            return ast.CellExpr(loc, args[0])
        if word == "acquire":
            arity(1)
            return ast.AcquireExpr(loc, args[0], kw_loc)
        if word == "release":
            arity(1)
            return ast.ReleaseExpr(loc, args[0], kw_loc)
        if word == "wait":
            arity(2)
            return ast.WaitExpr(loc, args[0], args[1])
        if word == "signal":
            arity(2)
            return ast.SignalExpr(loc, args[0], args[1])
        if word == "whenResolved":
            arity(2)
            return ast.WhenResolvedExpr(loc, args[0], args[1])
        if word == "resolve":
            arity(2)
            return ast.ResolveExpr(loc, args[0], args[1], kw_loc)
        raise ParseError(f"unexpected keyword {word!r}", kw_loc)


def parse(unit: ast.SourceUnit, symbols: SymbolTable | None = None) -> ast.Program:
    """Parse a source unit into a tagged program.

    The unit's uri is interned into `symbols` (a fresh table when omitted)
    so every location carries a valid file symbol.
    """
    symbols = symbols or SymbolTable()
    file_symbol = symbols.intern(unit.uri)
    return _Parser(unit, file_symbol).parse_program()
