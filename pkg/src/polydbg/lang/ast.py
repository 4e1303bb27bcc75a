"""AST for the .pd language, plus the tagged-location table built at parse.

Tags are opaque strings to every consumer except the runtime; the set below
is the full vocabulary the shipped catalog refers to.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from polydbg.location import SourceLocation

# Concurrency tags (drive breakpoint/stepping applicability).
TAG_ACTIVITY_CREATION = "ActivityCreation"
TAG_ACTIVITY_JOIN = "ActivityJoin"
TAG_EVENTUAL_MESSAGE_SEND = "EventualMessageSend"
TAG_PROMISE_CREATION = "PromiseCreation"
TAG_CHANNEL_WRITE = "ChannelWrite"
TAG_CHANNEL_READ = "ChannelRead"
TAG_ATOMIC = "Atomic"
TAG_ACQUIRE_LOCK = "AcquireLock"
TAG_RELEASE_LOCK = "ReleaseLock"

# Syntax tags (drive highlighting and sequential stepping).
TAG_KEYWORD = "Keyword"
TAG_LITERAL = "Literal"
TAG_COMMENT = "Comment"
TAG_STATEMENT = "Statement"
TAG_METHOD_CALL = "MethodCall"

CONCURRENCY_TAGS = frozenset({
    TAG_ACTIVITY_CREATION, TAG_ACTIVITY_JOIN, TAG_EVENTUAL_MESSAGE_SEND,
    TAG_PROMISE_CREATION, TAG_CHANNEL_WRITE, TAG_CHANNEL_READ,
    TAG_ATOMIC, TAG_ACQUIRE_LOCK, TAG_RELEASE_LOCK,
})

ALL_TAGS = CONCURRENCY_TAGS | {
    TAG_KEYWORD, TAG_LITERAL, TAG_COMMENT, TAG_STATEMENT, TAG_METHOD_CALL,
}


@dataclass(frozen=True)
class SourceUnit:
    uri: str
    text: str

    def __post_init__(self):
        if not self.uri:
            raise ValueError("source unit needs a non-empty uri")


@dataclass(frozen=True)
class TaggedLocation:
    location: SourceLocation
    tags: frozenset[str]


# --- Expressions ---------------------------------------------------------


@dataclass
class Expr:
    loc: SourceLocation


@dataclass
class IntLit(Expr):
    value: int


@dataclass
class StrLit(Expr):
    value: str


@dataclass
class BoolLit(Expr):
    value: bool


@dataclass
class Name(Expr):
    ident: str


@dataclass
class ArrayLit(Expr):
    items: list[Expr]


@dataclass
class Unary(Expr):
    op: str
    operand: Expr


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class Index(Expr):
    obj: Expr
    index: Expr


@dataclass
class Call(Expr):
    callee: Expr
    args: list[Expr]


@dataclass
class MethodCall(Expr):
    obj: Expr
    method: str
    method_loc: SourceLocation
    args: list[Expr]


@dataclass
class Send(Expr):
    """`target <- method(args)`: async message send creating a promise."""

    target: Expr
    method: str
    args: list[Expr]
    arrow_loc: SourceLocation = None  # type: ignore[assignment]


@dataclass
class SpawnExpr(Expr):
    kind: str  # "Thread" | "Task" | "Process"
    fn: Expr
    args: list[Expr]
    kw_loc: SourceLocation = None  # type: ignore[assignment]


@dataclass
class ActorExpr(Expr):
    fn: Expr
    kw_loc: SourceLocation = None  # type: ignore[assignment]


@dataclass
class JoinExpr(Expr):
    handle: Expr
    kw_loc: SourceLocation = None  # type: ignore[assignment]


@dataclass
class ChannelExpr(Expr):
    pass


@dataclass
class LockExpr(Expr):
    pass


@dataclass
class CondExpr(Expr):
    pass


@dataclass
class CellExpr(Expr):
    init: Expr = None  # type: ignore[assignment]


@dataclass
class AcquireExpr(Expr):
    lock: Expr
    kw_loc: SourceLocation = None  # type: ignore[assignment]


@dataclass
class ReleaseExpr(Expr):
    lock: Expr
    kw_loc: SourceLocation = None  # type: ignore[assignment]


@dataclass
class WaitExpr(Expr):
    cond: Expr = None  # type: ignore[assignment]
    lock: Expr = None  # type: ignore[assignment]


@dataclass
class SignalExpr(Expr):
    cond: Expr = None  # type: ignore[assignment]
    lock: Expr = None  # type: ignore[assignment]


@dataclass
class WhenResolvedExpr(Expr):
    promise: Expr = None  # type: ignore[assignment]
    callback: Expr = None  # type: ignore[assignment]


@dataclass
class ResolveExpr(Expr):
    promise: Expr = None  # type: ignore[assignment]
    value: Expr = None  # type: ignore[assignment]
    kw_loc: SourceLocation = None  # type: ignore[assignment]


# --- Statements ----------------------------------------------------------


@dataclass
class Stmt:
    loc: SourceLocation  # span of the whole statement (its Statement tag)


@dataclass
class Let(Stmt):
    name: str
    expr: Expr


@dataclass
class Assign(Stmt):
    target: Expr  # Name or Index
    expr: Expr


@dataclass
class ExprStmt(Stmt):
    expr: Expr


@dataclass
class Return(Stmt):
    expr: Expr | None


@dataclass
class Block:
    statements: list[Stmt]
    start_loc: SourceLocation
    end_loc: SourceLocation  # the closing brace


@dataclass
class If(Stmt):
    cond: Expr
    then: Block
    orelse: Block | None


@dataclass
class While(Stmt):
    cond: Expr
    body: Block


@dataclass
class AtomicBlock(Stmt):
    body: Block
    kw_loc: SourceLocation = None  # type: ignore[assignment]
    end_loc: SourceLocation = None  # type: ignore[assignment]


@dataclass
class MonitorBlock(Stmt):
    lock: Expr
    body: Block
    kw_loc: SourceLocation = None  # type: ignore[assignment]
    end_loc: SourceLocation = None  # type: ignore[assignment]


@dataclass
class FnDef:
    name: str
    params: list[str]
    body: Block
    loc: SourceLocation  # the `fn` keyword
    name_loc: SourceLocation


@dataclass
class Program:
    unit: SourceUnit
    file_symbol: int
    functions: dict[str, FnDef]
    tag_table: dict[SourceLocation, frozenset[str]] = field(default_factory=dict)

    def tags_at(self, loc: SourceLocation) -> frozenset[str]:
        return self.tag_table.get(loc, frozenset())


def collect_tagged_locations(program: Program) -> list[TaggedLocation]:
    """Every tagged location, sorted by (line, column).

    This list is the Source message payload, verbatim.
    """
    items = [TaggedLocation(loc, tags) for loc, tags in program.tag_table.items()]
    items.sort(key=lambda t: (t.location.line, t.location.column, t.location.length))
    return items
