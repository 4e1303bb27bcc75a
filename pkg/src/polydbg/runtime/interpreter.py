"""Tree-walking evaluator executing each activity on its own host thread.

Debug hooks fire at every tagged point; a hook may block its activity
indefinitely (suspension) while all other activities stay runnable. The
program is finished when every thread/process/task completed and all
actors are idle with empty mailboxes; actors are then shut down.
"""

from __future__ import annotations

import threading
from typing import Any

from polydbg.debugger import phases
from polydbg.debugger.controller import DebugController
from polydbg.lang import ast
from polydbg.location import SourceLocation
from polydbg.runtime.entities import (
    ActivityRecord,
    ActivityTerminated,
    CellEntity,
    ChannelEntity,
    ChannelOffer,
    ChannelTaker,
    ConditionEntity,
    EntityRegistry,
    LockEntity,
    Mailbox,
    Message,
    PdRuntimeError,
    PromiseEntity,
    ScopeInstance,
    StopToken,
    Transaction,
    wait_for,
)

_MAX_CALL_DEPTH = 200
_POLL = 0.05

_JOIN_OPS = {"Thread": "ThreadJoin", "Process": "ProcessJoin", "Task": "TaskJoin"}


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class Frame:
    __slots__ = ("fn", "env", "loc")

    def __init__(self, fn: ast.FnDef, env: dict):
        self.fn = fn
        self.env = env
        self.loc = fn.loc


class RunCoordinator:
    """Counts work that must finish before the program may exit:
    live non-actor activities plus queued or executing turns."""

    def __init__(self):
        self._cond = threading.Condition()
        self._busy = 0

    def inc(self):
        with self._cond:
            self._busy += 1

    def dec(self):
        with self._cond:
            self._busy -= 1
            if self._busy <= 0:
                self._cond.notify_all()

    def wait_quiescent(self, stop: StopToken):
        with self._cond:
            while self._busy > 0 and not stop.is_set():
                self._cond.wait(_POLL)


class Interpreter:
    def __init__(self, program: ast.Program, registry: EntityRegistry,
                 controller: DebugController, stop: StopToken, printer=None):
        self.program = program
        self.registry = registry
        self.dbg = controller
        self.stop = stop
        self.printer = printer or print
        self.commit_latch = threading.Lock()
        self.shutdown = threading.Event()
        self.coordinator = RunCoordinator()
        self.exit_status = 0
        self.errors: list[PdRuntimeError] = []
        self.channel_pairs: list[tuple[int, int, int]] = []  # (channel, sender, receiver)
        self._pairs_lock = threading.Lock()
        self._threads: list[threading.Thread] = []
        self._threads_lock = threading.Lock()
        self._builtins = {"print": self._builtin_print, "len": self._builtin_len,
                          "push": self._builtin_push}

    # --- lifecycle ---------------------------------------------------------

    def start_main(self) -> ActivityRecord:
        main_fn = self.program.functions["main"]
        record = ActivityRecord(self.registry.ids.allocate(), "Thread", "main", main_fn.loc)
        self.registry.add_activity(record)
        self.coordinator.inc()
        self._start_thread(record, lambda: self._activity_main(record, main_fn, [], own_creation=True))
        return record

    def _start_thread(self, record: ActivityRecord, target):
        thread = threading.Thread(target=target, daemon=True, name=f"pd-{record.name}-{record.id}")
        with self._threads_lock:
            self._threads.append(thread)
        thread.start()

    def wait_exit(self, timeout: float | None = None) -> int:
        self.coordinator.wait_quiescent(self.stop)
        self.shutdown.set()
        while True:
            with self._threads_lock:
                threads = list(self._threads)
            for thread in threads:
                thread.join(timeout=2.0)
            if all(not t.is_alive() for t in threads):
                break
            if self.stop.is_set():
                break  # stuck threads are daemons; let the process reap them
            self.stop.set()
            self.dbg.resume_all()
        _ = timeout
        return self.exit_status

    def report_error(self, record: ActivityRecord, error: PdRuntimeError):
        record.error = error
        self.errors.append(error)
        self.exit_status = 1
        where = f" at {error.location}" if error.location else ""
        self.printer(f"runtime error in {record.name}: {error.message}{where}")

    # --- activity bodies -----------------------------------------------------

    def _activity_main(self, record: ActivityRecord, fn: ast.FnDef, args: list,
                       own_creation: bool = False):
        try:
            if own_creation:
                self.dbg.emit_activity_creation(record.id, record)
            record.return_value = self.call_function(record, fn, args)
        except ActivityTerminated:
            pass
        except PdRuntimeError as e:
            self.report_error(record, e)
        finally:
            self._complete(record)
            self.coordinator.dec()

    def _actor_main(self, record: ActivityRecord):
        try:
            while True:
                msg = self._mailbox_get(record)
                if msg is None:
                    break
                try:
                    self._run_turn(record, msg)
                finally:
                    self.coordinator.dec()
        except ActivityTerminated:
            pass
        except PdRuntimeError as e:
            self.report_error(record, e)
        finally:
            self._complete(record)

    def _complete(self, record: ActivityRecord):
        with record.completion:
            record.state = "Completed"
            record.completion.notify_all()
        self.dbg.emit_activity_completion(record)

    def _mailbox_get(self, record: ActivityRecord) -> Message | None:
        box = record.mailbox
        with box._cond:
            record.blocked_on = "mailbox"
            try:
                while True:
                    if box._queue:
                        return box._queue.popleft()
                    if self.shutdown.is_set() or self.stop.is_set():
                        return None
                    box._cond.wait(_POLL)
            finally:
                record.blocked_on = None

    def _run_turn(self, record: ActivityRecord, msg: Message):
        if record.halt_next_turn:
            record.halt_next_turn = False
            msg.halt_first_stmt = True
        if msg.handler_fn is None:
            fn = self.program.functions.get(msg.method)
            if fn is None:
                self._resolve(record, msg.promise, f"unknown method {msg.method}",
                              errored=True, report_loc=msg.send_site)
                return
            entry = (phases.ASYNC_ACTIVATION, msg.send_site)
        else:
            fn = msg.handler_fn
            entry = (phases.PROMISE_HANDLER_START, msg.handler_promise.creation_loc)

        self.dbg.hook(record, phases.TURN_START, msg.send_site, msg.send_site,
                      involved=(msg.id,), forced=msg.halt_turn_start)
        scope = ScopeInstance("Turn", msg.id, fn.loc, record.id, extra=msg)
        record.scopes.append(scope)
        self.dbg.emit_scope_start(record, scope)
        try:
            try:
                ret = self.call_function(record, fn, msg.args, activation=entry,
                                         activation_forced=msg.halt_first_stmt,
                                         turn_msg=msg)
            except PdRuntimeError:
                if msg.promise is not None:
                    self._resolve(record, msg.promise, "turn failed", errored=True,
                                  report_loc=fn.body.end_loc)
                raise
            if msg.promise is not None:
                self._resolve(record, msg.promise, ret, errored=False,
                              report_loc=fn.body.end_loc)
        finally:
            record.scopes.pop()
            self.dbg.emit_scope_end(record, scope)

    # --- calls and statements -------------------------------------------------

    def call_function(self, record: ActivityRecord, fn: ast.FnDef, args: list,
                      call_loc: SourceLocation | None = None, activation=None,
                      activation_forced: bool = False, turn_msg: Message | None = None):
        if len(args) != len(fn.params):
            raise PdRuntimeError(
                f"{fn.name} takes {len(fn.params)} argument(s), got {len(args)}",
                call_loc or fn.loc)
        if len(record.frames) >= _MAX_CALL_DEPTH:
            raise PdRuntimeError("call stack overflow", call_loc or fn.loc)
        frame = Frame(fn, dict(zip(fn.params, args)))
        record.frames.append(frame)
        try:
            if activation is not None:
                entry_phase, match_loc = activation
                first = fn.body.statements[0].loc if fn.body.statements else fn.body.end_loc
                involved = () if turn_msg is None else (turn_msg.id,)
                if turn_msg is not None and turn_msg.handler_promise is not None:
                    involved = involved + (turn_msg.handler_promise.id,)
                self.dbg.hook(record, entry_phase, match_loc, first,
                              involved=involved, forced=activation_forced)
            try:
                self.exec_block(record, fn.body)
                ret: Any = 0
            except _Return as r:
                ret = r.value
            if turn_msg is not None:
                involved = (turn_msg.id,)
                if turn_msg.promise is not None:
                    involved = involved + (turn_msg.promise.id,)
                self.dbg.hook(record, phases.TURN_RETURN, turn_msg.send_site,
                              fn.body.end_loc, involved=involved)
            return ret
        finally:
            record.frames.pop()

    def exec_block(self, record: ActivityRecord, block: ast.Block):
        for stmt in block.statements:
            self.exec_stmt(record, stmt)

    def exec_stmt(self, record: ActivityRecord, stmt: ast.Stmt):
        record.frames[-1].loc = stmt.loc
        self.dbg.hook(record, phases.STATEMENT, stmt.loc)
        # The first-statement phase sits between the statement boundary and
        # its execution, so a pending sequential step is not re-consumed here.
        if record.first_stmt_pending:
            record.first_stmt_pending = False
            forced = record.halt_on_first_stmt
            record.halt_on_first_stmt = False
            self.dbg.hook(record, phases.ACTIVITY_FIRST_STATEMENT,
                          record.creation_loc, stmt.loc,
                          involved=(record.id,), forced=forced)

        if isinstance(stmt, ast.Let):
            record.frames[-1].env[stmt.name] = self.eval(record, stmt.expr)
        elif isinstance(stmt, ast.Assign):
            self._assign(record, stmt.target, self.eval(record, stmt.expr))
        elif isinstance(stmt, ast.ExprStmt):
            self.eval(record, stmt.expr)
        elif isinstance(stmt, ast.Return):
            raise _Return(self.eval(record, stmt.expr) if stmt.expr else 0)
        elif isinstance(stmt, ast.If):
            if self._bool(record, stmt.cond):
                self.exec_block(record, stmt.then)
            elif stmt.orelse is not None:
                self.exec_block(record, stmt.orelse)
        elif isinstance(stmt, ast.While):
            while self._bool(record, stmt.cond):
                self.exec_block(record, stmt.body)
                record.frames[-1].loc = stmt.loc
                self.dbg.hook(record, phases.STATEMENT, stmt.loc)
        elif isinstance(stmt, ast.AtomicBlock):
            self._exec_atomic(record, stmt)
        elif isinstance(stmt, ast.MonitorBlock):
            self._exec_monitor(record, stmt)
        else:
            raise PdRuntimeError(f"cannot execute {type(stmt).__name__}", stmt.loc)

    def _bool(self, record, expr) -> bool:
        value = self.eval(record, expr)
        if not isinstance(value, bool):
            raise PdRuntimeError("condition must be a boolean", expr.loc)
        return value

    def _assign(self, record: ActivityRecord, target: ast.Expr, value):
        if isinstance(target, ast.Name):
            env = record.frames[-1].env
            if target.ident not in env:
                raise PdRuntimeError(f"assignment to undeclared variable {target.ident}",
                                     target.loc)
            env[target.ident] = value
        else:
            assert isinstance(target, ast.Index)
            arr = self.eval(record, target.obj)
            idx = self.eval(record, target.index)
            self._check_index(arr, idx, target.loc)
            arr[idx] = value

    def _check_index(self, arr, idx, loc):
        if not isinstance(arr, list):
            raise PdRuntimeError("indexing a non-array", loc)
        if not isinstance(idx, int) or isinstance(idx, bool) or not 0 <= idx < len(arr):
            raise PdRuntimeError(f"index {idx} out of range", loc)

    # --- transactions and monitors ---------------------------------------------

    def _exec_atomic(self, record: ActivityRecord, stmt: ast.AtomicBlock):
        if record.innermost_scope("Transaction") is not None:
            raise PdRuntimeError("transactions do not nest", stmt.kw_loc)
        while True:
            self.dbg.hook(record, phases.BEFORE_TRANSACTION, stmt.kw_loc)
            txn = Transaction()
            scope = ScopeInstance("Transaction", self.registry.ids.allocate(),
                                  stmt.loc, record.id, extra=txn)
            record.scopes.append(scope)
            self.dbg.emit_scope_start(record, scope)
            pending_return: _Return | None = None
            try:
                try:
                    self.exec_block(record, stmt.body)
                except _Return as r:
                    pending_return = r
                self.dbg.hook(record, phases.BEFORE_COMMIT, stmt.kw_loc, stmt.end_loc)
                committed = txn.commit(self.commit_latch)
            finally:
                record.scopes.pop()
                self.dbg.emit_scope_end(record, scope)
            if committed:
                self.dbg.hook(record, phases.AFTER_COMMIT, stmt.kw_loc, stmt.end_loc)
                if pending_return is not None:
                    raise pending_return
                return

    def _exec_monitor(self, record: ActivityRecord, stmt: ast.MonitorBlock):
        lock = self.eval(record, stmt.lock)
        if not isinstance(lock, LockEntity):
            raise PdRuntimeError("monitor needs a lock", stmt.kw_loc)
        self._acquire(record, lock, stmt.kw_loc)
        scope = ScopeInstance("Monitor", self.registry.ids.allocate(),
                              stmt.loc, record.id, extra=lock)
        record.scopes.append(scope)
        self.dbg.emit_scope_start(record, scope)
        self.dbg.hook(record, phases.AFTER_ACQUIRE, stmt.kw_loc, involved=(lock.id,))
        try:
            self.exec_block(record, stmt.body)
        finally:
            self.dbg.hook(record, phases.BEFORE_RELEASE, stmt.end_loc, involved=(lock.id,))
            lock.release(record, stmt.end_loc)
            self.dbg.emit_receive(record, "LockRelease", lock.id)
            record.scopes.pop()
            self.dbg.emit_scope_end(record, scope)
            self.dbg.hook(record, phases.AFTER_RELEASE, stmt.end_loc, involved=(lock.id,))

    def _acquire(self, record: ActivityRecord, lock: LockEntity, loc: SourceLocation):
        self.dbg.hook(record, phases.BEFORE_ACQUIRE, loc, involved=(lock.id,))
        record.blocked_on = "lock"
        try:
            lock.acquire(record, self.stop, loc)
        finally:
            record.blocked_on = None
        self.dbg.emit_send(record, "LockAcquire", lock.id, lock.id)

    # --- expressions -------------------------------------------------------------

    def eval(self, record: ActivityRecord, expr: ast.Expr):
        method = getattr(self, "_eval_" + type(expr).__name__, None)
        if method is None:
            raise PdRuntimeError(f"cannot evaluate {type(expr).__name__}", expr.loc)
        return method(record, expr)

    def _eval_IntLit(self, record, e: ast.IntLit):
        return e.value

    def _eval_StrLit(self, record, e: ast.StrLit):
        return e.value

    def _eval_BoolLit(self, record, e: ast.BoolLit):
        return e.value

    def _eval_ArrayLit(self, record, e: ast.ArrayLit):
        return [self.eval(record, item) for item in e.items]

    def _eval_Name(self, record, e: ast.Name):
        env = record.frames[-1].env
        if e.ident in env:
            return env[e.ident]
        fn = self.program.functions.get(e.ident)
        if fn is not None:
            return fn
        raise PdRuntimeError(f"undefined variable {e.ident}", e.loc)

    def _eval_Unary(self, record, e: ast.Unary):
        value = self.eval(record, e.operand)
        if e.op == "-":
            if isinstance(value, bool) or not isinstance(value, int):
                raise PdRuntimeError("unary - needs an integer", e.loc)
            return -value
        if not isinstance(value, bool):
            raise PdRuntimeError("! needs a boolean", e.loc)
        return not value

    def _eval_Binary(self, record, e: ast.Binary):
        if e.op == "&&":
            return self._bool(record, e.left) and self._bool(record, e.right)
        if e.op == "||":
            return self._bool(record, e.left) or self._bool(record, e.right)
        left = self.eval(record, e.left)
        right = self.eval(record, e.right)
        if e.op == "==":
            return left == right
        if e.op == "!=":
            return left != right
        if e.op == "+" and isinstance(left, str) and isinstance(right, str):
            return left + right
        for operand in (left, right):
            if isinstance(operand, bool) or not isinstance(operand, int):
                raise PdRuntimeError(f"{e.op} needs integers", e.loc)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if e.op in ("/", "%"):
            if right == 0:
                raise PdRuntimeError("division by zero", e.loc)
            return left // right if e.op == "/" else left % right
        if e.op == "<":
            return left < right
        if e.op == "<=":
            return left <= right
        if e.op == ">":
            return left > right
        if e.op == ">=":
            return left >= right
        raise PdRuntimeError(f"unknown operator {e.op}", e.loc)

    def _eval_Index(self, record, e: ast.Index):
        arr = self.eval(record, e.obj)
        idx = self.eval(record, e.index)
        self._check_index(arr, idx, e.loc)
        return arr[idx]

    def _eval_Call(self, record, e: ast.Call):
        if isinstance(e.callee, ast.Name):
            name = e.callee.ident
            env = record.frames[-1].env
            if name in env:
                target = env[name]
            elif name in self.program.functions:
                target = self.program.functions[name]
            elif name in self._builtins:
                args = [self.eval(record, a) for a in e.args]
                return self._builtins[name](record, args, e.loc)
            else:
                raise PdRuntimeError(f"undefined function {name}", e.callee.loc)
        else:
            target = self.eval(record, e.callee)
        if not isinstance(target, ast.FnDef):
            raise PdRuntimeError("calling a non-function", e.loc)
        args = [self.eval(record, a) for a in e.args]
        return self.call_function(record, target, args, call_loc=e.loc)

    def _eval_MethodCall(self, record, e: ast.MethodCall):
        obj = self.eval(record, e.obj)
        args = [self.eval(record, a) for a in e.args]
        if isinstance(obj, ChannelEntity):
            if e.method == "send" and len(args) == 1:
                return self._channel_send(record, obj, args[0], e.method_loc)
            if e.method == "receive" and len(args) == 0:
                return self._channel_receive(record, obj, e.method_loc)
        if isinstance(obj, CellEntity):
            if e.method == "get" and len(args) == 0:
                return self._cell_get(record, obj)
            if e.method == "set" and len(args) == 1:
                return self._cell_set(record, obj, args[0])
        raise PdRuntimeError(f"no method {e.method} for this value", e.method_loc)

    # --- concurrency forms ----------------------------------------------------------

    def _eval_SpawnExpr(self, record, e: ast.SpawnExpr):
        fn = self.eval(record, e.fn)
        if not isinstance(fn, ast.FnDef):
            raise PdRuntimeError(f"{e.kind.lower()} needs a function reference", e.kw_loc)
        args = [self.eval(record, a) for a in e.args]
        if len(args) != len(fn.params):
            raise PdRuntimeError(
                f"{fn.name} takes {len(fn.params)} argument(s), got {len(args)}", e.kw_loc)
        self.dbg.hook(record, phases.BEFORE_ACTIVITY_CREATION, e.kw_loc)
        child = ActivityRecord(self.registry.ids.allocate(), e.kind, fn.name, e.kw_loc)
        if record.flag_next_spawn:
            record.flag_next_spawn = False
            child.halt_on_first_stmt = True
        self.registry.add_activity(child)
        self.dbg.emit_activity_creation(record.id, child)
        self.coordinator.inc()
        self._start_thread(child, lambda: self._activity_main(child, fn, args))
        return child

    def _eval_ActorExpr(self, record, e: ast.ActorExpr):
        fn = self.eval(record, e.fn)
        if not isinstance(fn, ast.FnDef):
            raise PdRuntimeError("actor needs a function reference", e.kw_loc)
        self.dbg.hook(record, phases.BEFORE_ACTIVITY_CREATION, e.kw_loc)
        child = ActivityRecord(self.registry.ids.allocate(), "Actor", fn.name, e.kw_loc)
        child.mailbox = Mailbox()
        if record.flag_next_spawn:
            record.flag_next_spawn = False
            child.halt_on_first_stmt = True
        self.registry.add_activity(child)
        self.dbg.emit_activity_creation(record.id, child)
        self._start_thread(child, lambda: self._actor_main(child))
        return child

    def _eval_JoinExpr(self, record, e: ast.JoinExpr):
        handle = self.eval(record, e.handle)
        if not isinstance(handle, ActivityRecord):
            raise PdRuntimeError("join needs an activity handle", e.kw_loc)
        if handle.kind == "Actor":
            raise PdRuntimeError("actors are not joinable", e.kw_loc)
        if handle is record:
            raise PdRuntimeError("join on self", e.kw_loc)
        self.dbg.hook(record, phases.BEFORE_JOIN, e.kw_loc, involved=(handle.id,))
        record.blocked_on = "join"
        try:
            with handle.completion:
                wait_for(handle.completion, lambda: handle.state == "Completed", self.stop)
        finally:
            record.blocked_on = None
        self.dbg.emit_receive(record, _JOIN_OPS[handle.kind], handle.id)
        self.dbg.hook(record, phases.AFTER_JOIN, e.kw_loc, involved=(handle.id,))
        return handle.return_value

    def _eval_Send(self, record, e: ast.Send):
        target = self.eval(record, e.target)
        if not isinstance(target, ActivityRecord) or target.kind != "Actor":
            raise PdRuntimeError("message target must be an actor", e.arrow_loc)
        args = [self.eval(record, a) for a in e.args]
        self.dbg.hook(record, phases.BEFORE_MESSAGE_SEND, e.arrow_loc,
                      involved=(target.id,))
        msg_id = self.registry.ids.allocate()
        promise = PromiseEntity(self.registry.ids.allocate(), e.arrow_loc)
        self.registry.add_passive(promise)
        self.dbg.emit_passive_creation(record, "Promise", promise.id, e.arrow_loc)
        msg = Message(msg_id, e.method, args, promise, e.arrow_loc, record.id)
        if record.flag_next_send == "receiver":
            msg.halt_first_stmt = True
        elif record.flag_next_send == "resolver":
            promise.halt_resolver = True
        elif record.flag_next_send == "resolution":
            promise.halt_handlers = True
        record.flag_next_send = None
        self.dbg.emit_send(record, "ActorMessageSend", msg_id, target.id)
        self.coordinator.inc()
        target.mailbox.put(msg)
        return promise

    def _eval_ChannelExpr(self, record, e: ast.ChannelExpr):
        channel = ChannelEntity(self.registry.ids.allocate(), e.loc)
        self.registry.add_passive(channel)
        self.dbg.emit_passive_creation(record, "Channel", channel.id, e.loc)
        return channel

    def _eval_LockExpr(self, record, e: ast.LockExpr):
        lock = LockEntity(self.registry.ids.allocate(), e.loc)
        self.registry.add_passive(lock)
        self.dbg.emit_passive_creation(record, "Lock", lock.id, e.loc)
        return lock

    def _eval_CondExpr(self, record, e: ast.CondExpr):
        cond = ConditionEntity(self.registry.ids.allocate(), e.loc)
        self.registry.add_passive(cond)
        self.dbg.emit_passive_creation(record, "Condition", cond.id, e.loc)
        return cond

    def _eval_CellExpr(self, record, e: ast.CellExpr):
        cell = CellEntity(self.registry.ids.allocate(), self.eval(record, e.init))
        self.registry.add_cell(cell)
        return cell

    def _eval_AcquireExpr(self, record, e: ast.AcquireExpr):
        lock = self.eval(record, e.lock)
        if not isinstance(lock, LockEntity):
            raise PdRuntimeError("acquire needs a lock", e.kw_loc)
        self._acquire(record, lock, e.kw_loc)
        self.dbg.hook(record, phases.AFTER_ACQUIRE, e.kw_loc, involved=(lock.id,))
        return 0

    def _eval_ReleaseExpr(self, record, e: ast.ReleaseExpr):
        lock = self.eval(record, e.lock)
        if not isinstance(lock, LockEntity):
            raise PdRuntimeError("release needs a lock", e.kw_loc)
        self.dbg.hook(record, phases.BEFORE_RELEASE, e.kw_loc, involved=(lock.id,))
        lock.release(record, e.kw_loc)
        self.dbg.emit_receive(record, "LockRelease", lock.id)
        self.dbg.hook(record, phases.AFTER_RELEASE, e.kw_loc, involved=(lock.id,))
        return 0

    def _eval_WaitExpr(self, record, e: ast.WaitExpr):
        cond = self.eval(record, e.cond)
        lock = self.eval(record, e.lock)
        if not isinstance(cond, ConditionEntity) or not isinstance(lock, LockEntity):
            raise PdRuntimeError("wait needs a condition and a lock", e.loc)
        cond.add_waiter(record.id)
        lock.release(record, e.loc)
        record.blocked_on = "condition"
        try:
            cond.await_signal(record.id, self.stop)
        finally:
            record.blocked_on = None
        record.blocked_on = "lock"
        try:
            lock.acquire(record, self.stop, e.loc)
        finally:
            record.blocked_on = None
        self.dbg.emit_receive(record, "ConditionWait", cond.id)
        return 0

    def _eval_SignalExpr(self, record, e: ast.SignalExpr):
        cond = self.eval(record, e.cond)
        lock = self.eval(record, e.lock)
        if not isinstance(cond, ConditionEntity) or not isinstance(lock, LockEntity):
            raise PdRuntimeError("signal needs a condition and a lock", e.loc)
        if lock.owner != record.id:
            raise PdRuntimeError("signal without holding the lock", e.loc)
        self.dbg.emit_send(record, "ConditionSignal", cond.id, cond.id)
        cond.signal_one()
        return 0

    def _eval_WhenResolvedExpr(self, record, e: ast.WhenResolvedExpr):
        promise = self.eval(record, e.promise)
        callback = self.eval(record, e.callback)
        if not isinstance(promise, PromiseEntity):
            raise PdRuntimeError("whenResolved needs a promise", e.loc)
        if not isinstance(callback, ast.FnDef):
            raise PdRuntimeError("whenResolved needs a function reference", e.loc)
        if record.kind != "Actor":
            raise PdRuntimeError("whenResolved outside an actor", e.loc)
        with promise.lock:
            if promise.state == "Unresolved":
                promise.handlers.append((callback, record, e.loc))
                return 0
            value = promise.value
        self._schedule_handler(record, promise, callback, record, e.loc, value)
        return 0

    def _eval_ResolveExpr(self, record, e: ast.ResolveExpr):
        promise = self.eval(record, e.promise)
        if not isinstance(promise, PromiseEntity):
            raise PdRuntimeError("resolve needs a promise", e.kw_loc)
        value = self.eval(record, e.value)
        done = self._resolve(record, promise, value, errored=False, report_loc=e.kw_loc)
        if not done:
            raise PdRuntimeError("resolve of an already-resolved promise", e.kw_loc)
        return 0

    # --- promises --------------------------------------------------------------

    def _resolve(self, record: ActivityRecord, promise: PromiseEntity, value,
                 errored: bool, report_loc: SourceLocation) -> bool:
        if not promise.claim():
            return False
        forced = promise.halt_resolver
        promise.halt_resolver = False
        self.dbg.hook(record, phases.BEFORE_PROMISE_RESOLUTION, promise.creation_loc,
                      report_loc, involved=(promise.id,), forced=forced)
        with promise.lock:
            promise.state = "Errored" if errored else "Resolved"
            promise.value = value
            handlers = list(promise.handlers)
            promise.handlers.clear()
        self.dbg.emit_send(record, "PromiseResolve", promise.id, promise.id)
        for callback, actor, reg_loc in handlers:
            self._schedule_handler(record, promise, callback, actor, reg_loc, value)
        promise.halt_handlers = False
        return True

    def _schedule_handler(self, record: ActivityRecord, promise: PromiseEntity,
                          callback: ast.FnDef, actor: ActivityRecord,
                          reg_loc: SourceLocation, value):
        msg = Message(self.registry.ids.allocate(), callback.name, [value], None,
                      reg_loc, record.id, handler_fn=callback, handler_promise=promise)
        if promise.halt_handlers:
            msg.halt_first_stmt = True
        # A handler activation is a message to the registering actor, so it
        # gets its own send event; the later turn correlates via the id.
        self.dbg.emit_send(record, "ActorMessageSend", msg.id, actor.id)
        self.coordinator.inc()
        actor.mailbox.put(msg)

    # --- channels ---------------------------------------------------------------

    def _channel_send(self, record: ActivityRecord, channel: ChannelEntity,
                      value, loc: SourceLocation):
        self.dbg.hook(record, phases.BEFORE_CHANNEL_SEND, loc, involved=(channel.id,))
        offer = ChannelOffer(value, record, loc)
        if record.flag_next_channel_send:
            record.flag_next_channel_send = False
            offer.halt_receiver = True
        record.blocked_on = "channel-send"
        try:
            offer = channel.send(offer, self.stop)
        finally:
            record.blocked_on = None
        with self._pairs_lock:
            self.channel_pairs.append((channel.id, record.id, offer.receiver.id))
        self.dbg.emit_send(record, "ChannelSend", channel.id, channel.id)
        self.dbg.hook(record, phases.AFTER_CHANNEL_SEND, offer.receive_site, loc,
                      involved=(channel.id,), forced=offer.halt_sender)
        return 0

    def _channel_receive(self, record: ActivityRecord, channel: ChannelEntity,
                         loc: SourceLocation):
        self.dbg.hook(record, phases.BEFORE_CHANNEL_RECEIVE, loc, involved=(channel.id,))
        taker = ChannelTaker(record, loc)
        if record.flag_next_channel_receive:
            record.flag_next_channel_receive = False
            taker.halt_sender = True
        record.blocked_on = "channel-receive"
        try:
            offer = channel.receive(taker, self.stop)
        finally:
            record.blocked_on = None
        self.dbg.emit_receive(record, "ChannelReceive", channel.id)
        self.dbg.hook(record, phases.AFTER_CHANNEL_RECEIVE, offer.send_site, loc,
                      involved=(channel.id,), forced=offer.halt_receiver)
        return offer.value

    # --- cells -------------------------------------------------------------------

    def _cell_get(self, record: ActivityRecord, cell: CellEntity):
        scope = record.innermost_scope("Transaction")
        if scope is not None:
            return scope.extra.read(cell)
        return cell.value

    def _cell_set(self, record: ActivityRecord, cell: CellEntity, value):
        scope = record.innermost_scope("Transaction")
        if scope is not None:
            scope.extra.write(cell, value)
        else:
            with self.commit_latch:
                cell.value = value
                cell.version += 1
        return 0

    # --- builtins -----------------------------------------------------------------

    def _builtin_print(self, record, args, loc):
        self.printer(" ".join(value_str(a) for a in args))
        return 0

    def _builtin_len(self, record, args, loc):
        if len(args) != 1 or not isinstance(args[0], (list, str)):
            raise PdRuntimeError("len needs one array or string", loc)
        return len(args[0])

    def _builtin_push(self, record, args, loc):
        if len(args) != 2 or not isinstance(args[0], list):
            raise PdRuntimeError("push needs an array and a value", loc)
        args[0].append(args[1])
        return 0


def value_str(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    if isinstance(value, list):
        return "[" + ", ".join(value_str(v) for v in value) + "]"
    if isinstance(value, ast.FnDef):
        return f"<fn {value.name}>"
    if isinstance(value, ActivityRecord):
        return f"<{value.kind.lower()} {value.id}>"
    if isinstance(value, ChannelEntity):
        return f"<channel {value.id}>"
    if isinstance(value, LockEntity):
        return f"<lock {value.id}>"
    if isinstance(value, ConditionEntity):
        return f"<condition {value.id}>"
    if isinstance(value, PromiseEntity):
        return f"<promise {value.id} {value.state.lower()}>"
    if isinstance(value, CellEntity):
        return f"<cell {value_str(value.value)}>"
    return repr(value)
