"""Runtime entities: activities, dynamic scopes, and passive entities.

All entity ids come from one global counter (0 is invalid), so ids are
unique across every entity kind. Every blocking primitive polls the stop
token so the whole program can be torn down from the debugger.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from polydbg.location import SourceLocation

_POLL = 0.05  # seconds between stop-token checks while blocked


class ActivityTerminated(Exception):
    """Raised inside an activity when the program is being stopped."""


class PdRuntimeError(Exception):
    def __init__(self, message: str, location: SourceLocation | None = None):
        super().__init__(message)
        self.message = message
        self.location = location


class StopToken:
    def __init__(self):
        self._event = threading.Event()

    def set(self):
        self._event.set()

    def is_set(self) -> bool:
        return self._event.is_set()

    def check(self):
        if self._event.is_set():
            raise ActivityTerminated()


def wait_for(cond: threading.Condition, predicate: Callable[[], bool], stop: StopToken):
    """Wait on `cond` (already held) until predicate holds or stop is set."""
    while not predicate():
        if stop.is_set():
            raise ActivityTerminated()
        cond.wait(_POLL)


class IdAllocator:
    def __init__(self):
        self._lock = threading.Lock()
        self._next = 1

    def allocate(self) -> int:
        with self._lock:
            value = self._next
            self._next += 1
            return value


@dataclass
class ScopeInstance:
    scope_type: str  # Monitor | Turn | Transaction
    scope_id: int
    location: SourceLocation
    owner_id: int
    extra: Any = None  # monitor: LockEntity; turn: Message; transaction: Transaction


@dataclass
class Message:
    id: int
    method: str
    args: list
    promise: Optional["PromiseEntity"]
    send_site: SourceLocation
    sender_id: int
    # Handler activations reuse the turn machinery: `handler_fn` is set and
    # `method` names the callback for stack traces.
    handler_fn: Any = None
    handler_promise: Optional["PromiseEntity"] = None
    halt_first_stmt: bool = False
    halt_turn_start: bool = False


class ActivityRecord:
    def __init__(self, id: int, kind: str, name: str, creation_loc: SourceLocation):
        self.id = id
        self.kind = kind  # Thread | Actor | Process | Task
        self.name = name
        self.creation_loc = creation_loc
        self.state = "Running"
        self.blocked_on: str | None = None
        self.return_value: Any = 0
        self.error: PdRuntimeError | None = None
        self.scopes: list[ScopeInstance] = []
        self.frames: list = []  # interpreter Frames, innermost last
        self.mailbox: Mailbox | None = None
        self.first_stmt_pending = True
        # Debugger marks (one-shot; consumed by the controller/runtime).
        self.halt_on_first_stmt = False
        self.halt_next_turn = False
        self.flag_next_spawn = False
        self.flag_next_send: str | None = None  # "receiver" | "resolver" | "resolution"
        self.flag_next_channel_send = False
        self.flag_next_channel_receive = False
        self.completion = threading.Condition()

    def scope_labels(self) -> list[tuple[str, int]]:
        return [(s.scope_type, s.scope_id) for s in self.scopes]

    def innermost_scope(self, scope_type: str) -> ScopeInstance | None:
        for scope in reversed(self.scopes):
            if scope.scope_type == scope_type:
                return scope
        return None


class Mailbox:
    def __init__(self):
        self._cond = threading.Condition()
        self._queue: deque[Message] = deque()

    def put(self, msg: Message):
        with self._cond:
            self._queue.append(msg)
            self._cond.notify_all()

    def get(self, stop: StopToken) -> Message:
        with self._cond:
            wait_for(self._cond, lambda: len(self._queue) > 0, stop)
            return self._queue.popleft()

    def __len__(self):
        with self._cond:
            return len(self._queue)


class PromiseEntity:
    def __init__(self, id: int, creation_loc: SourceLocation):
        self.id = id
        self.creation_loc = creation_loc
        self.lock = threading.Lock()
        self.state = "Unresolved"  # Unresolved | Resolved | Errored
        self.value: Any = None
        self.handlers: list[tuple[Any, ActivityRecord, SourceLocation]] = []
        self.claimed = False
        # Debugger marks.
        self.halt_resolver = False
        self.halt_handlers = False

    def claim(self) -> bool:
        """Reserve the right to resolve; at most one claimant ever wins."""
        with self.lock:
            if self.claimed:
                return False
            self.claimed = True
            return True


class LockEntity:
    def __init__(self, id: int, creation_loc: SourceLocation):
        self.id = id
        self.creation_loc = creation_loc
        self.cond = threading.Condition()
        self.owner: int | None = None
        self.queue: deque[int] = deque()  # FIFO ticket order

    def acquire(self, record: ActivityRecord, stop: StopToken, loc: SourceLocation):
        with self.cond:
            if self.owner == record.id:
                raise PdRuntimeError("lock is not reentrant", loc)
            self.queue.append(record.id)
            try:
                wait_for(self.cond,
                         lambda: self.owner is None and self.queue[0] == record.id,
                         stop)
            except ActivityTerminated:
                self.queue.remove(record.id)
                raise
            self.queue.popleft()
            self.owner = record.id

    def release(self, record: ActivityRecord, loc: SourceLocation):
        with self.cond:
            if self.owner != record.id:
                raise PdRuntimeError("release of a lock the activity does not hold", loc)
            self.owner = None
            self.cond.notify_all()


class ConditionEntity:
    def __init__(self, id: int, creation_loc: SourceLocation):
        self.id = id
        self.creation_loc = creation_loc
        self.cond = threading.Condition()
        self.waiters: deque[int] = deque()
        self.signaled: set[int] = set()

    def add_waiter(self, activity_id: int):
        with self.cond:
            self.waiters.append(activity_id)

    def await_signal(self, activity_id: int, stop: StopToken):
        with self.cond:
            wait_for(self.cond, lambda: activity_id in self.signaled, stop)
            self.signaled.discard(activity_id)

    def signal_one(self):
        with self.cond:
            if self.waiters:
                self.signaled.add(self.waiters.popleft())
                self.cond.notify_all()


@dataclass
class ChannelOffer:
    value: Any
    sender: ActivityRecord
    send_site: SourceLocation
    taken: bool = False
    receiver: ActivityRecord | None = None
    receive_site: SourceLocation | None = None
    halt_receiver: bool = False  # step to channel receiver
    halt_sender: bool = False  # step to channel sender


@dataclass
class ChannelTaker:
    receiver: ActivityRecord
    receive_site: SourceLocation
    halt_sender: bool = False
    offer: ChannelOffer | None = None


class ChannelEntity:
    def __init__(self, id: int, creation_loc: SourceLocation):
        self.id = id
        self.creation_loc = creation_loc
        self.cond = threading.Condition()
        self.offers: deque[ChannelOffer] = deque()
        self.takers: deque[ChannelTaker] = deque()

    def send(self, offer: ChannelOffer, stop: StopToken) -> ChannelOffer:
        """Offer a value and block until a receiver takes it."""
        with self.cond:
            if self.takers:
                taker = self.takers.popleft()
                offer.receiver = taker.receiver
                offer.receive_site = taker.receive_site
                offer.halt_sender = taker.halt_sender
                offer.taken = True
                taker.offer = offer
                self.cond.notify_all()
            else:
                self.offers.append(offer)
                try:
                    wait_for(self.cond, lambda: offer.taken, stop)
                except ActivityTerminated:
                    if not offer.taken and offer in self.offers:
                        self.offers.remove(offer)
                    raise
            return offer

    def receive(self, taker: ChannelTaker, stop: StopToken) -> ChannelOffer:
        """Block until a sender's value can be taken."""
        with self.cond:
            if self.offers:
                offer = self.offers.popleft()
                offer.receiver = taker.receiver
                offer.receive_site = taker.receive_site
                offer.halt_sender = taker.halt_sender
                offer.taken = True
                self.cond.notify_all()
                return offer
            self.takers.append(taker)
            try:
                wait_for(self.cond, lambda: taker.offer is not None, stop)
            except ActivityTerminated:
                if taker.offer is None and taker in self.takers:
                    self.takers.remove(taker)
                raise
            return taker.offer


class CellEntity:
    """A shared mutable cell; versioned so transactions can validate reads."""

    def __init__(self, id: int, value: Any):
        self.id = id
        self.value = value
        self.version = 0


class Transaction:
    def __init__(self):
        self.reads: dict[CellEntity, tuple[int, Any]] = {}  # cell -> (version, value)
        self.writes: dict[CellEntity, Any] = {}
        self.attempt = 1

    def read(self, cell: CellEntity) -> Any:
        if cell in self.writes:
            return self.writes[cell]
        if cell in self.reads:
            return self.reads[cell][1]
        self.reads[cell] = (cell.version, cell.value)
        return self.reads[cell][1]

    def write(self, cell: CellEntity, value: Any):
        self.writes[cell] = value

    def commit(self, latch: threading.Lock) -> bool:
        with latch:
            for cell, (version, _) in self.reads.items():
                if cell.version != version:
                    return False
            for cell, value in self.writes.items():
                cell.value = value
                cell.version += 1
            return True


class EntityRegistry:
    """Shared lookup tables, safe for concurrent use."""

    def __init__(self):
        self.ids = IdAllocator()
        self._lock = threading.Lock()
        self.activities: dict[int, ActivityRecord] = {}
        self.passive: dict[int, Any] = {}
        self.cells: dict[int, CellEntity] = {}

    def add_activity(self, record: ActivityRecord):
        with self._lock:
            self.activities[record.id] = record

    def add_passive(self, entity):
        with self._lock:
            self.passive[entity.id] = entity

    def add_cell(self, cell: CellEntity):
        with self._lock:
            self.cells[cell.id] = cell

    def activity(self, activity_id: int) -> ActivityRecord | None:
        with self._lock:
            return self.activities.get(activity_id)

    def all_activities(self) -> list[ActivityRecord]:
        with self._lock:
            return list(self.activities.values())
