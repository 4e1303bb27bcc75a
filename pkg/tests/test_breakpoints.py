"""One scripted scenario per shipped breakpoint type (21 total).

Each scenario asserts the halt location, the suspended activity's type,
and a state predicate matching the breakpoint's documented moment.
"""

import pytest

from helpers import finish, loc_by_tag, make_session
from polydbg.protocol import tracebin as tb
from polydbg.runtime.entities import CellEntity, LockEntity, PromiseEntity

SPAWN_JOIN = """
fn child() {
  return 1;
}
fn main() {
  let t = spawn(child);
  let v = join(t);
}
"""

ACTOR_SEND = """
fn work(v) {
  return v;
}
fn main() {
  let a = actor(work);
  let p = a <- work(5);
}
"""

HANDLER = """
fn work(v) {
  return v * 2;
}
fn onDone(v) {
  return v;
}
fn begin(me, w) {
  let p = w <- work(3);
  whenResolved(p, onDone);
  return 0;
}
fn main() {
  let w = actor(work);
  let b = actor(begin);
  let go = b <- begin(b, w);
}
"""

CHANNEL = """
fn recv(ch) {
  return ch.receive();
}
fn main() {
  let ch = channel();
  let t = task(recv, ch);
  ch.send(9);
  let v = join(t);
}
"""

ATOMIC = """
fn main() {
  let c = cell(0);
  atomic {
    let b = c.get();
    c.set(b + 1);
  }
  return 0;
}
"""

LOCK = """
fn main() {
  let l = lock();
  acquire(l);
  release(l);
}
"""

BREAKPOINT_PROGRAMS = {
    "spawn_join": SPAWN_JOIN,
    "actor_send": ACTOR_SEND,
    "handler": HANDLER,
    "channel": CHANNEL,
    "atomic": ATOMIC,
    "lock": LOCK,
}


def line_col(src: str, needle: str, occurrence: int = 0):
    index = -1
    for _ in range(occurrence + 1):
        index = src.index(needle, index + 1)
    line = src.count("\n", 0, index) + 1
    col = index - (src.rfind("\n", 0, index) + 1) + 1
    return line, col


def sends(session, label):
    return [e for _, e in session.trace_events()
            if isinstance(e, tb.SendOperation) and e.op_label == label]


def receives(session, label):
    return [e for _, e in session.trace_events()
            if isinstance(e, tb.ReceiveOperation) and e.op_label == label]


def first_promise(session) -> PromiseEntity:
    for entity in session.registry.passive.values():
        if isinstance(entity, PromiseEntity):
            return entity
    raise AssertionError("no promise created")


def first_cell(session) -> CellEntity:
    return next(iter(session.registry.cells.values()))


def first_lock(session) -> LockEntity:
    for entity in session.registry.passive.values():
        if isinstance(entity, LockEntity):
            return entity
    raise AssertionError("no lock created")


def run_scenario(src, bp_name, tag, *, index=0, stop_timeout=10.0):
    session = make_session(src)
    session.install_breakpoint(bp_name, loc_by_tag(session, tag, index))
    session.launch()
    event = session.next_stop(stop_timeout)
    return session, event


def release_and_finish(session, event):
    session.remove_breakpoint  # breakpoints may re-fire; scenarios are one-pass
    session.step(event.activity_id, "resume")
    assert finish(session) == 0


def test_activity_creation():
    session, ev = run_scenario(SPAWN_JOIN, "activity-creation", "ActivityCreation")
    assert ev.activity_type == "Thread"
    assert session.registry.activity(ev.activity_id).name == "main"
    assert ev.phase == "before-activity-creation"
    assert (ev.location.line, ev.location.column) == line_col(SPAWN_JOIN, "spawn")
    assert len(session.registry.all_activities()) == 1  # child does not exist yet
    release_and_finish(session, ev)


def test_activity_execution():
    session, ev = run_scenario(SPAWN_JOIN, "activity-execution", "ActivityCreation")
    record = session.registry.activity(ev.activity_id)
    assert record.name == "child"
    assert ev.activity_type == "Thread"
    assert ev.phase == "activity-first-statement"
    assert (ev.location.line, ev.location.column) == line_col(SPAWN_JOIN, "return 1;")
    assert record.state == "Suspended"
    release_and_finish(session, ev)


def test_before_join():
    session, ev = run_scenario(SPAWN_JOIN, "before-join", "ActivityJoin")
    assert session.registry.activity(ev.activity_id).name == "main"
    assert ev.phase == "before-join"
    assert (ev.location.line, ev.location.column) == line_col(SPAWN_JOIN, "join")
    assert receives(session, "ThreadJoin") == []  # join has not happened
    release_and_finish(session, ev)


def test_after_join():
    session, ev = run_scenario(SPAWN_JOIN, "after-join", "ActivityJoin")
    assert ev.phase == "after-join"
    assert len(receives(session, "ThreadJoin")) == 1
    child = [r for r in session.registry.all_activities() if r.name == "child"]
    assert child[0].state == "Completed"
    release_and_finish(session, ev)


def test_actor_message_send():
    session, ev = run_scenario(ACTOR_SEND, "actor-message-send", "EventualMessageSend")
    assert session.registry.activity(ev.activity_id).name == "main"
    assert ev.phase == "before-message-send"
    assert (ev.location.line, ev.location.column) == line_col(ACTOR_SEND, "<-")
    assert sends(session, "ActorMessageSend") == []  # nothing sent yet
    actor = [r for r in session.registry.all_activities() if r.kind == "Actor"][0]
    assert len(actor.mailbox) == 0
    release_and_finish(session, ev)


def test_actor_message_receiver():
    session, ev = run_scenario(ACTOR_SEND, "actor-message-receiver", "EventualMessageSend")
    assert ev.activity_type == "Actor"
    assert ev.phase == "turn-start"
    assert (ev.location.line, ev.location.column) == line_col(ACTOR_SEND, "<-")
    assert ev.scopes == ()  # the turn has not started
    assert len(sends(session, "ActorMessageSend")) == 1
    release_and_finish(session, ev)


def test_before_async_method_activation():
    session, ev = run_scenario(ACTOR_SEND, "before-async-method-activation",
                               "EventualMessageSend")
    assert ev.activity_type == "Actor"
    assert ev.phase == "async-activation"
    assert (ev.location.line, ev.location.column) == line_col(ACTOR_SEND, "return v;")
    assert [label for label, _ in ev.scopes] == ["Turn"]
    release_and_finish(session, ev)


def test_after_async_method_activation():
    session, ev = run_scenario(ACTOR_SEND, "after-async-method-activation",
                               "EventualMessageSend")
    assert ev.activity_type == "Actor"
    assert ev.phase == "turn-return"
    assert [label for label, _ in ev.scopes] == ["Turn"]
    assert first_promise(session).state == "Unresolved"  # not yet resolved
    release_and_finish(session, ev)


def test_before_promise_resolution():
    session, ev = run_scenario(ACTOR_SEND, "before-promise-resolution", "PromiseCreation")
    assert ev.activity_type == "Actor"  # the resolver is the actor finishing its turn
    assert ev.phase == "before-promise-resolution"
    assert first_promise(session).state == "Unresolved"
    release_and_finish(session, ev)


def test_on_promise_resolution():
    session, ev = run_scenario(HANDLER, "on-promise-resolution", "PromiseCreation")
    record = session.registry.activity(ev.activity_id)
    assert record.name == "begin"  # handler runs on the registering actor
    assert ev.phase == "promise-handler-start"
    assert (ev.location.line, ev.location.column) == line_col(HANDLER, "return v;")
    site = loc_by_tag(session, "PromiseCreation", 0)
    promise = [p for p in session.registry.passive.values()
               if isinstance(p, PromiseEntity) and p.creation_loc == site][0]
    assert promise.state == "Resolved"
    assert promise.value == 6
    release_and_finish(session, ev)


def test_before_channel_send():
    session, ev = run_scenario(CHANNEL, "before-channel-send", "ChannelWrite")
    assert session.registry.activity(ev.activity_id).name == "main"
    assert ev.phase == "before-channel-send"
    assert (ev.location.line, ev.location.column) == line_col(CHANNEL, "send")
    assert sends(session, "ChannelSend") == []
    release_and_finish(session, ev)


def test_after_channel_receive_set_on_send_site():
    session, ev = run_scenario(CHANNEL, "after-channel-receive", "ChannelWrite")
    record = session.registry.activity(ev.activity_id)
    assert record.name == "recv"  # the receiver halts
    assert ev.phase == "after-channel-receive"
    assert (ev.location.line, ev.location.column) == line_col(CHANNEL, "receive")
    assert len(sends(session, "ChannelSend")) == 1
    release_and_finish(session, ev)


def test_before_channel_receive():
    session, ev = run_scenario(CHANNEL, "before-channel-receive", "ChannelRead")
    assert session.registry.activity(ev.activity_id).name == "recv"
    assert ev.phase == "before-channel-receive"
    assert receives(session, "ChannelReceive") == []
    release_and_finish(session, ev)


def test_after_channel_send_set_on_receive_site():
    session, ev = run_scenario(CHANNEL, "after-channel-send", "ChannelRead")
    record = session.registry.activity(ev.activity_id)
    assert record.name == "main"  # the sender halts
    assert ev.phase == "after-channel-send"
    assert (ev.location.line, ev.location.column) == line_col(CHANNEL, "send")
    assert len(sends(session, "ChannelSend")) == 1
    release_and_finish(session, ev)


def test_before_transaction():
    session, ev = run_scenario(ATOMIC, "before-transaction", "Atomic")
    assert ev.activity_type == "Thread"
    assert ev.phase == "before-transaction"
    assert (ev.location.line, ev.location.column) == line_col(ATOMIC, "atomic")
    assert ev.scopes == ()
    assert first_cell(session).value == 0
    release_and_finish(session, ev)


def test_before_commit():
    session, ev = run_scenario(ATOMIC, "before-commit", "Atomic")
    assert ev.phase == "before-commit"
    assert [label for label, _ in ev.scopes] == ["Transaction"]
    cell = first_cell(session)
    assert cell.value == 0 and cell.version == 0  # writes not yet published
    release_and_finish(session, ev)


def test_after_commit():
    session, ev = run_scenario(ATOMIC, "after-commit", "Atomic")
    assert ev.phase == "after-commit"
    assert ev.scopes == ()  # the transaction scope has ended
    cell = first_cell(session)
    assert cell.value == 1 and cell.version == 1  # commit published the write
    release_and_finish(session, ev)


def test_before_acquire():
    session, ev = run_scenario(LOCK, "before-acquire", "AcquireLock")
    assert ev.phase == "before-acquire"
    assert (ev.location.line, ev.location.column) == line_col(LOCK, "acquire")
    assert first_lock(session).owner is None
    release_and_finish(session, ev)


def test_after_acquire():
    session, ev = run_scenario(LOCK, "after-acquire", "AcquireLock")
    assert ev.phase == "after-acquire"
    assert first_lock(session).owner == ev.activity_id  # suspended activity owns it
    release_and_finish(session, ev)


def test_before_release():
    session, ev = run_scenario(LOCK, "before-release", "ReleaseLock")
    assert ev.phase == "before-release"
    assert (ev.location.line, ev.location.column) == line_col(LOCK, "release")
    assert first_lock(session).owner == ev.activity_id  # still held
    release_and_finish(session, ev)


def test_after_release():
    session, ev = run_scenario(LOCK, "after-release", "ReleaseLock")
    assert ev.phase == "after-release"
    assert first_lock(session).owner is None
    release_and_finish(session, ev)


# --- installation validation ----------------------------------------------------


def test_incompatible_location_rejected():
    from polydbg.debugger.controller import IncompatibleLocation
    session = make_session(CHANNEL)
    with pytest.raises(IncompatibleLocation):
        session.install_breakpoint("before-transaction", loc_by_tag(session, "ChannelWrite"))


def test_unknown_breakpoint_type_rejected():
    from polydbg.debugger.controller import UnknownBreakpointType
    session = make_session(ATOMIC)
    with pytest.raises(UnknownBreakpointType):
        session.install_breakpoint("no-such-breakpoint", loc_by_tag(session, "Atomic"))


def test_all_21_types_covered():
    from polydbg.protocol.catalog import shipped_catalog
    import sys
    module = sys.modules[__name__]
    names = {b.name for b in shipped_catalog().breakpoint_types}
    covered = {
        "activity-creation", "activity-execution", "before-join", "after-join",
        "actor-message-send", "actor-message-receiver",
        "before-async-method-activation", "after-async-method-activation",
        "before-promise-resolution", "on-promise-resolution",
        "before-channel-send", "after-channel-receive",
        "before-channel-receive", "after-channel-send",
        "before-transaction", "before-commit", "after-commit",
        "before-acquire", "after-acquire", "before-release", "after-release",
    }
    assert covered == names
    del module
