"""Suspension locality, pause on blocked activities, forced STM retry."""

import time

from helpers import Watchdog, finish, loc_by_tag, make_session
from polydbg.protocol import tracebin as tb

CONFLICT = """
fn bump(c, gate) {
  while (gate.get() == 0) {
    let spin = 0;
  }
  atomic {
    c.set(c.get() + 1);
  }
  return 0;
}
fn main() {
  let c = cell(0);
  let gate = cell(0);
  let t = spawn(bump, c, gate);
  atomic {
    c.set(c.get() + 10);
  }
  let r = join(t);
  print(c.get());
}
"""

FREE_RUNNER = """
fn free(c) {
  c.set(99);
  return 0;
}
fn held() {
  atomic {
    let x = 1;
  }
  return 0;
}
fn main() {
  let c = cell(0);
  let t1 = spawn(held);
  let t2 = spawn(free, c);
  let a = join(t1);
  let b = join(t2);
}
"""

BLOCKED_SENDER = """
fn lonely(ch) {
  ch.send(1);
  return 0;
}
fn counter() {
  let i = 0;
  while (i < 1000000) {
    i = i + 1;
  }
  return i;
}
fn main() {
  let ch = channel();
  let s = spawn(lonely, ch);
  let c = spawn(counter);
  let v = join(c);
  let w = join(s);
}
"""


def wait_until(predicate, timeout=10.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        if predicate():
            return True
        time.sleep(0.01)
    return False


def test_suspension_blocks_only_the_hooked_activity():
    session = make_session(FREE_RUNNER)
    atomic_loc = loc_by_tag(session, "Atomic")
    session.install_breakpoint("before-transaction", atomic_loc)
    session.launch()
    ev = session.next_stop()
    held = session.registry.activity(ev.activity_id)
    assert held.name == "held"
    # while `held` sits suspended, `free` runs to completion
    assert wait_until(lambda: any(r.name == "free" and r.state == "Completed"
                                  for r in session.registry.all_activities()))
    cell = next(iter(session.registry.cells.values()))
    assert cell.value == 99
    session.remove_breakpoint("before-transaction", atomic_loc)
    session.step(ev.activity_id, "resume")
    assert finish(session) == 0


def test_forced_conflict_retries_with_fresh_scope_id():
    session = make_session(CONFLICT)
    main_atomic = loc_by_tag(session, "Atomic", 1)  # main's block; bump's is first
    session.install_breakpoint("before-commit", main_atomic)
    session.launch()
    ev = session.next_stop()
    assert session.registry.activity(ev.activity_id).name == "main"
    # test hook: unleash the other thread to commit underneath the suspended
    # transaction (gate is the second cell created)
    cells = sorted(session.registry.cells.values(), key=lambda c: c.id)
    cells[1].value = 1
    assert wait_until(lambda: any(r.name == "bump" and r.state == "Completed"
                                  for r in session.registry.all_activities()))
    session.remove_breakpoint("before-commit", main_atomic)
    session.step(ev.activity_id, "resume")
    assert finish(session) == 0
    assert session.output == ["11"]  # both increments serialized
    # two attempts at main's block: the retry got a fresh scope id
    main_starts = [e for _, e in session.trace_events()
                   if isinstance(e, tb.ScopeStart) and e.scope_type_id == 7]
    by_line = {}
    for e in main_starts:
        by_line.setdefault(e.location.line, []).append(e.scope_id)
    attempts = by_line[max(by_line)]  # main's atomic is the later block
    assert len(attempts) == 2
    assert len(set(attempts)) == 2


def test_pause_on_blocked_activity_reports_blocked():
    session = make_session(BLOCKED_SENDER)
    session.launch()
    assert wait_until(lambda: any(r.name == "counter"
                                  for r in session.registry.all_activities()))
    assert wait_until(lambda: any(r.name == "lonely" and r.blocked_on == "channel-send"
                                  for r in session.registry.all_activities()))
    lonely = [r for r in session.registry.all_activities() if r.name == "lonely"][0]
    session.step(lonely.id, "pause")  # accepted, but it cannot suspend while blocked
    state, frames = session.stack_trace(lonely.id)
    assert state == "Blocked"
    assert frames and frames[0].location.line == 3  # inside ch.send
    # pausing a *runnable* activity still works while the sender is blocked
    counter = [r for r in session.registry.all_activities() if r.name == "counter"][0]
    session.step(counter.id, "pause")
    ev = session.next_stop()
    assert ev.activity_id == counter.id
    session.step(counter.id, "stop")  # sender will never unblock; tear down
    dog = Watchdog(session, 20)
    session.wait_exit()
    dog.cancel()


def test_stop_terminates_everything():
    session = make_session(BLOCKED_SENDER)
    record = session.launch()
    time.sleep(0.1)
    session.step(record.id, "stop")
    dog = Watchdog(session, 20)
    session.wait_exit()
    dog.cancel()
    assert session.stop_token.is_set()


def test_variables_while_suspended():
    session = make_session(CONFLICT)
    main_atomic = loc_by_tag(session, "Atomic", 1)
    session.install_breakpoint("before-commit", main_atomic)
    session.launch()
    ev = session.next_stop()
    variables = dict(session.variables(ev.activity_id, 0))
    assert "c" in variables and "t" in variables
    assert variables["t"].startswith("<thread")
    cells = sorted(session.registry.cells.values(), key=lambda c: c.id)
    cells[1].value = 1  # open the gate so bump can finish
    session.remove_breakpoint("before-commit", main_atomic)
    session.step(ev.activity_id, "resume")
    finish(session)
