"""Shared test plumbing: session runners with watchdogs, location lookup."""

from __future__ import annotations

import threading
from pathlib import Path

from polydbg.lang import SourceUnit
from polydbg.location import SourceLocation
from polydbg.session import DebugSession

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def sample_source(name: str) -> str:
    return (SAMPLES / name).read_text()


def sample_unit(name: str) -> SourceUnit:
    return SourceUnit(name, sample_source(name))


def make_session(src: str, uri: str = "test.pd") -> DebugSession:
    return DebugSession(SourceUnit(uri, src))


def loc_by_tag(session: DebugSession, tag: str, index: int = 0) -> SourceLocation:
    hits = [t.location for t in session.tagged_locations() if tag in t.tags]
    return hits[index]


class Watchdog:
    """Force-stops a session that fails to make progress in time."""

    def __init__(self, session: DebugSession, seconds: float = 30.0):
        self.session = session
        self.fired = False
        self._timer = threading.Timer(seconds, self._fire)
        self._timer.daemon = True
        self._timer.start()

    def _fire(self):
        self.fired = True
        self.session.stop_program()

    def cancel(self):
        self._timer.cancel()


def run_full(src: str, uri: str = "test.pd", timeout: float = 30.0):
    """Run a program with no debugger interaction; returns (session, status)."""
    session = make_session(src, uri)
    dog = Watchdog(session, timeout)
    session.launch()
    status = session.wait_exit()
    dog.cancel()
    assert not dog.fired, "program did not finish in time"
    return session, status


def finish(session: DebugSession, timeout: float = 30.0) -> int:
    dog = Watchdog(session, timeout)
    status = session.wait_exit()
    dog.cancel()
    assert not dog.fired, "program did not finish in time"
    return status
