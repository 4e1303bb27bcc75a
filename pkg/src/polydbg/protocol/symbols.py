"""Interned strings with 16-bit ids, sent once over the control channel."""

from __future__ import annotations

import threading


class SymbolTable:
    """Monotonically growing string -> id map. Id 0 is the empty string.

    Ids are never reassigned. `drain_new` supports incremental Symbols
    messages: it returns every (id, text) pair added since the last drain.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._by_text: dict[str, int] = {"": 0}
        self._by_id: dict[int, str] = {0: ""}
        self._undrained: list[int] = [0]

    def intern(self, text: str) -> int:
        with self._lock:
            sym = self._by_text.get(text)
            if sym is None:
                sym = len(self._by_id)
                if sym > 0xFFFF:
                    raise OverflowError("symbol table limited to 16-bit ids")
                self._by_text[text] = sym
                self._by_id[sym] = text
                self._undrained.append(sym)
            return sym

    def lookup(self, sym: int) -> str:
        with self._lock:
            return self._by_id[sym]

    def drain_new(self) -> list[tuple[int, str]]:
        with self._lock:
            out = [(sym, self._by_id[sym]) for sym in self._undrained]
            self._undrained = []
            return out

    def snapshot(self) -> dict[int, str]:
        with self._lock:
            return dict(self._by_id)
