"""Per-activity trace buffers.

Events are encoded when emitted (no locks shared between activities on
the hot path beyond one buffer lock each) and drained by a flusher that
prefixes each activity's chunk with an activity-context record.
"""

from __future__ import annotations

import threading

from polydbg.protocol import tracebin
from polydbg.protocol.tracebin import TraceCodec, TraceEvent


class TraceRecorder:
    def __init__(self, codec: TraceCodec):
        self.codec = codec
        self._lock = threading.Lock()
        self._buffers: dict[int, bytearray] = {}

    def emit(self, activity_id: int, event: TraceEvent):
        data = self.codec.encode(event)
        with self._lock:
            self._buffers.setdefault(activity_id, bytearray()).extend(data)

    def drain(self) -> bytes:
        """All buffered bytes, each activity's chunk behind a context record."""
        with self._lock:
            chunks: list[tuple[int, bytearray]] = [
                (aid, buf) for aid, buf in self._buffers.items() if buf]
            for aid, _ in chunks:
                self._buffers[aid] = bytearray()
        out = bytearray()
        for aid, buf in chunks:
            out.extend(self.codec.encode(tracebin.ActivityContext(aid)))
            out.extend(buf)
        return bytes(out)
