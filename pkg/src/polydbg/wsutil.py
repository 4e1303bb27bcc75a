"""Minimal WebSocket (RFC 6455) support: enough for one debugger client.

Server side accepts upgrades and routes by request path; client side is
used by tests and tooling. Text, binary, ping/pong, and close frames are
supported; fragmentation and extensions are not (peers here never send
fragmented frames).
"""

from __future__ import annotations

import base64
import hashlib
import os
import socket
import struct
import threading

_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_TEXT = 0x1
OP_BINARY = 0x2
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


class WebSocketError(Exception):
    pass


def _accept_key(key: str) -> str:
    digest = hashlib.sha1((key + _GUID).encode()).digest()
    return base64.b64encode(digest).decode()


def _read_exact(sock: socket.socket, n: int) -> bytes:
    data = bytearray()
    while len(data) < n:
        chunk = sock.recv(n - len(data))
        if not chunk:
            raise WebSocketError("connection closed")
        data.extend(chunk)
    return bytes(data)


def _read_http_head(sock: socket.socket) -> tuple[str, dict[str, str], bytes]:
    data = bytearray()
    while b"\r\n\r\n" not in data:
        chunk = sock.recv(4096)
        if not chunk:
            raise WebSocketError("connection closed during handshake")
        data.extend(chunk)
        if len(data) > 65536:
            raise WebSocketError("oversized handshake")
    head, leftover = bytes(data).split(b"\r\n\r\n", 1)
    lines = head.decode("latin-1").split("\r\n")
    headers = {}
    for line in lines[1:]:
        if ":" in line:
            name, value = line.split(":", 1)
            headers[name.strip().lower()] = value.strip()
    return lines[0], headers, leftover


class WebSocketConnection:
    """One established connection; safe for one reader + many writers."""

    def __init__(self, sock: socket.socket, mask_outgoing: bool,
                 pending: bytes = b""):
        self._sock = sock
        self._mask = mask_outgoing
        self._pending = bytearray(pending)  # bytes read past the handshake
        self._write_lock = threading.Lock()
        self.closed = False

    def _read(self, n: int) -> bytes:
        if self._pending:
            take = bytes(self._pending[:n])
            del self._pending[:len(take)]
            if len(take) == n:
                return take
            return take + _read_exact(self._sock, n - len(take))
        return _read_exact(self._sock, n)

    def _send_frame(self, opcode: int, payload: bytes):
        head = bytearray([0x80 | opcode])
        mask_bit = 0x80 if self._mask else 0
        n = len(payload)
        if n < 126:
            head.append(mask_bit | n)
        elif n < 65536:
            head.append(mask_bit | 126)
            head.extend(struct.pack(">H", n))
        else:
            head.append(mask_bit | 127)
            head.extend(struct.pack(">Q", n))
        if self._mask:
            key = os.urandom(4)
            head.extend(key)
            payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        with self._write_lock:
            if self.closed:
                raise WebSocketError("connection closed")
            try:
                self._sock.sendall(bytes(head) + payload)
            except OSError as e:
                self.closed = True
                raise WebSocketError(str(e)) from None

    def send_text(self, text: str):
        self._send_frame(OP_TEXT, text.encode())

    def send_binary(self, data: bytes):
        self._send_frame(OP_BINARY, data)

    def close(self):
        if not self.closed:
            try:
                self._send_frame(OP_CLOSE, b"")
            except WebSocketError:
                pass
            self.closed = True
            try:
                self._sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            self._sock.close()

    def recv(self) -> tuple[int, bytes] | None:
        """Next text/binary message, or None when the peer closed."""
        while True:
            try:
                b0, b1 = self._read(2)
            except (WebSocketError, OSError):
                return None
            opcode = b0 & 0x0F
            if not b0 & 0x80:
                raise WebSocketError("fragmented frames not supported")
            masked = bool(b1 & 0x80)
            length = b1 & 0x7F
            if length == 126:
                length = struct.unpack(">H", self._read(2))[0]
            elif length == 127:
                length = struct.unpack(">Q", self._read(8))[0]
            key = self._read(4) if masked else None
            payload = self._read(length) if length else b""
            if key:
                payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
            if opcode == OP_PING:
                self._send_frame(OP_PONG, payload)
                continue
            if opcode == OP_PONG:
                continue
            if opcode == OP_CLOSE:
                self.closed = True
                return None
            return opcode, payload


def read_upgrade_request(sock: socket.socket) -> tuple[str, dict[str, str]]:
    """Read and validate the upgrade request; returns (path, headers)."""
    request, headers, _ = _read_http_head(sock)
    parts = request.split()
    if len(parts) < 2 or parts[0] != "GET":
        raise WebSocketError(f"bad request line: {request}")
    if headers.get("upgrade", "").lower() != "websocket" or "sec-websocket-key" not in headers:
        raise WebSocketError("not a websocket upgrade")
    return parts[1], headers


def complete_upgrade(sock: socket.socket, headers: dict[str, str]) -> WebSocketConnection:
    subprotocol = None
    offered = headers.get("sec-websocket-protocol", "")
    if offered:
        subprotocol = offered.split(",")[0].strip()
    response = [
        "HTTP/1.1 101 Switching Protocols",
        "Upgrade: websocket",
        "Connection: Upgrade",
        f"Sec-WebSocket-Accept: {_accept_key(headers['sec-websocket-key'])}",
    ]
    if subprotocol:
        response.append(f"Sec-WebSocket-Protocol: {subprotocol}")
    sock.sendall(("\r\n".join(response) + "\r\n\r\n").encode())
    return WebSocketConnection(sock, mask_outgoing=False)


def refuse_connection(sock: socket.socket, reason: str):
    try:
        body = reason.encode()
        sock.sendall(b"HTTP/1.1 409 Conflict\r\nContent-Length: "
                     + str(len(body)).encode() + b"\r\n\r\n" + body)
    except OSError:
        pass
    finally:
        sock.close()


def connect_websocket(host: str, port: int, path: str,
                      subprotocol: str | None = None,
                      timeout: float = 10.0) -> WebSocketConnection:
    sock = socket.create_connection((host, port), timeout=timeout)
    sock.settimeout(timeout)
    key = base64.b64encode(os.urandom(16)).decode()
    request = [
        f"GET {path} HTTP/1.1",
        f"Host: {host}:{port}",
        "Upgrade: websocket",
        "Connection: Upgrade",
        f"Sec-WebSocket-Key: {key}",
        "Sec-WebSocket-Version: 13",
    ]
    if subprotocol:
        request.append(f"Sec-WebSocket-Protocol: {subprotocol}")
    sock.sendall(("\r\n".join(request) + "\r\n\r\n").encode())
    status, headers, leftover = _read_http_head(sock)
    if " 101 " not in status + " ":
        sock.close()
        raise WebSocketError(f"upgrade refused: {status}")
    if headers.get("sec-websocket-accept") != _accept_key(key):
        sock.close()
        raise WebSocketError("bad accept key")
    sock.settimeout(None)
    return WebSocketConnection(sock, mask_outgoing=True, pending=leftover)
