"""Self-describing trace files: one JSON header line, then the raw stream.

The header embeds the catalog and the final symbol table so offline
tooling can decode the bytes without a live session.
"""

from __future__ import annotations

import json
from pathlib import Path

from polydbg.protocol.catalog import MetaDataCatalog
from polydbg.protocol.messages import catalog_from_json, catalog_to_json


class TraceFileError(ValueError):
    pass


def write_trace_file(path, catalog: MetaDataCatalog, symbols: dict[int, str],
                     raw: bytes):
    header = {"catalog": catalog_to_json(catalog),
              "symbols": {str(sym): text for sym, text in symbols.items()}}
    with open(path, "wb") as f:
        f.write(json.dumps(header, separators=(",", ":")).encode() + b"\n")
        f.write(raw)


def read_trace_file(path) -> tuple[MetaDataCatalog, dict[int, str], bytes]:
    data = Path(path).read_bytes()
    newline = data.find(b"\n")
    if newline < 0:
        raise TraceFileError("missing header line")
    try:
        header = json.loads(data[:newline].decode())
        catalog = catalog_from_json(header["catalog"])
        symbols = {int(sym): text for sym, text in header["symbols"].items()}
    except (ValueError, KeyError) as e:
        raise TraceFileError(f"bad header: {e}") from None
    return catalog, symbols, data[newline + 1:]
