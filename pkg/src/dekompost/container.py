"""The ``DKMP`` model container shared by the labeler and the classifiers.

Layout (little-endian)::

    b"DKMP"  u16 version  u32 manifest_length  manifest (UTF-8)
    float32 arrays, row-major, in manifest block order
    u32 CRC-32 of manifest + arrays

The manifest is line oriented: ``kind=<name>``, a ``[config]`` section of
``key=value`` lines, optional list sections whose lines are JSON strings or
arrays, and a closing ``[blocks]`` section of ``name dim1 dim2 ...`` lines.
"""

from __future__ import annotations

import json
import re
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"DKMP"
_SECTION = re.compile(r"\[[A-Za-z_][\w.]*\]")
VERSION = 1


class ModelFormatError(ValueError):
    pass


@dataclass
class Container:
    kind: str
    config: dict[str, str] = field(default_factory=dict)
    lists: dict[str, list] = field(default_factory=dict)
    blocks: dict[str, np.ndarray] = field(default_factory=dict)


def _manifest(c: Container) -> str:
    lines = [f"kind={c.kind}", "[config]"]
    for key, value in c.config.items():
        if "\n" in key or "=" in key or "\n" in str(value):
            raise ModelFormatError(f"config entry {key!r} cannot be written")
        lines.append(f"{key}={value}")
    for name, items in c.lists.items():
        lines.append(f"[{name}]")
        lines.extend(json.dumps(item, ensure_ascii=False) for item in items)
    lines.append("[blocks]")
    for name, arr in c.blocks.items():
        lines.append(" ".join([name, *map(str, arr.shape)]) if arr.ndim else f"{name}")
    return "\n".join(lines) + "\n"


def dumps(c: Container) -> bytes:
    manifest = _manifest(c).encode("utf-8")
    payload = b"".join(np.ascontiguousarray(a, dtype="<f4").tobytes() for a in c.blocks.values())
    body = manifest + payload
    return MAGIC + struct.pack("<HI", VERSION, len(manifest)) + body + struct.pack("<I", zlib.crc32(body))


def write(c: Container, path: str | Path) -> None:
    Path(path).write_bytes(dumps(c))


def loads(data: bytes) -> Container:
    if len(data) < 14 or data[:4] != MAGIC:
        raise ModelFormatError("bad model header")
    version, mlen = struct.unpack("<HI", data[4:10])
    if version != VERSION:
        raise ModelFormatError(f"unsupported model format version {version} (expected {VERSION})")
    body = data[10:-4]
    (crc,) = struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc or mlen > len(body):
        raise ModelFormatError("model checksum mismatch")
    manifest = body[:mlen].decode("utf-8")
    payload = body[mlen:]

    lines = manifest.split("\n")[:-1]
    if not lines or not lines[0].startswith("kind="):
        raise ModelFormatError("bad model manifest")
    c = Container(kind=lines[0][5:])
    section = None
    shapes: list[tuple[str, tuple[int, ...]]] = []
    for line in lines[1:]:
        if _SECTION.fullmatch(line):
            section = line[1:-1]
            if section not in ("config", "blocks"):
                c.lists[section] = []
            continue
        if section == "config":
            key, _, value = line.partition("=")
            c.config[key] = value
        elif section == "blocks":
            name, *dims = line.split(" ")
            shapes.append((name, tuple(int(d) for d in dims)))
        elif section is not None:
            c.lists[section].append(json.loads(line))
    offset = 0
    for name, shape in shapes:
        count = int(np.prod(shape)) if shape else 1
        nbytes = 4 * count
        if offset + nbytes > len(payload):
            raise ModelFormatError("truncated model payload")
        arr = np.frombuffer(payload, dtype="<f4", count=count, offset=offset).reshape(shape)
        c.blocks[name] = arr.astype(np.float64)
        offset += nbytes
    if offset != len(payload):
        raise ModelFormatError("trailing bytes in model payload")
    return c


def read(path: str | Path) -> Container:
    return loads(Path(path).read_bytes())
