"""Binary container used for channel datasets and covariance files.

Layout: one UTF-8 JSON header line (newline-terminated) followed by the raw
payload, each complex matrix stored row-major as little-endian float64 pairs
(re, im). The header's ``format`` tag is checked on read, so loads fail fast
on foreign or stale files, and round-trips are bit-exact.
"""

import json

import numpy as np

from .errors import SchemaError


def pack_complex(x: np.ndarray) -> bytes:
    x = np.ascontiguousarray(x, dtype=np.complex128)
    flat = np.empty(x.size * 2, dtype="<f8")
    flat[0::2] = x.real.ravel()
    flat[1::2] = x.imag.ravel()
    return flat.tobytes()


def unpack_complex(buf: bytes, shape) -> np.ndarray:
    n = int(np.prod(shape))
    flat = np.frombuffer(buf, dtype="<f8", count=2 * n)
    return (flat[0::2] + 1j * flat[1::2]).reshape(shape).copy()


def write_container(path, header: dict, payloads) -> None:
    """Write header plus complex-matrix payloads; caller owns shape metadata."""
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8"))
        fh.write(b"\n")
        for x in payloads:
            fh.write(pack_complex(x))


def read_container(path, expected_format: str):
    """Return (header, remaining bytes); raises SchemaError on a bad tag."""
    with open(path, "rb") as fh:
        line = fh.readline()
        try:
            header = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise SchemaError(f"{path}: not a recognizable container header") from exc
        if not isinstance(header, dict) or header.get("format") != expected_format:
            raise SchemaError(
                f"{path}: expected format tag {expected_format!r}, "
                f"got {header.get('format') if isinstance(header, dict) else header!r}"
            )
        return header, fh.read()
