"""Reader/writer for the UBF array container used to exchange data with the
beamforming toolkit.

This is an independent implementation of the interchange format, kept here so
the training code has no import-level coupling to the other package. Layout
(little-endian): magic b"UBF1", u16 version, u16 dtype code (1 = float32),
u32 ndim, ndim u64 dims, u32 metadata byte length, UTF-8 "key=value\\n"
metadata lines, then the row-major float32 payload.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from .errors import BadMagic, TruncatedPayload, UnsupportedDtype

MAGIC = b"UBF1"
VERSION = 1
DTYPE_F32 = 1


def ubf_write(path, array, metadata=None) -> None:
    arr = np.ascontiguousarray(array, dtype="<f4")
    if not np.all(np.isfinite(arr)):
        raise ValueError("UBF payload must be finite")
    lines = []
    for k, v in (metadata or {}).items():
        k, v = str(k), str(v)
        if "=" in k or "\n" in k or "\n" in v:
            raise ValueError(f"metadata key/value not representable: {k!r}")
        lines.append(f"{k}={v}\n")
    mblob = "".join(lines).encode("utf-8")

    header = bytearray()
    header += MAGIC
    header += struct.pack("<HHI", VERSION, DTYPE_F32, arr.ndim)
    header += struct.pack(f"<{arr.ndim}Q", *arr.shape)
    header += struct.pack("<I", len(mblob))
    header += mblob

    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".ubf-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(bytes(header))
            fh.write(arr.tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def ubf_read(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise BadMagic(f"{path}: not a UBF file")
    off = 4
    version, dtype, ndim = struct.unpack_from("<HHI", blob, off)
    off += 8
    if dtype != DTYPE_F32:
        raise UnsupportedDtype(f"{path}: dtype code {dtype} not supported")
    dims = struct.unpack_from(f"<{ndim}Q", blob, off)
    off += 8 * ndim
    (mlen,) = struct.unpack_from("<I", blob, off)
    off += 4
    meta_blob = blob[off:off + mlen]
    if len(meta_blob) != mlen:
        raise TruncatedPayload(f"{path}: metadata truncated")
    off += mlen
    metadata = {}
    for line in meta_blob.decode("utf-8").splitlines():
        if line:
            k, _, v = line.partition("=")
            metadata[k] = v
    count = 1
    for d in dims:
        count *= d
    payload = blob[off:]
    if len(payload) != count * 4:
        raise TruncatedPayload(
            f"{path}: payload is {len(payload)} bytes, expected {count * 4}"
        )
    return np.frombuffer(payload, dtype="<f4").reshape(dims), metadata
