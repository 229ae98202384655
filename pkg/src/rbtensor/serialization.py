"""Binary file formats.

RBT1 tensor blob: magic ``RBT1``, little-endian u32 order N, u64
dims[N], then channel 1 as interleaved (re, im) f64 pairs in linear
order (first index fastest), then channel 2 likewise.  Round trips are
bit exact.

RBM1 mask blob: magic ``RBM1``, u32 order, u64 dims, i64 seed, f64
sampling rate, then one byte (0/1) per entry in the same linear order.

A ring decomposition is stored as a directory of per-core RBT1 blobs
plus a JSON sidecar with the ranks, dims, and tolerance.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import DimensionError
from .ring import TensorRing
from .tensor import IndexMask, RBTensor

_TENSOR_MAGIC = b"RBT1"
_MASK_MAGIC = b"RBM1"


def tensor_to_bytes(t: RBTensor) -> bytes:
    head = _TENSOR_MAGIC + struct.pack("<I", t.order)
    head += struct.pack(f"<{t.order}Q", *t.dims)
    body = b"".join(
        np.ascontiguousarray(ch.ravel(order="F"), dtype="<c16").tobytes()
        for ch in (t.c1, t.c2)
    )
    return head + body


def tensor_from_bytes(data: bytes) -> RBTensor:
    if data[:4] != _TENSOR_MAGIC:
        raise DimensionError("not a tensor blob: bad magic")
    (order,) = struct.unpack_from("<I", data, 4)
    dims = struct.unpack_from(f"<{order}Q", data, 8)
    offset = 8 + 8 * order
    size = int(np.prod(dims))
    chans = []
    for _ in range(2):
        flat = np.frombuffer(data, dtype="<c16", count=size, offset=offset)
        chans.append(flat.astype(np.complex128).reshape(dims, order="F"))
        offset += size * 16
    return RBTensor(chans[0], chans[1])


def write_tensor(path, t: RBTensor):
    Path(path).write_bytes(tensor_to_bytes(t))


def read_tensor(path) -> RBTensor:
    return tensor_from_bytes(Path(path).read_bytes())


def write_mask(path, mask: IndexMask, seed=0, sr=None):
    if sr is None:
        sr = mask.sampling_rate
    head = _MASK_MAGIC + struct.pack("<I", len(mask.dims))
    head += struct.pack(f"<{len(mask.dims)}Q", *mask.dims)
    head += struct.pack("<qd", int(seed), float(sr))
    body = np.ascontiguousarray(
        mask.observed.ravel(order="F"), dtype=np.uint8
    ).tobytes()
    Path(path).write_bytes(head + body)


def read_mask(path):
    """Returns (mask, seed, sr)."""
    data = Path(path).read_bytes()
    if data[:4] != _MASK_MAGIC:
        raise DimensionError("not a mask blob: bad magic")
    (order,) = struct.unpack_from("<I", data, 4)
    dims = struct.unpack_from(f"<{order}Q", data, 8)
    offset = 8 + 8 * order
    seed, sr = struct.unpack_from("<qd", data, offset)
    offset += 16
    size = int(np.prod(dims))
    flat = np.frombuffer(data, dtype=np.uint8, count=size, offset=offset)
    return IndexMask(flat.astype(bool).reshape(dims, order="F")), seed, sr


def save_ring(directory, ring: TensorRing, eps=None):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for k, core in enumerate(ring.cores):
        write_tensor(directory / f"core_{k:02d}.rbt", core)
    meta = {
        "ranks": list(ring.ranks),
        "dims": list(ring.dims),
        "eps": eps,
        "n_cores": ring.n_cores,
    }
    (directory / "ring.json").write_text(json.dumps(meta, sort_keys=True))


def load_ring(directory) -> TensorRing:
    directory = Path(directory)
    meta = json.loads((directory / "ring.json").read_text())
    cores = [
        read_tensor(directory / f"core_{k:02d}.rbt")
        for k in range(meta["n_cores"])
    ]
    return TensorRing(cores)
