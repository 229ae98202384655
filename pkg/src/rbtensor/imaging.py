"""Color image and video conversion, quadtree reindexing, sampling masks,
and reconstruction quality metrics.

A pixel (R, G, B) is encoded as the pure-imaginary scalar
R*i + G*j + B*k with channels scaled to [0, 1], so a whole image becomes
an order-2 split-channel tensor and the color axis disappears into the
algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from PIL import Image

from ._validation import check_same_dims
from .errors import DimensionError
from .tensor import IndexMask, RBTensor


def load_image(path):
    """Read an 8-bit RGB PNG as a (H, W, 3) uint8 array."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def save_image(path, arr):
    Image.fromarray(np.asarray(arr, dtype=np.uint8), mode="RGB").save(path)


def encode_image(arr) -> RBTensor:
    """Map a (H, W, 3) uint8 or [0, 1] float image to an H x W tensor."""
    arr = np.asarray(arr)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise DimensionError(f"expected (H, W, 3) image, got shape {arr.shape}")
    if arr.dtype == np.uint8:
        arr = arr.astype(float) / 255.0
    zeros = np.zeros(arr.shape[:2])
    return RBTensor.from_components(zeros, arr[..., 0], arr[..., 1], arr[..., 2])


def decode_image(t: RBTensor):
    """Clamp the three imaginary components to [0, 1] and quantize to
    8 bits; the real part is discarded."""
    if t.order != 2:
        raise DimensionError(f"expected an order-2 tensor, got order {t.order}")
    _, r, g, b = t.components
    rgb = np.stack([r, g, b], axis=-1)
    return np.rint(np.clip(rgb, 0.0, 1.0) * 255.0).astype(np.uint8)


def encode_frames(frames) -> RBTensor:
    """Stack a list of same-size images into an H x W x F tensor."""
    encoded = [encode_image(f) for f in frames]
    if len({t.dims for t in encoded}) != 1:
        raise DimensionError("frames must share one size")
    return RBTensor(
        np.stack([t.c1 for t in encoded], axis=-1),
        np.stack([t.c2 for t in encoded], axis=-1),
    )


def decode_frames(t: RBTensor):
    if t.order != 3:
        raise DimensionError(f"expected an order-3 frame stack, got {t.order}")
    return [decode_image(t[:, :, f]) for f in range(t.dims[2])]


def ket_augment(t: RBTensor) -> RBTensor:
    """Quadtree-reindex the first two modes (equal powers of two) into
    n modes of size 4; any trailing modes pass through unchanged.

    Pixel (r, c) with 0-based binary digits r_l, c_l maps to the
    multi-index whose l-th entry is r_l + 2*c_l; the map is a pure index
    bijection, so all norms are preserved exactly.
    """
    if t.order < 2:
        raise DimensionError("need at least two leading modes")
    h, w = t.dims[0], t.dims[1]
    if h != w or h < 2 or (h & (h - 1)) != 0:
        raise DimensionError(f"leading modes must be equal powers of two, got {h}x{w}")
    levels = h.bit_length() - 1
    trailing = t.dims[2:]

    def reindex(a):
        a = a.reshape((2,) * levels + (2,) * levels + trailing, order="F")
        perm = []
        for l in range(levels):
            perm += [l, levels + l]
        perm += list(range(2 * levels, 2 * levels + len(trailing)))
        return a.transpose(perm).reshape((4,) * levels + trailing, order="F")

    return RBTensor(reindex(t.c1), reindex(t.c2))


def ket_restore(t: RBTensor, levels=None) -> RBTensor:
    """Inverse of :func:`ket_augment`.

    ``levels`` is the number of leading size-4 modes to collapse; when
    omitted, every mode must have size 4 and all are collapsed.
    """
    if levels is None:
        if any(s != 4 for s in t.dims):
            raise DimensionError(
                "levels is required when trailing modes are present"
            )
        levels = t.order
    if levels < 1 or levels > t.order or any(s != 4 for s in t.dims[:levels]):
        raise DimensionError(f"first {levels} modes of {t.dims} must have size 4")
    trailing = t.dims[levels:]
    side = 2**levels

    def reindex(a):
        a = a.reshape((2, 2) * levels + trailing, order="F")
        perm = [2 * l for l in range(levels)]
        perm += [2 * l + 1 for l in range(levels)]
        perm += list(range(2 * levels, 2 * levels + len(trailing)))
        return a.transpose(perm).reshape((side, side) + trailing, order="F")

    return RBTensor(reindex(t.c1), reindex(t.c2))


def gen_mask(dims, sr, seed) -> IndexMask:
    """Uniform sampling mask with exactly round(sr * total) observed
    entries, drawn without replacement from a seeded generator."""
    if not 0 < sr <= 1:
        raise ValueError(f"sampling rate must be in (0, 1], got {sr}")
    dims = tuple(int(v) for v in dims)
    total = math.prod(dims)
    count = int(round(sr * total))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(total, size=count, replace=False)
    flat = np.zeros(total, dtype=bool)
    flat[chosen] = True
    return IndexMask(flat.reshape(dims, order="F"))


def rse(x_hat: RBTensor, x: RBTensor) -> float:
    """Relative error ||x_hat - x||_F / ||x||_F."""
    check_same_dims(x_hat, x, "metric inputs")
    ref = x.frobenius()
    if ref == 0:
        raise ValueError("reference tensor has zero norm")
    return (x_hat - x).frobenius() / ref


def psnr(x_hat: RBTensor, x: RBTensor, max_val=1.0, components=None) -> float:
    """Peak signal-to-noise ratio 10*log10(max^2 / mse) in dB.

    ``components`` selects which real components carry the signal: 3
    restricts the error to the imaginary (color) planes, 4 uses the full
    componentwise error.  The default infers 3 when both tensors have a
    structurally zero real part (image-coded data), else 4.  An exact
    match returns +inf.
    """
    check_same_dims(x_hat, x, "metric inputs")
    if components is None:
        components = 3 if _real_part_zero(x_hat) and _real_part_zero(x) else 4
    if components not in (3, 4):
        raise ValueError(f"components must be 3 or 4, got {components}")
    diff = x_hat - x
    if components == 3:
        _, db, dc, dd = diff.components
        err_sq = float(np.sum(db**2) + np.sum(dc**2) + np.sum(dd**2))
    else:
        err_sq = diff.frobenius() ** 2
    if err_sq == 0.0:
        return float("inf")
    mse = err_sq / (components * x.size)
    return float(10.0 * np.log10(max_val**2 / mse))


def _real_part_zero(t):
    return not np.any((t.c1 + t.c2).real)


@dataclass
class MetricReport:
    psnr: float
    rse: float
    storage_cost: int | None = None
    compression_ratio: float | None = None
    psnr_definition: str = "10*log10(max^2/mse), mse = ||dF||^2/components"

    def to_dict(self):
        out = {"psnr": self.psnr, "rse": self.rse,
               "psnr_definition": self.psnr_definition}
        if self.storage_cost is not None:
            out["storage_cost"] = self.storage_cost
        if self.compression_ratio is not None:
            out["compression_ratio"] = self.compression_ratio
        return out
