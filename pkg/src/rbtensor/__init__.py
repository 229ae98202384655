"""Reduced-biquaternion tensor algebra, ring decomposition, and
low-rank completion."""

from .scalar import E1, E2, ONE, UNIT_I, UNIT_J, UNIT_K, RBScalar
from .matrix import (
    RBMatrix,
    RBSvdResult,
    group_shrink,
    nuclear_norm,
    rb_rank,
    rbsvd,
    svt,
)
from .tensor import (
    IndexMask,
    RBTensor,
    fold_circular,
    fold_classical,
    fold_kmode,
    fold_mode,
    project_mask,
    unfold_circular,
    unfold_classical,
    unfold_kmode,
    unfold_mode,
)
from .ring import TensorRing, TensorRingSVD, tensor_ring_svd
from .completion import (
    CompletionConfig,
    SolveReport,
    TensorRingCompleter,
    solve,
    tv_value,
)
from .imaging import (
    MetricReport,
    decode_image,
    encode_image,
    gen_mask,
    ket_augment,
    ket_restore,
    psnr,
    rse,
)
from .errors import DimensionError, NumericalError

__version__ = "0.1.0"

__all__ = [
    "RBScalar", "RBMatrix", "RBTensor", "RBSvdResult", "IndexMask",
    "TensorRing", "TensorRingSVD", "TensorRingCompleter",
    "CompletionConfig", "SolveReport", "MetricReport",
    "ONE", "UNIT_I", "UNIT_J", "UNIT_K", "E1", "E2",
    "rbsvd", "rb_rank", "nuclear_norm", "svt", "group_shrink",
    "unfold_classical", "fold_classical", "unfold_mode", "fold_mode",
    "unfold_kmode", "fold_kmode", "unfold_circular", "fold_circular",
    "project_mask", "tensor_ring_svd", "solve", "tv_value",
    "encode_image", "decode_image", "ket_augment", "ket_restore",
    "gen_mask", "rse", "psnr",
    "DimensionError", "NumericalError",
]
