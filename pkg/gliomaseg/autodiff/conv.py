"""
3D convolution family on channels-last tensors (T, H, W, D, C).

Kernels are (k, k, k, Cin, Cout). The forward pass accumulates one
matmul over channels per kernel offset; the backward pass mirrors it.
"""
import itertools
import math
from typing import List, Tuple

import numpy as np

from ..errors import ShapeMismatch, UnsupportedKernel
from .tensor import Tensor, record

SAME = "same"
VALID = "valid"
KERNEL_SIZES = (1, 2, 3)
STRIDES = (1, 2)


def conv_output_dims(spatial, k: int, stride: int, padding: str) -> Tuple[Tuple[int, ...], List[Tuple[int, int]]]:
    """output extents and (lo, hi) padding per spatial axis"""
    dims = []
    pads = []
    for n in spatial:
        if padding == SAME:
            out = int(math.ceil(n / stride))
            total = max((out - 1) * stride + k - n, 0)
            pads.append((total // 2, total - total // 2))
        elif padding == VALID:
            if n < k:
                raise ShapeMismatch(f"valid conv with kernel {k} on extent {n}")
            out = (n - k) // stride + 1
            pads.append((0, 0))
        else:
            raise UnsupportedKernel(f"padding {padding!r}")
        dims.append(out)
    return tuple(dims), pads


def _window(out_dims, offset, stride):
    return tuple(slice(o, o + stride * (n - 1) + 1, stride) for o, n in zip(offset, out_dims))


def conv3d(x: Tensor, kernel: Tensor, stride: int = 1, padding: str = SAME) -> Tensor:
    """cross-correlation; bias is added separately"""
    if x.ndim != 5 or kernel.ndim != 5:
        raise ShapeMismatch(f"conv3d needs 5D input and kernel, got {x.shape} and {kernel.shape}")
    k = kernel.shape[0]
    if k not in KERNEL_SIZES or kernel.shape[1] != k or kernel.shape[2] != k or stride not in STRIDES:
        raise UnsupportedKernel(f"kernel {kernel.shape[:3]} stride {stride}")
    cin, cout = kernel.shape[3], kernel.shape[4]
    if x.shape[-1] != cin:
        raise ShapeMismatch(f"input has {x.shape[-1]} channels, kernel expects {cin}")

    out_dims, pads = conv_output_dims(x.shape[1:4], k, stride, padding)
    xp = np.pad(x.data, [(0, 0)] + pads + [(0, 0)])
    w = kernel.data
    offsets = list(itertools.product(range(k), repeat=3))

    out = np.zeros((x.shape[0],) + out_dims + (cout,), dtype=np.result_type(x.dtype, w.dtype))
    for off in offsets:
        out += xp[(slice(None),) + _window(out_dims, off, stride)] @ w[off]

    def grad_fn(g):
        gxp = np.zeros_like(xp)
        gw = np.zeros_like(w)
        for off in offsets:
            win = (slice(None),) + _window(out_dims, off, stride)
            gw[off] = np.tensordot(xp[win], g, axes=([0, 1, 2, 3], [0, 1, 2, 3]))
            gxp[win] += g @ w[off].T
        core = (slice(None),) + tuple(slice(lo, lo + n) for (lo, _), n in zip(pads, x.shape[1:4]))
        return gxp[core], gw
    return record(out, (x, kernel), grad_fn)


def conv_transpose3d(x: Tensor, kernel: Tensor) -> Tensor:
    """2x2x2 stride-2 transpose convolution, doubling every spatial extent"""
    if x.ndim != 5 or kernel.ndim != 5 or kernel.shape[:3] != (2, 2, 2):
        raise ShapeMismatch(f"conv_transpose3d needs a 2x2x2 kernel, got {kernel.shape} for {x.shape}")
    if x.shape[-1] != kernel.shape[3]:
        raise ShapeMismatch(f"input has {x.shape[-1]} channels, kernel expects {kernel.shape[3]}")
    t, h, w_, d = x.shape[:4]
    w = kernel.data
    offsets = list(itertools.product(range(2), repeat=3))
    out = np.zeros((t, 2 * h, 2 * w_, 2 * d, w.shape[4]), dtype=np.result_type(x.dtype, w.dtype))
    for a, b, c in offsets:
        out[:, a::2, b::2, c::2] = x.data @ w[a, b, c]

    def grad_fn(g):
        gx = np.zeros_like(x.data)
        gw = np.zeros_like(w)
        for a, b, c in offsets:
            part = g[:, a::2, b::2, c::2]
            gx += part @ w[a, b, c].T
            gw[a, b, c] = np.tensordot(x.data, part, axes=([0, 1, 2, 3], [0, 1, 2, 3]))
        return gx, gw
    return record(out, (x, kernel), grad_fn)


def max_pool3d(x: Tensor) -> Tensor:
    """2x2x2 max pooling with stride 2"""
    t, h, w, d, c = x.shape
    if h % 2 or w % 2 or d % 2:
        raise ShapeMismatch(f"max_pool3d needs even spatial extents, got {x.shape[1:4]}")
    blocks = x.data.reshape(t, h // 2, 2, w // 2, 2, d // 2, 2, c).transpose(0, 1, 3, 5, 7, 2, 4, 6)
    blocks = blocks.reshape(t, h // 2, w // 2, d // 2, c, 8)
    arg = np.argmax(blocks, axis=-1)[..., None]
    out = np.take_along_axis(blocks, arg, axis=-1)[..., 0]

    def grad_fn(g):
        gb = np.zeros(blocks.shape, dtype=g.dtype)
        np.put_along_axis(gb, arg, g[..., None], axis=-1)
        gb = gb.reshape(t, h // 2, w // 2, d // 2, c, 2, 2, 2).transpose(0, 1, 5, 2, 6, 3, 7, 4)
        return (gb.reshape(x.shape),)
    return record(out, (x,), grad_fn)
