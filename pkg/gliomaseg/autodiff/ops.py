"""Elementwise, reduction and channel ops"""
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import DomainError, ShapeMismatch
from .tensor import Tensor, as_tensor, record

LOG_EPS = 1e-12
Axes = Optional[Union[int, Sequence[int]]]


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """sum grad down to shape, undoing numpy broadcasting"""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, n in enumerate(shape):
        if n == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _pair(a, b) -> Tuple[Tensor, Tensor]:
    if isinstance(a, Tensor):
        return a, as_tensor(b, like=a)
    b = as_tensor(b)
    return as_tensor(a, like=b), b


def _check_broadcast(a: Tensor, b: Tensor):
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as err:
        raise ShapeMismatch(f"cannot broadcast {a.shape} with {b.shape}") from err


def add(a, b) -> Tensor:
    a, b = _pair(a, b)
    _check_broadcast(a, b)
    return record(a.data + b.data, (a, b),
                  lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def sub(a, b) -> Tensor:
    a, b = _pair(a, b)
    _check_broadcast(a, b)
    return record(a.data - b.data, (a, b),
                  lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)))


def mul(a, b) -> Tensor:
    a, b = _pair(a, b)
    _check_broadcast(a, b)
    return record(a.data * b.data, (a, b),
                  lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)))


def div(a, b) -> Tensor:
    a, b = _pair(a, b)
    _check_broadcast(a, b)
    out = a.data / b.data
    return record(out, (a, b),
                  lambda g: (_unbroadcast(g / b.data, a.shape), _unbroadcast(-g * out / b.data, b.shape)))


def neg(x: Tensor) -> Tensor:
    return record(-x.data, (x,), lambda g: (-g,))


def scale(x: Tensor, factor: float) -> Tensor:
    factor = x.dtype.type(factor)
    return record(x.data * factor, (x,), lambda g: (g * factor,))


def exp(x: Tensor) -> Tensor:
    out = np.exp(x.data)
    return record(out, (x,), lambda g: (g * out,))


def log(x: Tensor) -> Tensor:
    """natural log with the argument clamped to at least 1e-12"""
    if np.any(np.isnan(x.data)):
        raise DomainError("log of NaN")
    eps = x.dtype.type(LOG_EPS)
    clamped = np.maximum(x.data, eps)
    if np.any(clamped <= 0):
        raise DomainError("log of a non-positive value")
    live = x.data > eps
    return record(np.log(clamped), (x,), lambda g: (np.where(live, g / clamped, 0),))


def maximum_const(x: Tensor, value: float) -> Tensor:
    value = x.dtype.type(value)
    live = x.data > value
    return record(np.where(live, x.data, value), (x,), lambda g: (np.where(live, g, 0),))


def clip(x: Tensor, lo: float, hi: float) -> Tensor:
    live = (x.data >= lo) & (x.data <= hi)
    out = np.clip(x.data, x.dtype.type(lo), x.dtype.type(hi))
    return record(out, (x,), lambda g: (np.where(live, g, 0),))


def log_cosh(x: Tensor) -> Tensor:
    """log(cosh(x)) without overflow"""
    ax = np.abs(x.data)
    out = ax + np.log1p(np.exp(-2.0 * ax)) - np.log(2.0).astype(x.dtype)
    return record(out.astype(x.dtype), (x,), lambda g: (g * np.tanh(x.data),))


def _norm_axes(axes: Axes, ndim: int) -> Tuple[int, ...]:
    if axes is None:
        return tuple(range(ndim))
    if isinstance(axes, int):
        axes = (axes,)
    return tuple(sorted(a % ndim for a in axes))


def reduce_sum(x: Tensor, axes: Axes = None, keepdims: bool = False) -> Tensor:
    axes = _norm_axes(axes, x.ndim)
    out = x.data.sum(axis=axes, keepdims=keepdims)
    kept = tuple(1 if i in axes else n for i, n in enumerate(x.shape))

    def grad_fn(g):
        return (np.broadcast_to(np.reshape(g, kept), x.shape).copy(),)
    return record(out, (x,), grad_fn)


def reduce_mean(x: Tensor, axes: Axes = None, keepdims: bool = False) -> Tensor:
    axes = _norm_axes(axes, x.ndim)
    count = int(np.prod([x.shape[a] for a in axes])) if axes else 1
    return scale(reduce_sum(x, axes, keepdims), 1.0 / count)


def concat_channels(*tensors: Tensor) -> Tensor:
    """join along the last axis; every other extent must agree"""
    if not tensors:
        raise ShapeMismatch("nothing to concatenate")
    head = tensors[0].shape[:-1]
    for t in tensors[1:]:
        if t.shape[:-1] != head:
            raise ShapeMismatch(f"concat of {tensors[0].shape} and {t.shape}")
    splits = np.cumsum([t.shape[-1] for t in tensors])[:-1]
    out = np.concatenate([t.data for t in tensors], axis=-1)
    return record(out, tensors, lambda g: tuple(np.split(g, splits, axis=-1)))


def broadcast_channels(vec: Tensor, like) -> Tensor:
    """repeat a C-vector over every position of a (..., C) shape"""
    shape = like.shape if hasattr(like, "shape") else tuple(like)
    if vec.ndim != 1 or vec.shape[0] != shape[-1]:
        raise ShapeMismatch(f"cannot broadcast {vec.shape} over {shape}")
    out = np.broadcast_to(vec.data, shape).copy()
    lead = tuple(range(len(shape) - 1))
    return record(out, (vec,), lambda g: (g.sum(axis=lead),))


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    try:
        out = x.data.reshape(shape)
    except ValueError as err:
        raise ShapeMismatch(f"cannot reshape {x.shape} to {tuple(shape)}") from err
    return record(out, (x,), lambda g: (g.reshape(x.shape),))


def take_channels(x: Tensor, channels: Sequence[int]) -> Tensor:
    index = list(channels)

    def grad_fn(g):
        full = np.zeros_like(x.data)
        for j, c in enumerate(index):
            full[..., c] += g[..., j]
        return (full,)
    return record(x.data[..., index], (x,), grad_fn)
