"""
Dense tensors recorded on a reverse-mode tape.

Every op appends its output to the tape of its first taped input, so
tape.nodes is always in topological order. Tensors with no tape are
constants and never receive gradients.
"""
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import NonScalarLoss

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tensor:
    __slots__ = ("data", "tape", "parents", "backward_fn", "name")

    def __init__(self, data, tape: Optional["Tape"] = None, parents: Tuple["Tensor", ...] = (),
                 backward_fn: Optional[BackwardFn] = None, name: str = ""):
        self.data = np.asarray(data)
        self.tape = tape
        self.parents = parents
        self.backward_fn = backward_fn
        self.name = name

    def __repr__(self):
        kind = "param" if not self.parents and self.tape is not None else ("node" if self.tape else "const")
        return f"Tensor({self.name or kind} shape={self.shape} dtype={self.dtype})"

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def tracked(self) -> bool:
        return self.tape is not None

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    # operator sugar, see ops.py
    def __add__(self, other):
        from .ops import add
        return add(self, other)

    def __radd__(self, other):
        from .ops import add
        return add(other, self)

    def __sub__(self, other):
        from .ops import sub
        return sub(self, other)

    def __rsub__(self, other):
        from .ops import sub
        return sub(other, self)

    def __mul__(self, other):
        from .ops import mul
        return mul(self, other)

    def __rmul__(self, other):
        from .ops import mul
        return mul(other, self)

    def __truediv__(self, other):
        from .ops import div
        return div(self, other)

    def __rtruediv__(self, other):
        from .ops import div
        return div(other, self)

    def __neg__(self):
        from .ops import neg
        return neg(self)


class Tape:
    def __init__(self):
        self.nodes: List[Tensor] = []
        self.params: Dict[str, Tensor] = {}

    def __len__(self):
        return len(self.nodes)

    def parameter(self, name: str, value: np.ndarray) -> Tensor:
        if name in self.params:
            raise KeyError(f"parameter {name} is already registered")
        leaf = Tensor(np.asarray(value), tape=self, name=name)
        self.params[name] = leaf
        return leaf


def as_tensor(value, like: Optional[Tensor] = None) -> Tensor:
    if isinstance(value, Tensor):
        return value
    if like is not None:
        return Tensor(np.asarray(value, dtype=like.dtype))
    return Tensor(np.asarray(value))


def record(data: np.ndarray, parents: Sequence[Tensor], backward_fn: BackwardFn) -> Tensor:
    """
    Wrap an op result. backward_fn maps the output gradient to one gradient
    (or None) per parent, each shaped like that parent.
    """
    tape = next((p.tape for p in parents if p.tape is not None), None)
    if tape is None:
        return Tensor(data)
    out = Tensor(data, tape=tape, parents=tuple(parents), backward_fn=backward_fn)
    tape.nodes.append(out)
    return out


def backward(tape: Tape, loss: Tensor) -> Dict[str, np.ndarray]:
    """gradient of a scalar loss for every parameter registered on tape"""
    if loss.data.size != 1:
        raise NonScalarLoss(f"loss has shape {loss.shape}")

    grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(tape.nodes):
        grad = grads.pop(id(node), None)
        if grad is None:
            continue
        for parent, pgrad in zip(node.parents, node.backward_fn(grad)):
            if pgrad is None or parent.tape is None:
                continue
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + pgrad
            else:
                grads[key] = pgrad

    out = {}
    for name, leaf in tape.params.items():
        grad = grads.get(id(leaf))
        out[name] = np.zeros_like(leaf.data) if grad is None else np.asarray(grad, dtype=leaf.dtype).reshape(leaf.shape)
    return out
