from collections import OrderedDict
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from ..errors import LengthMismatch, ShapeMismatch
from .tensor import Tape, Tensor


class ParamSet:
    """Ordered named parameter arrays with a flat-vector view"""

    def __init__(self, arrays: Optional[Dict[str, np.ndarray]] = None):
        self._arrays: "OrderedDict[str, np.ndarray]" = OrderedDict()
        for name, value in (arrays or {}).items():
            self.add(name, value)

    def add(self, name: str, value: np.ndarray) -> np.ndarray:
        if name in self._arrays:
            raise KeyError(f"duplicate parameter name {name}")
        self._arrays[name] = np.array(value, copy=True)
        return self._arrays[name]

    def __getitem__(self, name: str) -> np.ndarray:
        return self._arrays[name]

    def __setitem__(self, name: str, value: np.ndarray):
        if name not in self._arrays:
            raise KeyError(name)
        value = np.asarray(value)
        if value.shape != self._arrays[name].shape:
            raise ShapeMismatch(f"{name}: shape {value.shape} != {self._arrays[name].shape}")
        self._arrays[name] = value.astype(self._arrays[name].dtype)

    def __contains__(self, name) -> bool:
        return name in self._arrays

    def __iter__(self) -> Iterator[str]:
        return iter(self._arrays)

    def __len__(self) -> int:
        return len(self._arrays)

    def items(self):
        return self._arrays.items()

    @property
    def names(self) -> List[str]:
        return list(self._arrays)

    @property
    def shapes(self) -> Dict[str, Tuple[int, ...]]:
        return {k: tuple(v.shape) for k, v in self._arrays.items()}

    @property
    def size(self) -> int:
        return int(sum(v.size for v in self._arrays.values()))

    @property
    def dtype(self):
        for value in self._arrays.values():
            return value.dtype
        return np.dtype(np.float32)

    def flatten(self) -> np.ndarray:
        if not self._arrays:
            return np.zeros(0, dtype=self.dtype)
        return np.concatenate([v.ravel() for v in self._arrays.values()])

    def unflatten(self, flat: np.ndarray) -> Dict[str, np.ndarray]:
        flat = np.asarray(flat)
        if flat.shape != (self.size,):
            raise LengthMismatch(f"flat vector has {flat.size} entries, parameters need {self.size}")
        out = OrderedDict()
        pos = 0
        for name, value in self._arrays.items():
            out[name] = flat[pos:pos + value.size].reshape(value.shape).astype(value.dtype)
            pos += value.size
        return out

    def assign_flat(self, flat: np.ndarray) -> None:
        for name, value in self.unflatten(flat).items():
            self._arrays[name] = value

    def flatten_grads(self, grads: Dict[str, np.ndarray]) -> np.ndarray:
        parts = []
        for name, value in self._arrays.items():
            grad = grads.get(name)
            parts.append(np.zeros(value.size, dtype=value.dtype) if grad is None else np.asarray(grad).ravel())
        if not parts:
            return np.zeros(0, dtype=self.dtype)
        return np.concatenate(parts)

    def bind(self, tape: Tape) -> Dict[str, Tensor]:
        """register every array on tape as a named leaf"""
        return {name: tape.parameter(name, value) for name, value in self._arrays.items()}

    def constants(self) -> Dict[str, Tensor]:
        return {name: Tensor(value, name=name) for name, value in self._arrays.items()}

    def astype(self, dtype) -> "ParamSet":
        return ParamSet({k: v.astype(dtype) for k, v in self._arrays.items()})

    def copy(self) -> "ParamSet":
        return ParamSet(self._arrays)


def he_uniform(rng: np.random.Generator, shape: Tuple[int, ...], dtype=np.float32) -> np.ndarray:
    """He-uniform for (k, k, k, Cin, Cout) kernels; fan-in = k^3 * Cin"""
    fan_in = int(np.prod(shape[:-1]))
    limit = np.sqrt(6.0 / max(fan_in, 1))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)
