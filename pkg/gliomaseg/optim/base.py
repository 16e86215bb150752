"""
Optimizers are deterministic state machines over one flat parameter
vector. update() returns the additive step so wrappers can compose them;
step() validates lengths and applies it.
"""
import abc
from typing import Any, Dict, Optional

import numpy as np

from ..autodiff import ParamSet
from ..errors import LengthMismatch

StateDict = Dict[str, Any]


class Optimizer(abc.ABC):
    name: str = "abstract"

    def __init__(self, lr: float):
        self.lr = float(lr)
        self.size: Optional[int] = None

    def _check(self, params: np.ndarray, grads: np.ndarray) -> None:
        if params.ndim != 1 or grads.shape != params.shape:
            raise LengthMismatch(f"{self.name}: params {params.shape} vs grads {grads.shape}")
        if self.size is None:
            self.reset(params)
        elif params.size != self.size:
            raise LengthMismatch(f"{self.name}: state holds {self.size} parameters, got {params.size}")

    def reset(self, params: np.ndarray) -> None:
        self.size = params.size

    @abc.abstractmethod
    def update(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        pass

    def step(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        params = np.asarray(params)
        grads = np.asarray(grads, dtype=params.dtype)
        self._check(params, grads)
        return params + self.update(params, grads)

    def step_params(self, params: ParamSet, grads: Dict[str, np.ndarray]) -> None:
        params.assign_flat(self.step(params.flatten(), params.flatten_grads(grads)))

    def state_dict(self) -> StateDict:
        return {"scalars": {"name": self.name, "lr": self.lr, "size": self.size}, "arrays": {}}

    def load_state_dict(self, state: StateDict) -> None:
        scalars = state.get("scalars", {})
        self.lr = float(scalars.get("lr", self.lr))
        self.size = scalars.get("size")


class Sgd(Optimizer):
    name = "SGD"

    def update(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        return -self.lr * grads
