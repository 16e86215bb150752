import numpy as np

from ..errors import ConfigError
from .base import Optimizer, StateDict

SYNC_PERIOD = 5
SLOW_STEP = 0.5


class Lookahead(Optimizer):
    """
    Fast weights follow the inner optimizer; every k calls the slow weights
    move phi <- (1 - alpha) phi + alpha theta and the fast weights restart
    from phi.
    """

    def __init__(self, inner: Optimizer, k: int = SYNC_PERIOD, alpha: float = SLOW_STEP):
        if k < 1 or not 0.0 <= alpha <= 1.0:
            raise ConfigError(f"lookahead needs k >= 1 and 0 <= alpha <= 1, got k={k} alpha={alpha}")
        super(Lookahead, self).__init__(inner.lr)
        self.inner = inner
        self.k = int(k)
        self.alpha = float(alpha)
        self.counter = 0
        self.slow = None

    @property
    def name(self) -> str:
        return "R" if self.inner.name == "RA" else f"{self.inner.name}+LH"

    def reset(self, params: np.ndarray) -> None:
        super(Lookahead, self).reset(params)
        self.counter = 0
        self.slow = np.array(params, copy=True)

    def update(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        return self.step(params, grads) - params

    def step(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        params = np.asarray(params)
        grads = np.asarray(grads, dtype=params.dtype)
        self._check(params, grads)
        theta = self.inner.step(params, grads)
        self.counter += 1
        if self.counter % self.k == 0:
            self.slow = (1.0 - self.alpha) * self.slow + self.alpha * theta
            theta = self.slow.copy()
        return theta

    def state_dict(self) -> StateDict:
        state = super(Lookahead, self).state_dict()
        state["scalars"].update(k=self.k, alpha=self.alpha, counter=self.counter)
        inner = self.inner.state_dict()
        state["scalars"]["inner"] = inner["scalars"]
        state["arrays"].update({f"inner.{k}": v for k, v in inner["arrays"].items()})
        if self.slow is not None:
            state["arrays"]["slow"] = self.slow
        return state

    def load_state_dict(self, state: StateDict) -> None:
        super(Lookahead, self).load_state_dict(state)
        scalars = state.get("scalars", {})
        arrays = state.get("arrays", {})
        self.k = int(scalars.get("k", self.k))
        self.alpha = float(scalars.get("alpha", self.alpha))
        self.counter = int(scalars.get("counter", 0))
        if "slow" in arrays:
            self.slow = np.array(arrays["slow"])
        self.inner.load_state_dict({
            "scalars": scalars.get("inner", {}),
            "arrays": {k[len("inner."):]: v for k, v in arrays.items() if k.startswith("inner.")},
        })
