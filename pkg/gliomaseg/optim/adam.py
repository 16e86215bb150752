import math

import numpy as np

from ..constants import DEFAULT_LR
from .base import Optimizer, StateDict

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8
RECTIFY_THRESHOLD = 4.0


class Adam(Optimizer):
    name = "A"

    def __init__(self, lr: float = DEFAULT_LR, beta1: float = BETA1, beta2: float = BETA2, eps: float = EPSILON):
        super(Adam, self).__init__(lr)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = None
        self.v = None

    def reset(self, params: np.ndarray) -> None:
        super(Adam, self).reset(params)
        self.t = 0
        self.m = np.zeros_like(params)
        self.v = np.zeros_like(params)

    def _moments(self, grads: np.ndarray):
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grads
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grads * grads
        m_hat = self.m / (1.0 - self.beta1 ** self.t)
        v_hat = self.v / (1.0 - self.beta2 ** self.t)
        return m_hat, v_hat

    def update(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        m_hat, v_hat = self._moments(grads)
        return -self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def state_dict(self) -> StateDict:
        state = super(Adam, self).state_dict()
        state["scalars"].update(t=self.t, beta1=self.beta1, beta2=self.beta2, eps=self.eps)
        if self.m is not None:
            state["arrays"].update(m=self.m, v=self.v)
        return state

    def load_state_dict(self, state: StateDict) -> None:
        super(Adam, self).load_state_dict(state)
        scalars = state.get("scalars", {})
        self.t = int(scalars.get("t", 0))
        self.beta1 = float(scalars.get("beta1", self.beta1))
        self.beta2 = float(scalars.get("beta2", self.beta2))
        self.eps = float(scalars.get("eps", self.eps))
        arrays = state.get("arrays", {})
        if "m" in arrays:
            self.m = np.array(arrays["m"])
            self.v = np.array(arrays["v"])


class RAdam(Adam):
    """
    Adam with the variance rectification term. While the approximated SMA
    length rho_t is at most 4 the step is plain bias-corrected momentum.
    """
    name = "RA"

    def __init__(self, lr: float = DEFAULT_LR, beta1: float = BETA1, beta2: float = BETA2, eps: float = EPSILON):
        super(RAdam, self).__init__(lr, beta1, beta2, eps)
        self.last_branch = None

    @property
    def rho_inf(self) -> float:
        return 2.0 / (1.0 - self.beta2) - 1.0

    def rho(self, t: int) -> float:
        beta2_t = self.beta2 ** t
        return self.rho_inf - 2.0 * t * beta2_t / (1.0 - beta2_t)

    def rectifier(self, t: int) -> float:
        rho_t, rho_inf = self.rho(t), self.rho_inf
        return math.sqrt((rho_t - 4.0) * (rho_t - 2.0) * rho_inf / ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t))

    def update(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        m_hat, v_hat = self._moments(grads)
        if self.rho(self.t) > RECTIFY_THRESHOLD:
            self.last_branch = "adaptive"
            return -self.lr * self.rectifier(self.t) * m_hat / (np.sqrt(v_hat) + self.eps)
        self.last_branch = "momentum"
        return -self.lr * m_hat
