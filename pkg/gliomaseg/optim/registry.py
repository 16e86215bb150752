from typing import Callable, Dict

from ..constants import DEFAULT_LR
from ..errors import UnknownOptimizer
from .adam import Adam, RAdam
from .base import Optimizer, Sgd
from .lookahead import SLOW_STEP, SYNC_PERIOD, Lookahead

Factory = Callable[[float, int, float], Optimizer]

OPTIMIZERS: Dict[str, Factory] = {
    "A": lambda lr, k, alpha: Adam(lr),
    "RA": lambda lr, k, alpha: RAdam(lr),
    "R": lambda lr, k, alpha: Lookahead(RAdam(lr), k, alpha),
    "A+LH": lambda lr, k, alpha: Lookahead(Adam(lr), k, alpha),
    "SGD": lambda lr, k, alpha: Sgd(lr),
}


def build_optimizer(name: str, lr: float = DEFAULT_LR, k: int = SYNC_PERIOD, alpha: float = SLOW_STEP) -> Optimizer:
    if name not in OPTIMIZERS:
        raise UnknownOptimizer(f"unknown optimizer {name!r}, expected one of {sorted(OPTIMIZERS)}")
    return OPTIMIZERS[name](lr, k, alpha)
