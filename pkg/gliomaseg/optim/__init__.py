from .base import Optimizer, Sgd
from .adam import Adam, RAdam, BETA1, BETA2, EPSILON
from .lookahead import Lookahead, SYNC_PERIOD, SLOW_STEP
from .registry import OPTIMIZERS, build_optimizer
