from typing import Callable, Dict, Tuple

import numpy as np

from .params import ParamSet
from .tensor import Tape, Tensor, backward

Objective = Callable[[Dict[str, Tensor]], Tensor]
REL_FLOOR = 1e-8


def _value(f: Objective, params: ParamSet, flat: np.ndarray) -> float:
    probe = params.copy()
    probe.assign_flat(flat)
    return f(probe.constants()).item()


def numeric_gradient(f: Objective, params: ParamSet, step: float = 1e-3, extrapolate: bool = False) -> np.ndarray:
    """
    Central differences (f(p+h) - f(p-h)) / 2h per coordinate. With
    extrapolate, the h and h/2 estimates are combined as (4 D(h/2) - D(h)) / 3,
    which cancels the h^2 error term.
    """
    base = params.flatten()
    grad = np.zeros(base.size, dtype=np.float64)

    def central(i, h):
        plus = base.copy()
        minus = base.copy()
        plus[i] += h
        minus[i] -= h
        return (_value(f, params, plus) - _value(f, params, minus)) / (2.0 * h)

    for i in range(base.size):
        coarse = central(i, step)
        grad[i] = (4.0 * central(i, step / 2.0) - coarse) / 3.0 if extrapolate else coarse
    return grad


def analytic_gradient(f: Objective, params: ParamSet) -> np.ndarray:
    tape = Tape()
    loss = f(params.bind(tape))
    return params.flatten_grads(backward(tape, loss)).astype(np.float64)


def relative_errors(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), REL_FLOOR)
    return np.abs(analytic - numeric) / denom


def compare_gradients(f: Objective, params: ParamSet, step: float = 1e-3,
                      extrapolate: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    params = params.astype(np.float64)
    return analytic_gradient(f, params), numeric_gradient(f, params, step, extrapolate)


def finite_diff_check(f: Objective, params: ParamSet, step: float = 1e-3, extrapolate: bool = False) -> float:
    """max over coordinates of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8), in float64"""
    analytic, numeric = compare_gradients(f, params, step, extrapolate)
    if analytic.size == 0:
        return 0.0
    return float(relative_errors(analytic, numeric).max())
