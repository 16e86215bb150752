from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Union

import numpy as np

from ..augment import TtaVariant, tta_apply, tta_invert
from ..logging import logger
from ..models import PatchSpec, Prediction, SegmentationModel, sliding_window_predict
from ..volumes import MultiModalCase
from ..workers import thread_count

RENORM_TOLERANCE = 1e-6


def _mean(fields: Sequence[np.ndarray]) -> np.ndarray:
    total = np.zeros(fields[0].shape, dtype=np.float64)
    for f in fields:
        total += f
    return total / len(fields)


def tta_aggregate(model: SegmentationModel, volume: Union[MultiModalCase, np.ndarray],
                  spec: Optional[PatchSpec] = None, variants: Optional[Sequence[TtaVariant]] = None,
                  threads: Optional[int] = None) -> Prediction:
    """
    Predict every reflection variant, flip each output back and average.
    Probabilities and logits are averaged separately; the sum runs in
    variant-id order so any ordering of variants gives identical bits.
    """
    data = volume.stack() if isinstance(volume, MultiModalCase) else np.asarray(volume)
    variants = sorted(variants or TtaVariant.all(), key=lambda v: v.id)

    def run(variant: TtaVariant) -> Prediction:
        pred = sliding_window_predict(model, tta_apply(data, variant), spec, threads=1)
        return Prediction(tta_invert(pred.probs, variant), tta_invert(pred.logits, variant))

    workers = min(threads or thread_count(), len(variants))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, variants))
    else:
        results = [run(v) for v in variants]

    probs = _mean([r.probs for r in results])
    logits = _mean([r.logits for r in results])
    deviation = float(np.max(np.abs(probs.sum(axis=-1) - 1.0))) if probs.shape[-1] > 1 else 0.0
    if deviation > RENORM_TOLERANCE:
        logger.debug(f"tta: renormalising probabilities (max deviation {deviation:.2e})")
        probs = probs / probs.sum(axis=-1, keepdims=True)
    return Prediction(probs.astype(np.float32), logits.astype(np.float32))
