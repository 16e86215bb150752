"""
Case splits and the background batch producer used by training.
"""
import queue
import threading
from typing import Any, Callable, Iterator, List, Sequence, Tuple

import numpy as np

from ..errors import DataError
from ..logging import logger
from ..volumes import DatasetManifest, MultiModalCase, NormalizeRegion, load_case

DEFAULT_PREFETCH = 2

MakeBatch = Callable[[Sequence[Any], np.random.Generator], Tuple[np.ndarray, np.ndarray]]


def split_cases(case_ids: Sequence[str], validation_fraction: float, seed: int) -> Tuple[List[str], List[str]]:
    """seeded shuffle, then the last fraction of cases (at least one) validates"""
    ids = sorted(case_ids)
    if not ids:
        raise DataError("no cases to split")
    order = np.random.default_rng(seed).permutation(len(ids))
    n_val = int(round(validation_fraction * len(ids)))
    if validation_fraction > 0 and len(ids) > 1:
        n_val = min(max(n_val, 1), len(ids) - 1)
    else:
        n_val = 0
    train = sorted(ids[i] for i in order[:len(ids) - n_val])
    val = sorted(ids[i] for i in order[len(ids) - n_val:])
    logger.info(f"split {len(ids)} cases: {len(train)} train / {len(val)} validation")
    return train, val


def load_cases(manifest: DatasetManifest, case_ids: Sequence[str],
               region: NormalizeRegion = NormalizeRegion.NonzeroOnly) -> List[MultiModalCase]:
    return [load_case(manifest, case_id, region) for case_id in case_ids]


class _Failed:
    def __init__(self, error: BaseException):
        self.error = error


_DONE = object()


class BatchLoader:
    """
    One producer thread builds an epoch of batches into a bounded queue
    while the caller runs the optimization step on the previous one.
    Items are shuffled and every batch is built from a generator seeded
    by (seed, epoch), so the stream is identical from run to run.
    """

    def __init__(self, items: Sequence[Any], batch_size: int, make_batch: MakeBatch, seed: int = 0,
                 prefetch: int = DEFAULT_PREFETCH, shuffle: bool = True):
        if batch_size < 1:
            raise DataError(f"batch size must be positive, got {batch_size}")
        if not items:
            raise DataError("batch loader needs at least one item")
        self.items = list(items)
        self.batch_size = batch_size
        self.make_batch = make_batch
        self.seed = seed
        self.prefetch = max(1, prefetch)
        self.shuffle = shuffle

    def __len__(self) -> int:
        return (len(self.items) + self.batch_size - 1) // self.batch_size

    def _groups(self, rng: np.random.Generator) -> List[List[Any]]:
        order = rng.permutation(len(self.items)) if self.shuffle else np.arange(len(self.items))
        picked = [self.items[i] for i in order]
        return [picked[i:i + self.batch_size] for i in range(0, len(picked), self.batch_size)]

    def epoch(self, epoch: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        rng = np.random.default_rng([self.seed, epoch])
        groups = self._groups(rng)
        out: "queue.Queue" = queue.Queue(maxsize=self.prefetch)
        stop = threading.Event()

        def produce():
            try:
                for group in groups:
                    if stop.is_set():
                        return
                    out.put(self.make_batch(group, rng))
                out.put(_DONE)
            except BaseException as err:  # handed to the consumer
                out.put(_Failed(err))

        worker = threading.Thread(target=produce, name=f"batches-{epoch}", daemon=True)
        worker.start()
        try:
            while True:
                item = out.get()
                if item is _DONE:
                    break
                if isinstance(item, _Failed):
                    raise item.error
                yield item
        finally:
            stop.set()
            # unblock a producer waiting on a full queue
            while worker.is_alive():
                try:
                    out.get(timeout=0.1)
                except queue.Empty:
                    pass
            worker.join()


def stack_batch(pairs: Sequence[Tuple[np.ndarray, np.ndarray]]) -> Tuple[np.ndarray, np.ndarray]:
    images = np.stack([p[0] for p in pairs]).astype(np.float32)
    targets = np.stack([p[1] for p in pairs]).astype(np.float32)
    return images, targets
