"""
Two-stage training loops.

Every epoch logs its mean training loss and the validation dice, appends
the same record to <out_dir>/metrics.jsonl and saves <stage> when the
validation mean dice improves. <stage>_last always holds the latest epoch
and is what --resume picks up. Epoch 0 is the untrained baseline.
"""
import abc
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from ..augment import augment_case
from ..autodiff import Tape, backward
from ..errors import CheckpointMismatch, ConfigError, DataError, IoFailure, NonFiniteLoss
from ..logging import logger
from ..models import (SegmentationModel, build_binary_unet, build_multiclass_unet, load_checkpoint, save_checkpoint,
                      sliding_window_predict)
from ..optim import Optimizer, build_optimizer
from ..scoring import case_report, dice_metric, get_loss
from ..volumes import DatasetManifest, MultiModalCase
from .config import PipelineConfig, StageConfig
from .dataset import BatchLoader, load_cases, split_cases, stack_batch
from .stages import binary_example, multiclass_region, sample_patch

BINARY = "binary"
MULTICLASS = "multiclass"
STAGES = (BINARY, MULTICLASS)
METRICS_FILE = "metrics.jsonl"
LAST_SUFFIX = "_last"


@dataclass
class EpochRecord:
    stage: str
    epoch: int
    loss: Optional[float]
    val_dice: float
    seconds: float
    regions: Dict[str, float] = field(default_factory=dict)

    def line(self) -> str:
        loss = "-" if self.loss is None else f"{self.loss:.4f}"
        return f"{self.stage} epoch {self.epoch} loss={loss} val_dice={self.val_dice:.4f} ({self.seconds:.1f}s)"


@dataclass
class TrainResult:
    stage: str
    checkpoint: Path
    best_epoch: int
    best_score: float
    history: List[EpochRecord]

    @property
    def losses(self) -> List[float]:
        return [r.loss for r in self.history if r.loss is not None]


def train_step(model: SegmentationModel, optimizer: Optimizer, loss_fn: Callable, images: np.ndarray,
               targets: np.ndarray) -> float:
    """one forward/backward pass and parameter update; returns the batch loss"""
    tape = Tape()
    result = model.forward(images, tape)
    loss = loss_fn(result.probs, targets)
    value = loss.item()
    if not math.isfinite(value):
        raise NonFiniteLoss(f"{model.kind} loss became {value}")
    optimizer.step_params(model.params, backward(tape, loss))
    return value


class StageTrainer(abc.ABC):
    """Shared epoch loop; subclasses say how to build batches and validate"""
    stage = "abstract"

    def __init__(self, config: PipelineConfig, out_dir: Union[str, Path], threads: Optional[int] = None):
        self.config = config
        self.out_dir = Path(out_dir)
        self.threads = threads
        settings = self.settings
        self.loss_fn = get_loss(settings.loss)
        self.optimizer = build_optimizer(settings.optimizer, settings.lr, settings.lookahead_k,
                                         settings.lookahead_alpha)
        self.model = self.build_model()
        self.start_epoch = 0
        self.best = (0, -1.0)

    @property
    def settings(self) -> StageConfig:
        return getattr(self.config, self.stage)

    @abc.abstractmethod
    def build_model(self) -> SegmentationModel:
        pass

    @abc.abstractmethod
    def make_batch(self, group: Sequence, rng: np.random.Generator):
        pass

    def items(self, cases: List[MultiModalCase]) -> List:
        return cases

    @abc.abstractmethod
    def validate(self, cases: List[MultiModalCase]) -> Dict[str, float]:
        pass

    def augment(self, case: MultiModalCase, rng: np.random.Generator) -> MultiModalCase:
        return augment_case(case, self.settings.augment, rng)

    def _log(self, record: EpochRecord) -> None:
        logger.info(record.line())
        try:
            with (self.out_dir / METRICS_FILE).open("a") as fh:
                fh.write(json.dumps(asdict(record)) + "\n")
        except OSError as err:
            raise IoFailure(f"{self.out_dir / METRICS_FILE}: {err}")

    def resume(self, checkpoint: Union[str, Path]) -> None:
        """continue from a saved model, its optimizer state and its epoch counter"""
        saved = load_checkpoint(checkpoint, self.model.kind)
        if saved.model.config.to_json() != self.model.config.to_json():
            raise CheckpointMismatch(f"{checkpoint}: model config differs from the {self.stage} stage config")
        if saved.optimizer is None or saved.optimizer["scalars"].get("name") != self.optimizer.name:
            raise CheckpointMismatch(f"{checkpoint}: no {self.optimizer.name} optimizer state to resume from")
        self.model = saved.model
        self.optimizer.load_state_dict(saved.optimizer)
        self.start_epoch = saved.epoch + 1
        score = saved.meta.get("best_score", saved.score)
        self.best = (int(saved.meta.get("best_epoch", saved.epoch)), -1.0 if score is None else float(score))
        logger.info(f"{self.stage}: resuming after epoch {saved.epoch}, best dice {self.best[1]:.4f}")

    def fit(self, train_cases: List[MultiModalCase], val_cases: List[MultiModalCase]) -> TrainResult:
        settings = self.settings
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as err:
            raise IoFailure(f"{self.out_dir}: {err}")
        stem = self.out_dir / self.stage
        last = self.out_dir / f"{self.stage}{LAST_SUFFIX}"
        if not self.start_epoch:
            (self.out_dir / METRICS_FILE).unlink(missing_ok=True)
        val_cases = val_cases or train_cases
        loader = BatchLoader(self.items(train_cases), settings.batch_size, self.make_batch, settings.seed)

        history: List[EpochRecord] = []
        best_epoch, best_score = self.best
        for epoch in range(self.start_epoch, settings.epochs + 1):
            started = time.monotonic()
            loss = None
            if epoch:
                losses = [train_step(self.model, self.optimizer, self.loss_fn, x, y) for x, y in loader.epoch(epoch)]
                loss = float(np.mean(losses))
            regions = self.validate(val_cases)
            record = EpochRecord(self.stage, epoch, loss, regions["mean"], time.monotonic() - started, regions)
            history.append(record)
            self._log(record)
            if record.val_dice > best_score:
                best_epoch, best_score = epoch, record.val_dice
                save_checkpoint(stem, self.model, self.optimizer.state_dict(), epoch, best_score)
            save_checkpoint(last, self.model, self.optimizer.state_dict(), epoch, record.val_dice,
                            {"best_epoch": best_epoch, "best_score": best_score})
        logger.info(f"{self.stage}: best validation dice {best_score:.4f} at epoch {best_epoch}")
        return TrainResult(self.stage, stem, best_epoch, best_score, history)


class BinaryTrainer(StageTrainer):
    stage = BINARY

    def build_model(self) -> SegmentationModel:
        return build_binary_unet(self.config.binary.model)

    def make_batch(self, group: Sequence[MultiModalCase], rng: np.random.Generator):
        dims = self.config.binary.model.input_dims
        return stack_batch([binary_example(self.augment(case, rng), dims) for case in group])

    def validate(self, cases: List[MultiModalCase]) -> Dict[str, float]:
        dims = self.config.binary.model.input_dims
        scores = []
        for case in cases:
            image, target = binary_example(case, dims)
            probs = self.model.predict(image[None]).probs[0]
            scores.append(dice_metric(probs > self.config.threshold, target > 0.5))
        return {"whole": float(np.mean(scores)), "mean": float(np.mean(scores))}


class MulticlassTrainer(StageTrainer):
    stage = MULTICLASS

    def __init__(self, config: PipelineConfig, out_dir: Union[str, Path], threads: Optional[int] = None,
                 binary: Optional[SegmentationModel] = None):
        self.binary = binary
        self._regions: Dict[str, MultiModalCase] = {}
        super(MulticlassTrainer, self).__init__(config, out_dir, threads)

    def build_model(self) -> SegmentationModel:
        return build_multiclass_unet(self.config.multiclass.model)

    def region(self, case: MultiModalCase) -> MultiModalCase:
        if case.case_id not in self._regions:
            c = self.config
            self._regions[case.case_id], _ = multiclass_region(case, c.multiclass.use_roi, c.multiclass.patch,
                                                               c.roi_min_dims, c.tolerance, c.threshold,
                                                               self.binary)
        return self._regions[case.case_id]

    def items(self, cases: List[MultiModalCase]) -> List:
        regions = [self.region(case) for case in cases]
        return [case for case in regions for _ in range(self.config.multiclass.patches_per_case)]

    def make_batch(self, group: Sequence[MultiModalCase], rng: np.random.Generator):
        patch = self.config.multiclass.patch
        k = self.model.num_classes
        return stack_batch([sample_patch(self.augment(case, rng), patch, rng, k) for case in group])

    def validate(self, cases: List[MultiModalCase]) -> Dict[str, float]:
        reports = []
        for case in cases:
            cropped = self.region(case)
            pred = sliding_window_predict(self.model, cropped, self.config.multiclass.patch, self.threads)
            reports.append(case_report(np.argmax(pred.probs, axis=-1), cropped.label.data))
        return {key: float(np.mean([r[key] for r in reports])) for key in reports[0]}


def train(stage: str, config: PipelineConfig, manifest: DatasetManifest, out_dir: Union[str, Path],
          binary_checkpoint: Optional[Union[str, Path]] = None, threads: Optional[int] = None,
          resume: Optional[Union[str, Path]] = None) -> TrainResult:
    """split the manifest, load both halves and run one stage, optionally from a saved epoch"""
    if stage not in STAGES:
        raise ConfigError(f"unknown stage {stage!r}, expected one of {STAGES}")
    train_ids, val_ids = split_cases(manifest.case_ids, config.validation_fraction, config.seed)
    region = config.region
    train_cases = load_cases(manifest, train_ids, region)
    val_cases = load_cases(manifest, val_ids, region)
    for case in train_cases + val_cases:
        if case.label is None:
            raise DataError(f"case {case.case_id} has no label and cannot be used for training")

    if stage == BINARY:
        trainer: StageTrainer = BinaryTrainer(config, out_dir, threads)
    else:
        binary = load_checkpoint(binary_checkpoint, BINARY).model if binary_checkpoint else None
        trainer = MulticlassTrainer(config, out_dir, threads, binary)
    if resume:
        trainer.resume(resume)
    logger.info(f"train {stage}: {trainer.settings.loss}/{trainer.settings.optimizer} "
                f"{trainer.settings.epochs} epochs, {trainer.model.parameter_count} parameters")
    return trainer.fit(train_cases, val_cases)
