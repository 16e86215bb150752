"""
Pipeline configuration: nested dataclasses loaded from a bundled preset or
a JSON file, then adjusted by loss/optimizer and ablation rows and --set overrides.
"""
import copy
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

from ..augment import AugmentParams
from ..constants import (BINARY_THRESHOLD, BINARY_BATCH, DEFAULT_EPOCHS, DEFAULT_LR, MULTICLASS_BATCH,
                         ROI_MIN_DIMS, ROI_TOLERANCE)
from ..errors import BadOverride, BadPreset, ConfigError
from ..logging import logger
from ..models import BinaryUNetConfig, MulticlassUNetConfig, PatchSpec
from ..optim import OPTIMIZERS, SLOW_STEP, SYNC_PERIOD
from ..paths import CONFIGS
from ..scoring import LOSS_ALIASES, LOSSES
from ..volumes import NormalizeRegion

PRESETS = ("full", "toy")

# multiclass-stage rows: loss, optimizer
LOSS_ROWS: Dict[str, Tuple[str, str]] = {
    "DL+A": ("DL", "A"),
    "CE+A": ("CE", "A"),
    "DL+CE+A": ("DL+CE", "A"),
    "LC+A": ("LC", "A"),
    "LC+R": ("LC", "R"),
    "LC+RA": ("LC", "RA"),
    "LC+A+LH": ("LC", "A+LH"),
}

# use_roi, downsample, norm
ABLATION_ROWS: Dict[str, Tuple[bool, str, str]] = {
    "U-Net": (False, "maxpool", "none"),
    "ROI": (True, "maxpool", "none"),
    "ROI+SC": (True, "strided", "none"),
    "ROI+SC+I-Norm": (True, "strided", "instance"),
}


@dataclass
class PhantomSpec:
    dims: Tuple[int, int, int] = (48, 48, 40)
    count: int = 25
    seed: int = 7
    spacing: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    brain_fraction: Tuple[float, float] = (0.78, 0.9)
    edema_radius: Tuple[float, float] = (5.0, 8.0)
    core_fraction: Tuple[float, float] = (0.45, 0.7)
    shell_fraction: Tuple[float, float] = (0.3, 0.45)
    noise_std: float = 0.04

    def __post_init__(self):
        self.dims = tuple(int(n) for n in self.dims)
        if len(self.dims) != 3 or min(self.dims) < 8 or self.count < 1:
            raise ConfigError(f"phantom dims {self.dims} count {self.count}")


@dataclass
class StageConfig:
    loss: str = "DL"
    optimizer: str = "A"
    lr: float = DEFAULT_LR
    lookahead_k: int = SYNC_PERIOD
    lookahead_alpha: float = SLOW_STEP
    epochs: int = DEFAULT_EPOCHS
    batch_size: int = BINARY_BATCH
    augment: AugmentParams = field(default_factory=AugmentParams.binary)
    seed: int = 0

    def validate(self, stage: str):
        key = LOSS_ALIASES.get(self.loss, self.loss)
        if key not in LOSSES:
            raise ConfigError(f"{stage}: unknown loss {self.loss!r}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"{stage}: unknown optimizer {self.optimizer!r}")
        if self.epochs < 0 or self.batch_size < 1 or self.lr <= 0:
            raise ConfigError(f"{stage}: epochs {self.epochs} batch {self.batch_size} lr {self.lr}")


@dataclass
class BinaryStageConfig(StageConfig):
    model: BinaryUNetConfig = field(default_factory=BinaryUNetConfig)


@dataclass
class MulticlassStageConfig(StageConfig):
    loss: str = "LC"
    optimizer: str = "A+LH"
    batch_size: int = MULTICLASS_BATCH
    augment: AugmentParams = field(default_factory=AugmentParams.multiclass)
    model: MulticlassUNetConfig = field(default_factory=MulticlassUNetConfig)
    patch: PatchSpec = field(default_factory=PatchSpec)
    patches_per_case: int = 1
    use_roi: bool = True


@dataclass
class PipelineConfig:
    preset: str = "full"
    binary: BinaryStageConfig = field(default_factory=BinaryStageConfig)
    multiclass: MulticlassStageConfig = field(default_factory=MulticlassStageConfig)
    phantom: PhantomSpec = field(default_factory=PhantomSpec)
    threshold: float = BINARY_THRESHOLD
    tolerance: int = ROI_TOLERANCE
    roi_min_dims: Tuple[int, int, int] = ROI_MIN_DIMS
    normalize: str = NormalizeRegion.NonzeroOnly.value
    validation_fraction: float = 0.2
    tta: bool = True
    seed: int = 0

    def __post_init__(self):
        self.roi_min_dims = tuple(int(n) for n in self.roi_min_dims)
        self.binary.validate("binary")
        self.multiclass.validate("multiclass")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError(f"threshold {self.threshold} outside (0, 1)")
        if self.tolerance < 0:
            raise ConfigError(f"tolerance {self.tolerance} is negative")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigError(f"validation_fraction {self.validation_fraction} outside [0, 1)")
        try:
            NormalizeRegion.lookup(self.normalize)
        except KeyError:
            raise ConfigError(f"normalize must be 'all' or 'nonzero', got {self.normalize!r}")

    @property
    def region(self) -> NormalizeRegion:
        return NormalizeRegion.lookup(self.normalize)

    def to_json(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


def _build(cls, doc: Dict[str, Any], where: str):
    """construct a (nested) dataclass from a dict, rejecting unknown keys"""
    if not isinstance(doc, dict):
        raise BadOverride(f"{where or 'config'} must be an object, got {doc!r}")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in doc.items():
        if key not in fields:
            raise BadOverride(f"unknown config key {where + key}")
        default = _default(fields[key])
        if dataclasses.is_dataclass(default):
            kwargs[key] = _build(type(default), value, f"{where}{key}.")
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as err:
        raise BadOverride(f"{where or 'config'}: {err}")


def _default(f: dataclasses.Field):
    if f.default_factory is not dataclasses.MISSING:
        return f.default_factory()
    return f.default


def _merge(base: Dict[str, Any], update: Dict[str, Any], where: str = "") -> Dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in update.items():
        if key not in out:
            raise BadOverride(f"unknown config key {where + key}")
        if isinstance(out[key], dict) and isinstance(value, dict):
            out[key] = _merge(out[key], value, f"{where}{key}.")
        else:
            out[key] = value
    return out


def config_from_dict(doc: Dict[str, Any]) -> PipelineConfig:
    return _build(PipelineConfig, _merge(PipelineConfig().to_json(), doc), "")


def load_preset(name: str) -> Dict[str, Any]:
    path = CONFIGS / f"{name}.json"
    if name not in PRESETS or not path.exists():
        raise BadPreset(f"unknown preset {name!r}, expected one of {PRESETS}")
    return json.loads(path.read_text())


def load_config(source: Optional[Union[str, Path]] = None, overrides: Sequence[str] = (),
                table_row: Optional[str] = None, ablation: Optional[str] = None) -> PipelineConfig:
    """
    source is a preset name or a JSON file path (default: the toy preset).
    Loss and ablation rows apply before the --set overrides so an override always wins.
    """
    source = source or "toy"
    if str(source) in PRESETS:
        doc = load_preset(str(source))
    else:
        path = Path(source)
        try:
            doc = json.loads(path.read_text())
        except OSError as err:
            raise BadPreset(f"{path}: {err}")
        except ValueError as err:
            raise BadPreset(f"{path}: not JSON ({err})")
    if not isinstance(doc, dict):
        raise BadPreset(f"{source}: a config must be a JSON object, got {type(doc).__name__}")
    merged = _merge(PipelineConfig().to_json(), doc)
    if table_row is not None:
        merged = apply_table_row(merged, table_row)
    if ablation is not None:
        merged = apply_ablation(merged, ablation)
    for item in overrides:
        merged = apply_override(merged, item)
    config = _build(PipelineConfig, merged, "")
    logger.debug(f"config {config.preset}: binary {config.binary.loss}/{config.binary.optimizer} "
                 f"multiclass {config.multiclass.loss}/{config.multiclass.optimizer}")
    return config


def parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except ValueError:
        return text


def apply_override(doc: Dict[str, Any], item: str) -> Dict[str, Any]:
    """apply one key.sub=value assignment"""
    key, sep, raw = item.partition("=")
    if not sep or not key:
        raise BadOverride(f"override {item!r} is not key=value")
    parts = key.strip().split(".")
    node = doc
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            raise BadOverride(f"unknown config key {key}")
        node = node[part]
    if parts[-1] not in node:
        raise BadOverride(f"unknown config key {key}")
    out = copy.deepcopy(doc)
    node = out
    for part in parts[:-1]:
        node = node[part]
    node[parts[-1]] = parse_value(raw.strip())
    return out


def apply_table_row(doc: Dict[str, Any], row: str) -> Dict[str, Any]:
    if row not in LOSS_ROWS:
        raise BadPreset(f"unknown loss/optimizer row {row!r}, expected one of {list(LOSS_ROWS)}")
    loss, optimizer = LOSS_ROWS[row]
    return _merge(doc, {"multiclass": {"loss": loss, "optimizer": optimizer}})


def apply_ablation(doc: Dict[str, Any], row: str) -> Dict[str, Any]:
    if row not in ABLATION_ROWS:
        raise BadPreset(f"unknown ablation row {row!r}, expected one of {list(ABLATION_ROWS)}")
    use_roi, downsample, norm = ABLATION_ROWS[row]
    return _merge(doc, {"multiclass": {"use_roi": use_roi, "model": {"downsample": downsample, "norm": norm}}})
