"""
Checkpoints are a pair of files sharing a stem:

  <stem>.npz   little-endian float32 parameter arrays ("param/<name>") and
               optimizer arrays ("optim/<name>")
  <stem>.json  format tag, version, model kind, config echo, parameter
               shapes, optimizer scalars, training epoch and score
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from ..autodiff import ParamSet
from ..errors import CheckpointMismatch, IoFailure
from ..logging import logger
from .base import SegmentationModel
from .binary import BinaryUNet
from .config import BinaryUNetConfig, MulticlassUNetConfig
from .multiclass import MulticlassUNet

FORMAT = "gliomaseg-checkpoint"
VERSION = 1
PARAM_PREFIX = "param/"
OPTIM_PREFIX = "optim/"
STORED_DTYPE = "<f4"

MODEL_KINDS = {
    BinaryUNet.kind: (BinaryUNet, BinaryUNetConfig),
    MulticlassUNet.kind: (MulticlassUNet, MulticlassUNetConfig),
}


@dataclass
class Checkpoint:
    model: SegmentationModel
    optimizer: Optional[Dict[str, Any]] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def epoch(self) -> int:
        return int(self.meta.get("epoch", 0))

    @property
    def score(self) -> Optional[float]:
        return self.meta.get("score")


def checkpoint_paths(stem: Union[str, Path]):
    stem = Path(stem)
    if stem.suffix in (".npz", ".json"):
        stem = stem.with_suffix("")
    return stem.with_name(stem.name + ".npz"), stem.with_name(stem.name + ".json")


def save_checkpoint(stem: Union[str, Path], model: SegmentationModel, optimizer: Optional[Dict[str, Any]] = None,
                    epoch: int = 0, score: Optional[float] = None, extra: Optional[Dict[str, Any]] = None) -> Path:
    npz_path, json_path = checkpoint_paths(stem)
    arrays = {PARAM_PREFIX + name: value.astype(STORED_DTYPE) for name, value in model.params.items()}
    scalars = {}
    if optimizer is not None:
        for name, value in optimizer.get("arrays", {}).items():
            arrays[OPTIM_PREFIX + name] = np.asarray(value).astype(STORED_DTYPE)
        scalars = dict(optimizer.get("scalars", {}))
    meta = {
        "format": FORMAT,
        "version": VERSION,
        "kind": model.kind,
        "config": model.config.to_json(),
        "params": {name: list(shape) for name, shape in model.params.shapes.items()},
        "optimizer": scalars if optimizer is not None else None,
        "epoch": int(epoch),
        "score": None if score is None else float(score),
    }
    meta.update(extra or {})
    try:
        npz_path.parent.mkdir(parents=True, exist_ok=True)
        with npz_path.open("wb") as fh:
            np.savez(fh, **arrays)
        json_path.write_text(json.dumps(meta, indent=2))
    except OSError as err:
        raise IoFailure(f"{npz_path}: {err}")
    logger.info(f"saved checkpoint {npz_path.with_suffix('')} (epoch {epoch})")
    return npz_path


def _read(stem):
    npz_path, json_path = checkpoint_paths(stem)
    try:
        meta = json.loads(json_path.read_text())
        with np.load(npz_path, allow_pickle=False) as data:
            arrays = {key: data[key] for key in data.files}
    except (OSError, ValueError) as err:
        raise CheckpointMismatch(f"{npz_path.with_suffix('')}: cannot read checkpoint ({err})")
    return meta, arrays


def load_checkpoint(stem: Union[str, Path], kind: Optional[str] = None) -> Checkpoint:
    """rebuild the model from the config echo and reject any name/shape drift"""
    meta, arrays = _read(stem)
    if meta.get("format") != FORMAT or meta.get("version") != VERSION:
        raise CheckpointMismatch(f"unsupported checkpoint format {meta.get('format')} v{meta.get('version')}")
    if meta.get("kind") not in MODEL_KINDS:
        raise CheckpointMismatch(f"unknown model kind {meta.get('kind')!r}")
    if kind is not None and meta["kind"] != kind:
        raise CheckpointMismatch(f"expected a {kind} checkpoint, found {meta['kind']}")

    model_cls, config_cls = MODEL_KINDS[meta["kind"]]
    try:
        config = config_cls(**meta["config"])
    except TypeError as err:
        raise CheckpointMismatch(f"config echo does not match {config_cls.__name__}: {err}")
    model = model_cls(config)

    stored = {key[len(PARAM_PREFIX):]: value for key, value in arrays.items() if key.startswith(PARAM_PREFIX)}
    declared = {name: tuple(shape) for name, shape in meta.get("params", {}).items()}
    expected = model.params.shapes
    for source, shapes in (("manifest", declared), ("archive", {k: v.shape for k, v in stored.items()})):
        if set(shapes) != set(expected):
            missing = sorted(set(expected) - set(shapes))
            extra = sorted(set(shapes) - set(expected))
            raise CheckpointMismatch(f"{source} parameter names differ: missing {missing[:3]} extra {extra[:3]}")
        for name, shape in shapes.items():
            if tuple(shape) != expected[name]:
                raise CheckpointMismatch(f"{source} shape of {name} is {tuple(shape)}, model needs {expected[name]}")

    params = ParamSet({name: stored[name].astype(np.float32) for name in expected})
    model = model_cls(config, params)
    optimizer = None
    if meta.get("optimizer") is not None:
        optimizer = {
            "scalars": meta["optimizer"],
            "arrays": {k[len(OPTIM_PREFIX):]: v for k, v in arrays.items() if k.startswith(OPTIM_PREFIX)},
        }
    logger.info(f"loaded {meta['kind']} checkpoint {checkpoint_paths(stem)[0].with_suffix('')}")
    return Checkpoint(model, optimizer, meta)
