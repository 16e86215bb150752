from enum import Enum
from typing import cast, Dict, FrozenSet, List, Tuple


class XEnum(Enum):
    @classmethod
    def lookup(cls, value):
        for item in cls:
            if item.value == value:
                return item
        raise KeyError(value)


class IntEnum(XEnum):
    @property
    def int(self) -> int:
        return cast(int, self.value)


class Modality(XEnum):
    T1 = "T1"
    T1GD = "T1GD"
    T2 = "T2"
    FLAIR = "FLAIR"

    def __str__(self):
        return str(self.value)


# channel order of every stacked case array
MODALITIES: List[Modality] = [Modality.T1, Modality.T1GD, Modality.T2, Modality.FLAIR]


class Label(IntEnum):
    Background = 0
    Necrotic = 1
    Edema = 2
    Enhancing = 3


NUM_CLASSES = 4
LABEL_ALPHABET: FrozenSet[int] = frozenset(x.int for x in Label)

# BraTS ships enhancing tumour as 4
BRATS_LABELS: Dict[int, int] = {0: 0, 1: 1, 2: 2, 4: 3}

# external label written for each internal class (phantoms use the BraTS alphabet)
BRATS_EXTERNAL: Dict[int, int] = {v: k for k, v in BRATS_LABELS.items()}

# full-scale training defaults
DEFAULT_LR = 0.0003
DEFAULT_EPOCHS = 300
BINARY_BATCH = 2
MULTICLASS_BATCH = 6
ROI_TOLERANCE = 12
ROI_MIN_DIMS: Tuple[int, int, int] = (48, 48, 128)
BINARY_INPUT_DIMS: Tuple[int, int, int] = (128, 128, 128)
BINARY_ELASTIC_SIGMA = 2.0
MULTICLASS_ELASTIC_SIGMA_RANGE: Tuple[float, float] = (10.0, 13.0)
BINARY_THRESHOLD = 0.5
PERCENTILES: Tuple[int, ...] = (0, 25, 50, 75, 100)

# overlay colours: edema green, enhancing yellow, non-enhancing blue
LABEL_COLOURS: Dict[int, Tuple[int, int, int]] = {
    Label.Background.int: (0, 0, 0),
    Label.Necrotic.int: (40, 90, 255),
    Label.Edema.int: (40, 200, 60),
    Label.Enhancing.int: (255, 225, 40),
}
