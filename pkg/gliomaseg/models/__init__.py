from .config import BinaryUNetConfig, MulticlassUNetConfig, PatchSpec, STRIDED, MAXPOOL, INSTANCE, NO_NORM
from .base import SegmentationModel, Prediction, ForwardResult
from .binary import BinaryUNet, build_binary_unet
from .multiclass import MulticlassUNet, build_multiclass_unet
from .window import sliding_window_predict, window_starts, window_corners, coverage_counts
from .checkpoint import Checkpoint, save_checkpoint, load_checkpoint, checkpoint_paths
from .resize import resize_volume
