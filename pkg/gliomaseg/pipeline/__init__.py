from .config import (PipelineConfig, StageConfig, BinaryStageConfig, MulticlassStageConfig, PhantomSpec, LOSS_ROWS,
                     ABLATION_ROWS, PRESETS, load_config, load_preset, config_from_dict, apply_override)
from .phantom import phantom_case, phantom_generate
from .dataset import BatchLoader, split_cases, load_cases
from .train import train, train_step, BinaryTrainer, MulticlassTrainer, TrainResult, EpochRecord
from .predict import predict, predict_case, CasePrediction
from .evaluate import evaluate, load_report
from .report import percentile_report, percentile_cases, percentile_index
