"""Two-stage glioma segmentation: phantoms, training, prediction and reports"""
import argparse
import logging
import sys
from typing import List, Optional

from ..errors import EXIT_NUMERIC, GliomaSegError
from ..logging import logger
from ..volumes import load_manifest
from .config import PRESETS, LOSS_ROWS, ABLATION_ROWS, PipelineConfig, load_config
from .evaluate import evaluate, load_report
from .gradsuite import CHECKS, run_suite
from .phantom import phantom_generate
from .predict import predict
from .report import percentile_report
from .train import BINARY, MULTICLASS, train

APP_NAME = "gliomaseg"

parser = argparse.ArgumentParser(description=__doc__, prog=APP_NAME)
parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
parser.add_argument("--quiet", action="store_true", help="log warnings and errors only")
parser.add_argument("--config", default="toy",
                    help=f"bundled preset ({', '.join(PRESETS)}) or path to a JSON config (default: toy)")
parser.add_argument("--set", dest="overrides", action="append", metavar="KEY=VALUE",
                    help="override one config value, e.g. --set multiclass.epochs=5 (repeatable)")
parser.add_argument("--table-row", choices=list(LOSS_ROWS), help="multiclass loss/optimizer row")
parser.add_argument("--ablation", choices=list(ABLATION_ROWS), help="ROI / strided conv / instance norm row")

commands = parser.add_subparsers(dest="command", metavar="COMMAND")
commands.required = True

phantom_cmd = commands.add_parser("phantom", help="write synthetic phantom cases and a manifest")
phantom_cmd.add_argument("out", help="output directory")
phantom_cmd.add_argument("--count", type=int, help="number of cases (default: from config)")
phantom_cmd.add_argument("--seed", type=int, help="phantom seed (default: from config)")

for name, stage in (("train-binary", BINARY), ("train-multiclass", MULTICLASS)):
    cmd = commands.add_parser(name, help=f"train the {stage} network")
    cmd.add_argument("manifest", help="dataset manifest JSON")
    cmd.add_argument("out", help="directory for the checkpoint and metrics.jsonl")
    cmd.set_defaults(stage=stage)
    cmd.add_argument("--resume", metavar="CKPT",
                     help=f"continue from a checkpoint stem, normally <out>/{stage}_last")
    if stage == MULTICLASS:
        cmd.add_argument("--binary", help="binary checkpoint whose prediction drives the crop "
                                          "(default: crop around the ground truth)")

predict_cmd = commands.add_parser("predict", help="run the full pipeline over a manifest")
predict_cmd.add_argument("manifest", help="dataset manifest JSON")
predict_cmd.add_argument("out", help="prediction output directory")
predict_cmd.add_argument("--binary", help="binary checkpoint stem")
predict_cmd.add_argument("--multiclass", required=True, help="multiclass checkpoint stem")
predict_cmd.add_argument("--no-tta", dest="tta", action="store_false", default=None,
                         help="skip test-time augmentation")
predict_cmd.add_argument("--png", action="store_true", help="also write confidence.png per case")
predict_cmd.add_argument("--case", dest="cases", action="append", help="only this case id (repeatable)")

evaluate_cmd = commands.add_parser("evaluate", help="score predictions against the manifest labels")
evaluate_cmd.add_argument("manifest", help="dataset manifest JSON")
evaluate_cmd.add_argument("predictions", help="prediction directory (report.json is written here)")

report_cmd = commands.add_parser("report", help="render the percentile cases of an evaluation")
report_cmd.add_argument("manifest", help="dataset manifest JSON")
report_cmd.add_argument("predictions", help="prediction directory holding report.json")
report_cmd.add_argument("out", help="image output directory")

grad_cmd = commands.add_parser("gradcheck", help="finite-difference check every differentiable op")
grad_cmd.add_argument("--check", dest="checks", action="append", choices=sorted(CHECKS),
                      help="run only this check (repeatable)")
grad_cmd.add_argument("--seed", type=int, default=0)


def _config(opts) -> PipelineConfig:
    return load_config(opts.config, opts.overrides or [], opts.table_row, opts.ablation)


def do_phantom(opts) -> int:
    opts.overrides = list(opts.overrides or [])
    if opts.count is not None:
        opts.overrides.append(f"phantom.count={opts.count}")
    if opts.seed is not None:
        opts.overrides.append(f"phantom.seed={opts.seed}")
    phantom_generate(_config(opts).phantom, opts.out)
    return 0


def do_train(opts) -> int:
    result = train(opts.stage, _config(opts), load_manifest(opts.manifest), opts.out,
                   binary_checkpoint=getattr(opts, "binary", None), resume=opts.resume)
    print(f"{result.stage}: best validation dice {result.best_score:.4f} at epoch {result.best_epoch} "
          f"-> {result.checkpoint}")
    return 0


def do_predict(opts) -> int:
    predict(_config(opts), load_manifest(opts.manifest), opts.binary, opts.multiclass, opts.out,
            tta=opts.tta, png=opts.png, case_ids=opts.cases)
    return 0


def do_evaluate(opts) -> int:
    agg = evaluate(load_manifest(opts.manifest), opts.predictions)["aggregate"]
    print(f"cases {agg['count']} whole {agg['whole']:.4f} core {agg['core']:.4f} "
          f"enh {agg['enh']:.4f} mean {agg['mean']:.4f}")
    return 0


def do_report(opts) -> int:
    config = _config(opts)
    for path in percentile_report(load_report(opts.predictions), load_manifest(opts.manifest), opts.predictions,
                                  opts.out, region=config.region):
        print(path)
    return 0


def do_gradcheck(opts) -> int:
    results = run_suite(opts.checks, opts.seed)
    for result in results:
        print(result.line())
    return 0 if all(r.passed for r in results) else EXIT_NUMERIC


COMMANDS = {
    "phantom": do_phantom,
    "train-binary": do_train,
    "train-multiclass": do_train,
    "predict": do_predict,
    "evaluate": do_evaluate,
    "report": do_report,
    "gradcheck": do_gradcheck,
}


def main(args: Optional[List[str]] = None) -> int:
    opts = parser.parse_args(args)
    if opts.verbose:
        logger.setLevel(logging.DEBUG)
    elif opts.quiet:
        logger.setLevel(logging.WARNING)
    try:
        return COMMANDS[opts.command](opts)
    except GliomaSegError as err:
        print(err.one_line(), file=sys.stderr)
        return err.exit_status


def run(args=None):
    sys.exit(main(args))


if __name__ == "__main__":
    run()
