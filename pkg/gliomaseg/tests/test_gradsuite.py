import pytest

from ..pipeline.gradsuite import CHECKS, GRAD_TOLERANCE, run_check, run_suite


@pytest.mark.parametrize("name", sorted(CHECKS))
def test_gradient_check_passes(name):
    result = run_check(name)
    assert result.error <= GRAD_TOLERANCE, result.line()
    assert result.line().endswith("ok")


def test_suite_covers_every_loss_and_block():
    for name in ("conv3d", "conv_transpose3d", "instance_norm", "elu", "relu", "sigmoid", "softmax_channels",
                 "channel_attention", "attention_gate", "conv_block1", "conv_block2", "dice_loss",
                 "cross_entropy", "log_cosh_dice", "dice_ce"):
        assert name in CHECKS


def test_suite_runs_named_subset():
    results = run_suite(["relu", "sigmoid"], seed=3)
    assert [r.name for r in results] == ["relu", "sigmoid"]
    assert all(r.passed for r in results)
