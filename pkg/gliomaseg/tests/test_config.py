import json

import pytest

from ..errors import BadModelConfig, BadOverride, BadPreset, ConfigError
from ..pipeline import LOSS_ROWS, ABLATION_ROWS, config_from_dict, load_config
from ..pipeline.config import apply_override, parse_value
from ..pipeline.tool import main
from ..scoring import get_loss, log_cosh_dice, cross_entropy, dice_ce


def test_presets_load():
    toy = load_config("toy")
    assert toy.preset == "toy"
    assert toy.multiclass.model.widths == (8, 16, 32)
    assert toy.multiclass.patch.dims == (24, 24, 32)
    assert toy.multiclass.loss == "LC" and toy.multiclass.optimizer == "A+LH"
    full = load_config("full")
    assert full.binary.model.input_dims == (128, 128, 128)
    assert full.binary.epochs == full.multiclass.epochs == 300
    assert (full.binary.batch_size, full.multiclass.batch_size) == (2, 6)
    assert full.binary.lr == full.multiclass.lr == 0.0003
    assert full.roi_min_dims == (48, 48, 128) and full.tolerance == 12


def test_toy_keeps_topology():
    toy, full = load_config("toy"), load_config("full")
    assert toy.multiclass.model.depth == full.multiclass.model.depth
    assert toy.binary.model.depth == full.binary.model.depth
    assert toy.multiclass.model.attention and toy.multiclass.model.norm == full.multiclass.model.norm


def test_unknown_preset():
    with pytest.raises(BadPreset):
        load_config("huge")


def test_config_file(tmp_path):
    path = tmp_path / "mine.json"
    path.write_text(json.dumps({"multiclass": {"epochs": 3}, "threshold": 0.4}))
    config = load_config(path)
    assert config.multiclass.epochs == 3 and config.threshold == 0.4
    path.write_text("{not json")
    with pytest.raises(BadPreset):
        load_config(path)


def test_loss_rows_map_to_one_config_each():
    seen = set()
    for row, (loss, optimizer) in LOSS_ROWS.items():
        config = load_config("toy", table_row=row)
        assert (config.multiclass.loss, config.multiclass.optimizer) == (loss, optimizer)
        seen.add((loss, optimizer))
    assert len(seen) == len(LOSS_ROWS) == 7
    with pytest.raises(BadPreset):
        load_config("toy", table_row="LC+SGD")


def test_loss_row_losses_route():
    assert get_loss(LOSS_ROWS["LC+A"][0]) is log_cosh_dice
    assert get_loss(LOSS_ROWS["CE+A"][0]) is cross_entropy
    assert get_loss(LOSS_ROWS["DL+CE+A"][0]) is dice_ce


@pytest.mark.parametrize("row", list(ABLATION_ROWS))
def test_ablation_rows(row):
    use_roi, downsample, norm = ABLATION_ROWS[row]
    config = load_config("toy", ablation=row)
    assert config.multiclass.use_roi == use_roi
    assert (config.multiclass.model.downsample, config.multiclass.model.norm) == (downsample, norm)


def test_overrides():
    config = load_config("toy", ["multiclass.epochs=2", "multiclass.optimizer=RA", "tta=false",
                                 "multiclass.patch.dims=[16,16,16]", "normalize=all"])
    assert config.multiclass.epochs == 2
    assert config.multiclass.optimizer == "RA"
    assert config.tta is False
    assert config.multiclass.patch.dims == (16, 16, 16)
    assert config.normalize == "all"
    # overrides win over the table row
    assert load_config("toy", ["multiclass.loss=CE"], table_row="LC+A").multiclass.loss == "CE"


def test_parse_value():
    assert parse_value("3") == 3
    assert parse_value("0.5") == 0.5
    assert parse_value("[1, 2]") == [1, 2]
    assert parse_value("A+LH") == "A+LH"


def test_bad_overrides():
    doc = {"a": {"b": 1}}
    assert apply_override(doc, "a.b=2") == {"a": {"b": 2}}
    assert doc == {"a": {"b": 1}}
    for item in ("a.c=1", "z=1", "a.b.c=1", "a.b", "=3"):
        with pytest.raises(BadOverride):
            apply_override(doc, item)
    with pytest.raises(BadOverride):
        load_config("toy", ["multiclass.nonsense=1"])


def test_invalid_values():
    with pytest.raises(ConfigError):
        config_from_dict({"multiclass": {"loss": "L1"}})
    with pytest.raises(ConfigError):
        config_from_dict({"binary": {"optimizer": "Nadam"}})
    with pytest.raises(ConfigError):
        config_from_dict({"threshold": 1.5})
    with pytest.raises(ConfigError):
        config_from_dict({"normalize": "some"})
    with pytest.raises(BadModelConfig):
        config_from_dict({"multiclass": {"model": {"widths": [32, 16, 8]}}})
    assert config_from_dict({"multiclass": {"loss": "CE+DL"}}).multiclass.loss == "CE+DL"


def test_cli_reports_one_line_errors(tmp_path, capsys):
    status = main(["--set", "phantom.bogus=1", "phantom", str(tmp_path / "out")])
    assert status == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("gliomaseg: error BadOverride:")

    status = main(["evaluate", str(tmp_path / "missing.json"), str(tmp_path)])
    assert status == 3
    assert capsys.readouterr().err.startswith("gliomaseg: error IoFailure:")


def test_cli_phantom(tmp_path):
    out = tmp_path / "data"
    assert main(["--set", "phantom.dims=[16,16,12]", "phantom", str(out), "--count", "2"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert [c["case_id"] for c in manifest["cases"]] == ["phantom_000", "phantom_001"]
    assert manifest["label_encoding"]["4"] == 3


def test_cli_gradcheck(capsys):
    assert main(["gradcheck", "--check", "relu", "--check", "softmax_channels"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2 and all(line.endswith("ok") for line in lines)


def test_config_file_must_be_an_object(tmp_path, capsys):
    path = tmp_path / "list.json"
    path.write_text("[1, 2]")
    with pytest.raises(BadPreset):
        load_config(path)
    assert main(["--config", str(path), "phantom", str(tmp_path / "out")]) == 2
    assert capsys.readouterr().err.startswith("gliomaseg: error BadPreset:")


def test_roi_switch_changes_nothing_else():
    with_roi = load_config("toy").to_json()
    without = load_config("toy", ["multiclass.use_roi=false"]).to_json()
    assert with_roi["multiclass"].pop("use_roi") is True
    assert without["multiclass"].pop("use_roi") is False
    assert with_roi == without
