"""Test file loaders."""

from pathlib import Path

import numpy as np
import pytest

from sewsim.calibration_utils.file_loaders import load_csv, load_file, load_json, load_toml, parse_json
from sewsim.errors import ConfigSyntaxError, SchemaError

dir_path = Path(__file__).parent.absolute()


def test_load_json():
    """Test load_json with mappings."""
    params = load_json(
        dir_path / "params_template.json",
        mappings={"rate": 0.01, "names": ["bau", "wtr", "all_three"]},
    )
    assert np.allclose(params["growth"], 1.01**10)
    assert params["names"] == ["bau", "wtr", "all_three"]


def test_load_file():
    """Test load_file with and without mappings."""
    file_content = load_file(dir_path / "text_template", mappings={"name": "bau", "start": 2020})
    assert file_content == "Scenario bau starts in 2020"
    assert load_file(dir_path / "text_template") == "Scenario {{ name }} starts in {{ start }}"


def test_missing_file():
    """Test loading a file that doesn't exist."""
    with pytest.raises(FileNotFoundError):
        load_json(dir_path / "does_not_exist.json")


def test_parse_json_errors():
    """Test syntax errors carry their position and non-object documents are rejected."""
    with pytest.raises(ConfigSyntaxError) as e:
        parse_json('{\n  "name": ,\n}', "broken.json")
    assert e.value.path == "broken.json"
    assert e.value.line == 2
    with pytest.raises(SchemaError, match="top-level value must be a JSON object"):
        parse_json("[1, 2]")


def test_load_csv(tmp_path: Path):
    """Test headers are stripped and required columns checked."""
    table_path = tmp_path / "labour.csv"
    table_path.write_text("sector , hours_per_eur\nenergy, 0.0064\n", encoding="utf-8")
    table = load_csv(table_path, ["sector", "hours_per_eur"])
    assert list(table.columns) == ["sector", "hours_per_eur"]
    assert table["hours_per_eur"].iloc[0] == pytest.approx(0.0064)
    with pytest.raises(SchemaError, match="missing column") as e:
        load_csv(table_path, ["sector", "unit"])
    assert e.value.field == "labour.csv:unit"


def test_load_toml(tmp_path: Path):
    """Test toml syntax errors."""
    manifest = tmp_path / "calibration.toml"
    manifest.write_text("[bundle]\nextend = \n", encoding="utf-8")
    with pytest.raises(ConfigSyntaxError):
        load_toml(manifest)
