import json
from pathlib import Path

import pytest

from app.config import RenderFormat, Settings, TruncationConfig, load_settings, read_config_file
from app.errors import ConfigError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("HYVIEW_PREFIX_LEN", "HYVIEW_RENDER_FORMAT", "HYVIEW_ROW_TOP_K"):
        monkeypatch.delenv(name, raising=False)


def _config(tmp_path, data) -> Path:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_defaults(settings):
    assert settings.render_format is RenderFormat.BEAUTIFIED_JSON
    assert settings.truncation() == TruncationConfig()
    assert settings.truncation().window == 10
    assert (settings.followup_budget, settings.repair_budget) == (1, 0)


def test_precedence(tmp_path, monkeypatch):
    """Flags beat the environment, which beats the config file"""
    path = _config(tmp_path, {"prefix_len": 2, "row_top_k": 7, "render_format": "raw"})
    monkeypatch.setenv("HYVIEW_PREFIX_LEN", "5")
    monkeypatch.setenv("HYVIEW_RENDER_FORMAT", "toon")
    settings = load_settings(path, render_format="beautified", row_top_k=None)
    assert settings.prefix_len == 5
    assert settings.row_top_k == 7
    assert settings.render_format is RenderFormat.BEAUTIFIED_JSON


@pytest.mark.parametrize(
    "content, message",
    [
        ('{"prefix_len": 2, "colour": "blue"}', "unknown config keys: colour"),
        ("[1, 2]", "flat JSON object"),
        ("{not json", "cannot read config file"),
    ],
)
def test_bad_config_files(tmp_path, content, message):
    path = tmp_path / "config.json"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ConfigError, match=message):
        read_config_file(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read config file"):
        load_settings(tmp_path / "absent.json")


def test_invalid_values():
    with pytest.raises(ConfigError, match="render_format"):
        load_settings(render_format="yaml")
    with pytest.raises(ConfigError, match="prefix_len \\+ suffix_len"):
        load_settings(prefix_len=0, suffix_len=0)
    with pytest.raises(ConfigError, match="invalid truncation settings"):
        Settings(_env_file=None, row_top_k=-1).truncation()
