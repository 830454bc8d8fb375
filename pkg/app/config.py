"""
Runtime configuration.

Values resolve as: explicit overrides (CLI flags, API bodies) > environment
(`HYVIEW_*`, optionally from `.env`) > flat JSON config file > defaults.
"""
import json
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, SecretStr, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.errors import ConfigError


class RenderFormat(str, Enum):
    BEAUTIFIED_JSON = "beautified"
    RAW_JSON = "raw"
    TOON = "toon"


class TruncationConfig(BaseModel):
    """Subset-selection knobs shared by the views and the datastore."""

    model_config = ConfigDict(frozen=True)

    prefix_len: int = Field(3, ge=0, description="Items always kept from the head of a list")
    suffix_len: int = Field(3, ge=0, description="Items always kept from the tail of a list")
    ranked_extra: int = Field(4, ge=0, description="Extra middle items picked by relevance")
    row_top_k: int = Field(20, ge=0, description="Rows shown in the row view across all tables")
    max_leaf_len: int = Field(256, ge=0, description="Longest string leaf allowed inside a consistent list")
    min_table_rows: int = Field(3, ge=0, description="Minimum list length promoted to a table")

    @model_validator(mode="after")
    def _window_not_empty(self) -> "TruncationConfig":
        if self.prefix_len + self.suffix_len < 1:
            raise ValueError("prefix_len + suffix_len must be at least 1")
        return self

    @property
    def window(self) -> int:
        """Longest list rendered without truncation."""
        return self.prefix_len + self.suffix_len + self.ranked_extra


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="HYVIEW_",
        env_file=".env",
        extra="ignore",
    )

    log_level: str = Field("INFO", description="Root logging level")
    log_file: Optional[str] = Field(None, description="Rotating log file name under logs/")

    render_format: RenderFormat = Field(RenderFormat.BEAUTIFIED_JSON, description="Column view rendering")
    prefix_len: int = 3
    suffix_len: int = 3
    ranked_extra: int = 4
    row_top_k: int = 20
    max_leaf_len: int = 256
    min_table_rows: int = 3
    coverage_threshold: float = Field(0.9, ge=0.0, le=1.0)
    evidence_row_cap: int = Field(200, ge=1)

    followup_budget: int = Field(1, ge=0, description="Follow-up LLM calls per request")
    repair_budget: int = Field(0, ge=0, description="SQL repair LLM calls per request")

    llm_base_url: str = Field("https://api.openai.com/v1", description="Chat-completions base URL")
    llm_model: str = Field("gpt-4.1", description="Model name sent with every request")
    llm_api_key: Optional[SecretStr] = Field(None, description="Bearer token for the LLM endpoint")
    llm_timeout: float = Field(60.0, gt=0, description="Total request timeout in seconds")
    native_tools: bool = Field(True, description="Send the tools array; contracts stay in the prompt either way")

    def truncation(self) -> TruncationConfig:
        try:
            return TruncationConfig(
                prefix_len=self.prefix_len,
                suffix_len=self.suffix_len,
                ranked_extra=self.ranked_extra,
                row_top_k=self.row_top_k,
                max_leaf_len=self.max_leaf_len,
                min_table_rows=self.min_table_rows,
            )
        except ValidationError as e:
            raise ConfigError(f"invalid truncation settings: {e.errors()[0]['msg']}") from e


def read_config_file(path: Path) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a flat JSON object")
    unknown = sorted(set(data) - set(Settings.model_fields))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return data


def load_settings(config_file: Optional[Path] = None, **overrides: Any) -> Settings:
    """
    Build settings honouring flags > env > config file > defaults.
    Overrides set to None are ignored so argparse defaults can be passed through.
    """
    try:
        from_env = Settings()
        values: dict[str, Any] = {}
        if config_file is not None:
            file_values = read_config_file(config_file)
            values.update({k: v for k, v in file_values.items() if k not in from_env.model_fields_set})
        values.update({k: v for k, v in overrides.items() if v is not None})
        settings = Settings(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid settings: {e.errors()[0]['loc']}: {e.errors()[0]['msg']}") from e
    settings.truncation()
    return settings


@lru_cache
def get_settings() -> Settings:
    return load_settings()
