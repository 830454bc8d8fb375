import logging
from pathlib import Path
from typing import AsyncGenerator

import pytest
import pytest_asyncio
from httpx import AsyncClient, ASGITransport

from app.config import Settings, TruncationConfig, get_settings
from app.engines.duckdb.relationalize import build_datastore
from tests import factories


@pytest.fixture
def fixtures_dir() -> Path:
    return factories.FIXTURES_DIR


@pytest.fixture
def settings() -> Settings:
    """Default settings, isolated from HYVIEW_* variables of the host."""
    return Settings(_env_file=None)


@pytest.fixture
def cfg() -> TruncationConfig:
    return TruncationConfig()


@pytest.fixture
def card_store(cfg):
    store = build_datastore([factories.card_payload()], cfg)
    yield store
    store.close()


@pytest.fixture
def latency_store(cfg):
    store = build_datastore([factories.latency_records()], cfg)
    yield store
    store.close()


@pytest.fixture
def forex_store(cfg):
    store = build_datastore([factories.forex_payload()], cfg)
    yield store
    store.close()


@pytest.fixture
def node_store(cfg):
    store = build_datastore([factories.node_records()], cfg)
    yield store
    store.close()


@pytest.fixture(autouse=True)
def restore_root_logging():
    """setup_logging replaces root handlers; put them back after each test."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers = handlers
    root.setLevel(level)


@pytest_asyncio.fixture
async def async_client(settings) -> AsyncGenerator[AsyncClient, None]:
    from app.main import app

    app.dependency_overrides[get_settings] = lambda: settings
    async with AsyncClient(transport=ASGITransport(app=app), base_url="http://test") as client:
        yield client
    app.dependency_overrides.clear()
