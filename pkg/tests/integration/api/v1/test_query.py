import asyncio
import inspect
import threading

import pytest
from httpx import AsyncClient

from app.main import app
from app.services.view_services import ViewService
from tests.factories import latency_records, node_records, wrap

LATENCY_INPUT = wrap("Latency samples (ms):\n", latency_records())


@pytest.mark.asyncio
async def test_query_aggregate(async_client: AsyncClient):
    response = await async_client.post(
        "/api/v1/query",
        json={"input": LATENCY_INPUT, "sql": "SELECT MAX(y) AS m, COUNT(*) AS n FROM data"},
    )
    assert response.status_code == 200
    data = response.json()
    assert data["columns"] == ["m", "n"]
    assert data["rows"] == [[293.0, 200]]
    assert data["tables"] == {"data": 200}


@pytest.mark.asyncio
async def test_query_child_table_join(async_client: AsyncClient):
    """Nested lists become child tables joined on parent_id"""
    sql = (
        "SELECT n.name, COUNT(*) AS disks FROM nodes n JOIN disks d ON d.parent_id = n._row_id "
        "GROUP BY n.name ORDER BY disks DESC, n.name LIMIT 1"
    )
    response = await async_client.post("/api/v1/query", json={"input": wrap("", node_records()), "sql": sql})
    assert response.status_code == 200
    assert response.json()["rows"] == [["node-02", 3]]


@pytest.mark.asyncio
async def test_query_anomaly_operator(async_client: AsyncClient):
    response = await async_client.post(
        "/api/v1/query",
        json={"input": LATENCY_INPUT, "sql": "SELECT DETECT_ANOMALY(data, y)"},
    )
    assert response.status_code == 200
    data = response.json()
    assert data["columns"] == ["anomaly_report"]
    assert data["rows"][0][0].startswith("Anomaly detected in data.y:")


@pytest.mark.asyncio
async def test_query_syntax_error_position(async_client: AsyncClient):
    sql = "SELECT x FROM data ORDER y"
    response = await async_client.post("/api/v1/query", json={"input": LATENCY_INPUT, "sql": sql})
    assert response.status_code == 400
    assert response.json()["position"] == len(sql) - 1


@pytest.mark.asyncio
@pytest.mark.parametrize(
    "sql, message",
    [
        ("SELECT * FROM samples", "unknown table 'samples'"),
        ("DROP TABLE data", "read-only"),
    ],
)
async def test_query_rejected(async_client: AsyncClient, sql, message):
    response = await async_client.post("/api/v1/query", json={"input": LATENCY_INPUT, "sql": sql})
    assert response.status_code == 400
    assert message in response.json()["detail"]


@pytest.mark.asyncio
async def test_query_requires_sql(async_client: AsyncClient):
    response = await async_client.post("/api/v1/query", json={"input": LATENCY_INPUT, "sql": ""})
    assert response.status_code == 422


@pytest.mark.asyncio
async def test_queries_do_not_block_each_other(async_client: AsyncClient, monkeypatch):
    """Two slow requests overlap; neither holds the event loop"""
    barrier = threading.Barrier(2, timeout=5)
    original = ViewService.query

    def rendezvous(self, request):
        barrier.wait()
        return original(self, request)

    monkeypatch.setattr(ViewService, "query", rendezvous)
    body = {"input": LATENCY_INPUT, "sql": "SELECT COUNT(*) FROM data"}
    first, second = await asyncio.gather(
        async_client.post("/api/v1/query", json=body),
        async_client.post("/api/v1/query", json=body),
    )
    assert first.status_code == second.status_code == 200
    assert first.json()["rows"] == second.json()["rows"] == [[200]]


def test_datastore_routes_are_sync():
    routes = [r for r in app.routes if getattr(r, "path", "").startswith("/api/v1/")]
    assert {r.path for r in routes} >= {"/api/v1/transform", "/api/v1/query", "/api/v1/backfill"}
    assert not any(inspect.iscoroutinefunction(r.endpoint) for r in routes)
