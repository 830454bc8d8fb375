import json

import pytest
import pytest_asyncio
from aiohttp import web
from aiohttp.test_utils import TestServer
from pydantic import SecretStr

from app.engines.llm.http import HttpLlmClient, parse_completion
from app.errors import ConfigError, LlmTransportError
from app.schemas.v1.llm import ChatMessage

COMPLETION = {
    "choices": [{"message": {
        "role": "assistant",
        "content": None,
        "tool_calls": [{"id": "call_1", "type": "function", "function": {
            "name": "QueryDatastore", "arguments": '{"queries": ["SELECT 1"]}',
        }}],
    }}],
    "usage": {"prompt_tokens": 900, "completion_tokens": 20, "total_tokens": 920, "cached_tokens": 0},
}


@pytest_asyncio.fixture
async def endpoint():
    """Local chat-completions endpoint recording every request body"""
    received = []

    async def completions(request: web.Request) -> web.Response:
        received.append((request.headers.get("Authorization"), await request.json()))
        if request.app["status"] != 200:
            return web.Response(status=request.app["status"], text="rate limited")
        return web.json_response(COMPLETION)

    app = web.Application()
    app["status"] = 200
    app.router.add_post("/v1/chat/completions", completions)
    server = TestServer(app)
    await server.start_server()
    yield str(server.make_url("/v1")), app, received
    await server.close()


@pytest.mark.asyncio
async def test_send_posts_chat_completion(endpoint):
    url, _, received = endpoint
    client = HttpLlmClient(base_url=url + "/", model="gpt-test", api_key="sk-test")
    tools = [{"type": "function", "function": {"name": "QueryDatastore"}}]
    try:
        response = await client.send([ChatMessage(role="user", content="hi")], tools)
    finally:
        await client.close()
    auth, body = received[0]
    assert auth == "Bearer sk-test"
    assert body == {"model": "gpt-test", "messages": [{"role": "user", "content": "hi"}], "tools": tools}
    assert response.tool_calls[0].name == "QueryDatastore"
    assert response.usage.prompt_tokens == 900
    assert client.call_count == 1


@pytest.mark.asyncio
async def test_tools_omitted_when_native_tools_disabled(endpoint):
    url, _, received = endpoint
    client = HttpLlmClient(base_url=url, model="m", api_key="k", native_tools=False)
    try:
        await client.send([ChatMessage(role="user", content="hi")], [{"type": "function"}])
    finally:
        await client.close()
    assert "tools" not in received[0][1]


@pytest.mark.asyncio
async def test_error_status_raises_transport_error(endpoint):
    url, app, _ = endpoint
    app["status"] = 429
    client = HttpLlmClient(base_url=url, model="m", api_key="k")
    try:
        with pytest.raises(LlmTransportError, match="returned 429: rate limited") as e:
            await client.send([ChatMessage(role="user", content="hi")])
    finally:
        await client.close()
    assert e.value.status == 429


@pytest.mark.asyncio
async def test_unreachable_endpoint():
    client = HttpLlmClient(base_url="http://127.0.0.1:9", model="m", api_key="k", timeout=2)
    try:
        with pytest.raises(LlmTransportError):
            await client.send([ChatMessage(role="user", content="hi")])
    finally:
        await client.close()


def test_api_key_required(settings):
    with pytest.raises(ConfigError, match="API key"):
        HttpLlmClient.from_settings(settings)


def test_from_settings(settings):
    client = HttpLlmClient.from_settings(settings.model_copy(update={"llm_api_key": SecretStr("sk-x")}))
    assert client.url == "https://api.openai.com/v1/chat/completions"
    assert client.model == "gpt-4.1"


def test_parse_completion():
    response = parse_completion(json.loads(json.dumps(COMPLETION)))
    assert response.content is None
    assert response.tool_calls[0].id == "call_1"
    assert response.tool_calls[0].arguments == '{"queries": ["SELECT 1"]}'
    assert parse_completion({"choices": [{"message": {"content": "ok"}}]}).text == "ok"


def test_parse_completion_rejects_bad_payload():
    with pytest.raises(LlmTransportError, match="unexpected completion payload"):
        parse_completion({"error": {"message": "bad"}})
