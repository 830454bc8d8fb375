from .base import LlmClient
from .http import HttpLlmClient
from .scripted import ScriptedLlmClient

__all__ = ["HttpLlmClient", "LlmClient", "ScriptedLlmClient"]
