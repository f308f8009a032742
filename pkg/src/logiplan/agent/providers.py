"""Completion providers: where plan text comes from."""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

from ..errors import ProviderError

URL_ENV = "LOGIPLAN_LLM_URL"
KEY_ENV = "LOGIPLAN_LLM_KEY"


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.0
    max_tokens: int = 2048


class CompletionProvider(Protocol):
    def send(self, prompt: str, params: GenerationParams) -> str: ...


def prompt_key(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class HttpProvider:
    """POSTs ``{prompt, temperature, max_tokens}`` and expects ``{text}`` back."""

    def __init__(self, url: str | None = None, key: str | None = None, timeout: float = 120.0) -> None:
        self.url = url or os.environ.get(URL_ENV)
        self.key = key if key is not None else os.environ.get(KEY_ENV)
        self.timeout = timeout
        if not self.url:
            raise ProviderError(f"no completion endpoint configured; set {URL_ENV}")

    def send(self, prompt: str, params: GenerationParams) -> str:
        import httpx

        headers = {"Authorization": f"Bearer {self.key}"} if self.key else {}
        body = {"prompt": prompt, "temperature": params.temperature, "max_tokens": params.max_tokens}
        try:
            resp = httpx.post(self.url, json=body, headers=headers, timeout=self.timeout)
            resp.raise_for_status()
            text = resp.json()["text"]
        except (httpx.HTTPError, ValueError, KeyError, TypeError) as e:
            raise ProviderError(f"completion request failed: {e}") from e
        if not isinstance(text, str):
            raise ProviderError("completion response 'text' is not a string")
        return text


class ReplayProvider:
    """Serves canned responses from ``<dir>/<sha256(prompt)>.json``.

    With ``record`` set to another provider, misses are forwarded to it and saved.
    """

    def __init__(self, directory: str | Path, record: CompletionProvider | None = None) -> None:
        self.dir = Path(directory)
        self.record = record

    def path_for(self, prompt: str) -> Path:
        return self.dir / f"{prompt_key(prompt)}.json"

    def send(self, prompt: str, params: GenerationParams) -> str:
        path = self.path_for(prompt)
        if path.exists():
            try:
                return json.loads(path.read_text(encoding="utf-8"))["text"]
            except (ValueError, KeyError) as e:
                raise ProviderError(f"bad replay file {path}: {e}") from e
        if self.record is None:
            raise ProviderError(f"no replay entry for prompt {path.stem} in {self.dir}")
        text = self.record.send(prompt, params)
        self.save(prompt, text)
        return text

    def save(self, prompt: str, text: str) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        path = self.path_for(prompt)
        path.write_text(json.dumps({"prompt": prompt, "text": text}, indent=1), encoding="utf-8")
        return path


class RejectingProvider:
    """Always fails; for testing error paths."""

    def __init__(self, message: str = "provider unavailable") -> None:
        self.message = message

    def send(self, prompt: str, params: GenerationParams) -> str:
        raise ProviderError(self.message)


class ScriptedProvider:
    """Returns the given responses in order, then fails."""

    def __init__(self, responses: Iterable[str]) -> None:
        self.responses = list(responses)
        self.prompts: list[str] = []

    def send(self, prompt: str, params: GenerationParams) -> str:
        self.prompts.append(prompt)
        if len(self.prompts) > len(self.responses):
            raise ProviderError("scripted provider ran out of responses")
        return self.responses[len(self.prompts) - 1]


_QUERY = re.compile(r"<query>\n(.*?)\n</query>", re.S)


def _norm(text: str) -> str:
    return " ".join(text.split()).lower()


class PlanBookProvider:
    """Answers from a hand-written book of plans keyed by question text.

    The question is read back from the prompt's query section, so the book works
    with any template that keeps that section.
    """

    def __init__(self, book: dict[str, str | dict]) -> None:
        self.book = {_norm(q): (p if isinstance(p, str) else json.dumps(p)) for q, p in book.items()}

    @classmethod
    def load(cls, path: str | Path) -> "PlanBookProvider":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if isinstance(data, list):
            data = {e["question"]: e["plan"] for e in data}
        return cls(data)

    def send(self, prompt: str, params: GenerationParams) -> str:
        m = _QUERY.search(prompt)
        query = _norm(m.group(1) if m else prompt)
        # longest question first, so one question that contains another still matches itself
        for q, plan in sorted(self.book.items(), key=lambda kv: -len(kv[0])):
            if q in query:
                return plan
        raise ProviderError("no plan in the plan book for this query")
