"""Short-term session memory."""

from __future__ import annotations

from collections import deque
from typing import Iterator


class SessionHistory:
    """The last ``capacity`` (query, answer) turns; the oldest turn is dropped first."""

    def __init__(self, capacity: int = 10) -> None:
        if capacity < 1:
            raise ValueError("history capacity must be at least 1")
        self.capacity = capacity
        self._turns: deque[tuple[str, str]] = deque(maxlen=capacity)

    def append(self, query: str, answer: str) -> "SessionHistory":
        self._turns.append((query, answer))
        return self

    def __len__(self) -> int:
        return len(self._turns)

    def __iter__(self) -> Iterator[tuple[str, str]]:
        return iter(self._turns)

    def turns(self) -> list[tuple[str, str]]:
        return list(self._turns)


def history_append(h: SessionHistory, query: str, answer: str) -> SessionHistory:
    return h.append(query, answer)
