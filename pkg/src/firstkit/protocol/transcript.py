"""Append-only log of every message exchanged between actors."""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import asdict, dataclass
from typing import Iterator, TextIO


@dataclass(frozen=True)
class TranscriptEntry:
    seq: int
    direction: str
    sender: str
    receiver: str
    kind: str
    payload_hash: str


class Transcript:
    """One record per message; payload bytes are kept in memory only.

    ``to_jsonl`` writes the self-describing records (no payloads), which is
    what the CLI ``--transcript`` flag emits.
    """

    def __init__(self):
        self.entries: list[TranscriptEntry] = []
        self.payloads: list[bytes] = []
        self._lock = threading.Lock()

    def record(self, sender: str, receiver: str, kind: str, payload: bytes) -> None:
        direction = f"{_role(sender)}->{_role(receiver)}"
        with self._lock:
            self.entries.append(TranscriptEntry(len(self.entries), direction, sender, receiver,
                                                kind, hashlib.sha256(payload).hexdigest()))
            self.payloads.append(bytes(payload))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[TranscriptEntry]:
        return iter(self.entries)

    def seen_by(self, *roles: str) -> list[bytes]:
        """Payloads delivered to any actor whose role is in ``roles``."""
        return [p for e, p in zip(self.entries, self.payloads) if _role(e.receiver) in roles]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(asdict(e), sort_keys=True) + "\n" for e in self.entries)

    def write(self, fh: TextIO) -> None:
        fh.write(self.to_jsonl())


def _role(actor: str) -> str:
    return actor.split(":", 1)[0]
