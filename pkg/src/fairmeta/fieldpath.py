"""Dotted paths addressing fields inside templates and records."""

from __future__ import annotations

import re
from dataclasses import dataclass

MACHINE_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def is_machine_name(name: str) -> bool:
    return bool(MACHINE_NAME_RE.match(name))


@dataclass(frozen=True, order=True)
class FieldPath:
    """Ordered machine-name segments, rendered dotted (``person.contact.email``)."""

    segments: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("field path must have at least one segment")
        for seg in self.segments:
            if not is_machine_name(seg):
                raise ValueError(f"invalid machine name in field path: {seg!r}")

    @classmethod
    def of(cls, *segments: str) -> FieldPath:
        return cls(tuple(segments))

    @classmethod
    def parse(cls, dotted: str) -> FieldPath:
        return cls(tuple(dotted.split(".")))

    @property
    def dotted(self) -> str:
        return ".".join(self.segments)

    @property
    def leaf(self) -> str:
        return self.segments[-1]

    def child(self, name: str) -> FieldPath:
        return FieldPath(self.segments + (name,))

    def is_under(self, prefix: FieldPath) -> bool:
        n = len(prefix.segments)
        return len(self.segments) > n and self.segments[:n] == prefix.segments

    def __str__(self) -> str:
        return self.dotted
