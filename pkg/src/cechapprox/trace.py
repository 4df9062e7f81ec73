"""Simplex-count traces and the memory-cap abort shared by the run engines."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

TAGS = ("insert", "collapse")


@dataclass
class Trace:
    samples: list[tuple[float, int, str]] = field(default_factory=list)

    def record(self, scale: float, count: int, tag: str) -> None:
        if tag not in TAGS:
            raise ValueError(f"unknown trace tag {tag!r}")
        self.samples.append((float(scale), int(count), tag))

    def __len__(self):
        return len(self.samples)

    def final_count(self) -> int:
        return self.samples[-1][1] if self.samples else 0

    def peak(self) -> int:
        return max((c for _, c, _ in self.samples), default=0)

    def strict_decreases(self) -> int:
        return sum(1 for a, b in zip(self.samples, self.samples[1:]) if b[1] < a[1])

    def to_text(self) -> str:
        return "".join(f"{s!r},{c},{t}\n" for s, c, t in self.samples)

    @classmethod
    def from_text(cls, text: str) -> "Trace":
        tr = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected scale,count,tag, got {line!r}")
            tr.record(float(parts[0]), int(parts[1]), parts[2])
        return tr

    def write(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def read(cls, path) -> "Trace":
        return cls.from_text(Path(path).read_text())


class MemoryCapExceeded(RuntimeError):
    """The complex grew past the configured simplex budget.

    Carries the trace and the diagram up to the abort so callers can still
    report them.
    """

    def __init__(self, count: int, cap: int, scale: float, trace: Trace, diagram=None):
        super().__init__(f"simplex count {count} exceeded the cap {cap} at scale {scale:.6g}")
        self.count = count
        self.cap = cap
        self.scale = scale
        self.trace = trace
        self.diagram = diagram
