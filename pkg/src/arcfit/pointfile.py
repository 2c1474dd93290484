"""Text format for points and polylines: one `x y` pair per line, whitespace
separated, lines starting with `#` are comments."""

from __future__ import annotations

from pathlib import Path

__all__ = ["parse_points", "read_points", "write_points"]


def parse_points(text: str) -> list[tuple[float, float]]:
    points = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'x y', got {raw!r}")
        try:
            points.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return points


def read_points(path) -> list[tuple[float, float]]:
    return parse_points(Path(path).read_text(encoding="utf-8"))


def write_points(path, points) -> None:
    lines = [f"{float(x)!r} {float(y)!r}" for x, y in points]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
