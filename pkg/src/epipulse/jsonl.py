"""Line-oriented JSON I/O helpers used by the CLI."""

from __future__ import annotations

import json
import sys
from contextlib import contextmanager
from itertools import islice
from pathlib import Path
from typing import IO, Iterable, Iterator, Union

PathLike = Union[str, Path]


@contextmanager
def open_in(path: PathLike):
    """Open a text input; '-' means stdin."""
    if str(path) == "-":
        yield sys.stdin
    else:
        with open(path, "r", encoding="utf-8") as fh:
            yield fh


@contextmanager
def open_out(path: PathLike):
    """Open a text output; '-' means stdout."""
    if str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def iter_jsonl(fh: IO[str], source: str = "<input>") -> Iterator[dict]:
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise ValueError(f"{source}:{lineno}: invalid JSON ({e})") from None
        if not isinstance(rec, dict):
            raise ValueError(f"{source}:{lineno}: expected a JSON object")
        yield rec


def read_jsonl(path: PathLike) -> list[dict]:
    with open_in(path) as fh:
        return list(iter_jsonl(fh, source=str(path)))


def dump_line(rec: dict) -> str:
    return json.dumps(rec, ensure_ascii=False, separators=(",", ":"), sort_keys=True)


def write_jsonl(fh: IO[str], records: Iterable[dict]) -> None:
    for rec in records:
        fh.write(dump_line(rec))
        fh.write("\n")


def chunked(iterable: Iterable, size: int) -> Iterator[list]:
    it = iter(iterable)
    while True:
        block = list(islice(it, size))
        if not block:
            return
        yield block
