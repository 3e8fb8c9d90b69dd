"""Append-only on-disk store for computed moments.

One line per value: ``spec-key<TAB>digits<TAB>working<TAB>decimal``. The
decimal string has enough digits to reproduce the binary value exactly at
the working precision, so cached and fresh results are bit-identical.
Readers tolerate (and skip) damaged lines; writers hold a file lock.
"""
from __future__ import annotations

import logging
import os
import threading
import warnings
from pathlib import Path

import mpmath
import platformdirs
from filelock import FileLock
from mpmath.libmp import repr_dps, to_str

__all__ = ["MomentStore", "default_cache_dir"]

log = logging.getLogger(__name__)

FILENAME = "moments.tsv"


def default_cache_dir() -> Path:
    return Path(platformdirs.user_cache_dir("besselmoments"))


class MomentStore:
    """Moment values keyed by ``(spec key, target digits, working digits)``.

    >>> import tempfile
    >>> store = MomentStore(tempfile.mkdtemp())
    >>> with mpmath.workdps(40):
    ...     third = mpmath.mpf(1) / 3
    ...     store.put("1;4,0,0,0", 10, 40, third)
    >>> MomentStore(store.directory).get("1;4,0,0,0", 10, 40) == third
    True
    """

    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()
        self.path = self.directory / FILENAME
        self._lock = FileLock(str(self.path) + ".lock")
        self._mutex = threading.Lock()
        self._values: dict | None = None
        self._size = 0

    def _refresh(self):
        # re-read only what other writers appended since the last look
        try:
            size = self.path.stat().st_size
        except FileNotFoundError:
            self._values = {} if self._values is None else self._values
            return
        if self._values is not None and size == self._size:
            return
        if self._values is None or size < self._size:
            self._values, self._size = {}, 0
        with open(self.path, "rb") as fh:
            fh.seek(self._size)
            chunk = fh.read()
        # an unterminated tail belongs to a writer still in progress
        end = chunk.rfind(b"\n") + 1
        for lineno, raw in enumerate(chunk[:end].splitlines(), 1):
            self._parse(raw, lineno)
        self._size += end

    def _parse(self, raw: bytes, lineno: int):
        try:
            key, digits, working, text = raw.decode("utf-8").split("\t")
            digits, working = int(digits), int(working)
            with mpmath.workdps(working):
                value = mpmath.mpf(text)
        except (ValueError, UnicodeDecodeError):
            warnings.warn(f"{self.path}: skipping corrupt cache line {raw[:60]!r}", stacklevel=3)
            return
        self._values[(key, digits, working)] = value

    def get(self, key: str, digits: int, working: int):
        with self._mutex:
            self._refresh()
            return self._values.get((key, digits, working))

    def put(self, key: str, digits: int, working: int, value) -> None:
        with mpmath.workdps(working):
            value = mpmath.mpf(value)
            text = to_str(value._mpf_, repr_dps(mpmath.mp.prec))
        line = f"{key}\t{digits}\t{working}\t{text}\n"
        with self._mutex:
            self.directory.mkdir(parents=True, exist_ok=True)
            with self._lock:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(line)
            if self._values is not None:
                self._values[(key, digits, working)] = value
        log.debug("cached %s at %d digits", key, digits)

    def __len__(self):
        with self._mutex:
            self._refresh()
            return len(self._values)
