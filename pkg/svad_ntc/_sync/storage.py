from __future__ import annotations

import os
import tempfile
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, Optional, Union


class SyncSupportedStorage(ABC):
    @abstractmethod
    def get_item(self, key: str) -> Optional[bytes]: ...  # pragma: no cover

    @abstractmethod
    def set_item(self, key: str, value: bytes) -> None: ...  # pragma: no cover

    @abstractmethod
    def remove_item(self, key: str) -> None: ...  # pragma: no cover


class SyncMemoryStorage(SyncSupportedStorage):
    def __init__(self):
        self.storage: Dict[str, bytes] = {}

    def get_item(self, key: str) -> Optional[bytes]:
        if key in self.storage:
            return self.storage[key]

    def set_item(self, key: str, value: bytes) -> None:
        self.storage[key] = bytes(value)

    def remove_item(self, key: str) -> None:
        if key in self.storage:
            del self.storage[key]


class SyncFileStorage(SyncSupportedStorage):
    """
    Keys are file paths, relative to `root` when one is given. Writes go to a
    temporary file in the target directory which then replaces the target.
    """

    def __init__(self, root: Optional[Union[str, Path]] = None):
        self.root = Path(root) if root is not None else None

    def _path(self, key: str) -> Path:
        return self.root / key if self.root is not None else Path(key)

    def get_item(self, key: str) -> Optional[bytes]:
        path = self._path(key)
        if not path.is_file():
            return None
        return path.read_bytes()

    def set_item(self, key: str, value: bytes) -> None:
        path = self._path(key)
        directory = path.parent if str(path.parent) else Path(".")
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(value)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def remove_item(self, key: str) -> None:
        path = self._path(key)
        if path.is_file():
            path.unlink()
