"""Storage adapter interface and implementations."""
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Optional

from src.settings import settings


class StorageAdapter(ABC):
    """Abstract storage adapter interface for text artifacts (families, traces, SVG)."""

    @abstractmethod
    def save(self, key: str, text: str) -> str:
        """
        Save text under key and return its path.

        Args:
            key: Storage key/path (e.g., "families/tight5.json")
            text: Content to write

        Returns:
            Path string
        """

    @abstractmethod
    def load(self, key: str) -> str:
        """
        Retrieve text stored under key.

        Raises:
            FileNotFoundError: if the key does not exist
        """

    @abstractmethod
    def exists(self, key: str) -> bool:
        """Check if key exists in storage."""

    @abstractmethod
    def append(self, key: str, text: str) -> None:
        """Append text to key, creating it if needed (line-delimited traces)."""


class LocalStorageAdapter(StorageAdapter):
    """Local filesystem storage; relative keys resolve against the base path."""

    def __init__(self, base_path: Optional[str] = None):
        self.base_path = Path(base_path or settings.STORAGE_BASE_PATH)

    def _get_full_path(self, key: str) -> Path:
        return self.base_path / key

    def save(self, key: str, text: str) -> str:
        full_path = self._get_full_path(key)
        full_path.parent.mkdir(parents=True, exist_ok=True)
        full_path.write_text(text, encoding="utf-8")
        return str(full_path)

    def load(self, key: str) -> str:
        full_path = self._get_full_path(key)
        if not full_path.exists():
            raise FileNotFoundError(f"Key not found: {key}")
        return full_path.read_text(encoding="utf-8")

    def exists(self, key: str) -> bool:
        return self._get_full_path(key).exists()

    def append(self, key: str, text: str) -> None:
        full_path = self._get_full_path(key)
        full_path.parent.mkdir(parents=True, exist_ok=True)
        with open(full_path, "a", encoding="utf-8") as f:
            f.write(text)


def get_storage_adapter(base_path: Optional[str] = None) -> StorageAdapter:
    """Factory function to get the storage adapter."""
    return LocalStorageAdapter(base_path)
