"""Storage for enrolled per-writer models."""

from __future__ import annotations

import json
import logging
import threading
from collections import OrderedDict
from pathlib import Path
from urllib.parse import quote, unquote

from permsig.core.errors import ValidationError
from permsig.verification.ocsvm import OcSvmModel

logger = logging.getLogger(__name__)

MODEL_SUFFIX = ".model.json"


class ModelStore:
    """Thread-safe LRU cache of per-writer one-class models.

    The least recently used model is evicted once ``max_size`` is exceeded.

    Attributes:
        max_size: Maximum number of models kept in memory.
    """

    __slots__ = ("_lock", "_store", "max_size")

    def __init__(self, max_size: int = 256) -> None:
        """Initialize the store.

        Args:
            max_size: Maximum number of models to keep. Defaults to 256.
        """
        self._store: OrderedDict[str, OcSvmModel] = OrderedDict()
        self._lock = threading.Lock()
        self.max_size = max_size

    def store(self, subject_id: str, model: OcSvmModel) -> None:
        """Store the model of one writer, replacing any previous one."""
        with self._lock:
            if subject_id in self._store:
                self._store.move_to_end(subject_id)
            self._store[subject_id] = model

            while len(self._store) > self.max_size:
                evicted, _ = self._store.popitem(last=False)
                logger.debug("evicted model of %s", evicted)

    def get(self, subject_id: str) -> OcSvmModel | None:
        """Retrieve a model, or None if the writer is not enrolled."""
        with self._lock:
            model = self._store.get(subject_id)
            if model is not None:
                self._store.move_to_end(subject_id)
            return model

    def subjects(self) -> list[str]:
        """Enrolled writers, sorted."""
        with self._lock:
            return sorted(self._store)

    def clear(self) -> None:
        with self._lock:
            self._store.clear()

    def __contains__(self, subject_id: object) -> bool:
        with self._lock:
            return subject_id in self._store

    def __len__(self) -> int:
        with self._lock:
            return len(self._store)


class FileModelStore(ModelStore):
    """Model store backed by a directory with one JSON file per writer.

    Writes go to disk immediately; reads fall back to disk when the model is
    not cached.

    Attributes:
        directory: Folder holding the model files.
    """

    __slots__ = ("directory",)

    def __init__(self, directory: str | Path, max_size: int = 256) -> None:
        super().__init__(max_size)
        self.directory = Path(directory)

    def path_for(self, subject_id: str) -> Path:
        return self.directory / f"{quote(subject_id, safe='')}{MODEL_SUFFIX}"

    def store(self, subject_id: str, model: OcSvmModel) -> None:
        """Store a model and write it to ``<directory>/<subject>.model.json``."""
        super().store(subject_id, model)
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(subject_id)
        path.write_text(json.dumps(model.to_dict(), indent=2) + "\n", encoding="utf-8")
        logger.debug("wrote model of %s to %s", subject_id, path)

    def get(self, subject_id: str) -> OcSvmModel | None:
        """Retrieve a model from memory, then from disk.

        Raises:
            ValidationError: If the file exists but is not a valid model.
        """
        cached = super().get(subject_id)
        if cached is not None:
            return cached
        path = self.path_for(subject_id)
        if not path.exists():
            return None
        try:
            model = OcSvmModel.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except (json.JSONDecodeError, UnicodeDecodeError, KeyError, TypeError) as e:
            msg = f"{path}: not a valid model file ({e})"
            raise ValidationError(msg) from e
        super().store(subject_id, model)
        return model

    def subjects(self) -> list[str]:
        """Writers with a model on disk or in memory, sorted."""
        on_disk = set()
        if self.directory.is_dir():
            on_disk = {unquote(p.name[: -len(MODEL_SUFFIX)]) for p in self.directory.glob(f"*{MODEL_SUFFIX}")}
        return sorted(on_disk | set(super().subjects()))

    def clear(self) -> None:
        """Forget every model and delete the model files."""
        super().clear()
        if self.directory.is_dir():
            for path in self.directory.glob(f"*{MODEL_SUFFIX}"):
                path.unlink()
