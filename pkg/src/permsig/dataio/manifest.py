"""Dataset manifests: which trace files belong to which writer and label.

A manifest is a JSON document::

    {
      "format": "csv_txy",
      "root": ".",
      "subjects": [
        {"subject_id": "s001", "genuine_files": ["s001/g00.csv"], "forgery_files": ["s001/f00.csv"]}
      ]
    }

``root`` is resolved relative to the manifest file, and file names relative
to ``root``.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from permsig.core.errors import ManifestError
from permsig.core.models import Label
from permsig.dataio.traces import TRACE_FORMATS, TraceFormat

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubjectEntry:
    """Trace files of one writer.

    Attributes:
        subject_id: Writer identifier.
        genuine_files: Genuine trace paths relative to the manifest root.
        forgery_files: Forgery trace paths relative to the manifest root.
    """

    subject_id: str
    genuine_files: tuple[str, ...] = ()
    forgery_files: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject_id": self.subject_id,
            "genuine_files": list(self.genuine_files),
            "forgery_files": list(self.forgery_files),
        }


@dataclass(frozen=True)
class ManifestItem:
    """One trace file with its metadata."""

    subject_id: str
    label: Label
    sample_index: int
    path: Path

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.subject_id, self.label, self.sample_index)


@dataclass(frozen=True)
class DatasetManifest:
    """All trace files of a dataset.

    Attributes:
        root: Directory the file names are relative to.
        subjects: One entry per writer.
        fmt: Trace file layout.
    """

    root: Path
    subjects: tuple[SubjectEntry, ...] = field(default_factory=tuple)
    fmt: TraceFormat = "csv_txy"

    def items(self) -> Iterator[ManifestItem]:
        """Every listed file, in sorted (subject, label, index) order."""
        collected = []
        for entry in self.subjects:
            for label, files in (("genuine", entry.genuine_files), ("forgery", entry.forgery_files)):
                collected.extend(
                    ManifestItem(entry.subject_id, label, index, self.root / name)  # type: ignore[arg-type]
                    for index, name in enumerate(files)
                )
        yield from sorted(collected, key=lambda item: item.key)

    def __len__(self) -> int:
        return sum(len(e.genuine_files) + len(e.forgery_files) for e in self.subjects)

    def validate(self, *, check_files: bool = True) -> DatasetManifest:
        """Check the manifest for duplicates and missing files.

        Raises:
            ManifestError: On an unknown format, a repeated writer, a file listed
                twice, or (with ``check_files``) a missing file.
        """
        if self.fmt not in TRACE_FORMATS:
            msg = f"unknown trace format {self.fmt!r}; expected one of {TRACE_FORMATS}"
            raise ManifestError(msg)
        seen_subjects: set[str] = set()
        seen_files: dict[Path, str] = {}
        for entry in self.subjects:
            if not entry.subject_id:
                msg = "subject_id must be non-empty"
                raise ManifestError(msg)
            if entry.subject_id in seen_subjects:
                msg = f"subject {entry.subject_id!r} is listed twice"
                raise ManifestError(msg)
            seen_subjects.add(entry.subject_id)
            for name in (*entry.genuine_files, *entry.forgery_files):
                resolved = (self.root / name).resolve()
                if resolved in seen_files:
                    msg = f"file {name!r} of subject {entry.subject_id!r} is already listed by {seen_files[resolved]!r}"
                    raise ManifestError(msg)
                seen_files[resolved] = entry.subject_id
        if check_files:
            missing = [str(path) for path in seen_files if not path.is_file()]
            if missing:
                msg = f"{len(missing)} listed file(s) do not exist, e.g. {missing[0]}"
                raise ManifestError(msg)
        return self

    def to_dict(self, root: str | None = None) -> dict[str, Any]:
        return {
            "format": self.fmt,
            "root": root if root is not None else str(self.root),
            "subjects": [entry.to_dict() for entry in self.subjects],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any], base: Path | None = None) -> DatasetManifest:
        """Build a manifest from parsed JSON.

        Raises:
            ManifestError: If required keys are missing or mistyped.
        """
        try:
            root = Path(data.get("root", "."))
            if base is not None and not root.is_absolute():
                root = base / root
            subjects = tuple(
                SubjectEntry(
                    subject_id=str(item["subject_id"]),
                    genuine_files=_names(item.get("genuine_files", [])),
                    forgery_files=_names(item.get("forgery_files", [])),
                )
                for item in data.get("subjects", [])
            )
        except (KeyError, TypeError, AttributeError) as e:
            msg = f"malformed manifest: {e}"
            raise ManifestError(msg) from e
        return cls(root=root, subjects=subjects, fmt=data.get("format", "csv_txy"))


def _names(value: Any) -> tuple[str, ...]:
    if isinstance(value, str) or not isinstance(value, Sequence):
        msg = f"file list must be a list of names, got {value!r}"
        raise ManifestError(msg)
    return tuple(str(name) for name in value)


def load_manifest(path: str | Path, *, check_files: bool = True) -> DatasetManifest:
    """Read and validate a manifest file.

    Raises:
        ManifestError: If the file is not valid JSON or fails validation.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        msg = f"{path}: invalid JSON ({e})"
        raise ManifestError(msg) from e
    if not isinstance(data, dict):
        msg = f"{path}: manifest must be a JSON object"
        raise ManifestError(msg)
    manifest = DatasetManifest.from_dict(data, base=path.parent).validate(check_files=check_files)
    logger.debug("loaded manifest %s: %d subjects, %d files", path, len(manifest.subjects), len(manifest))
    return manifest


def save_manifest(manifest: DatasetManifest, path: str | Path) -> Path:
    """Write a manifest; the root is stored relative to the manifest file when possible."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        root = str(manifest.root.resolve().relative_to(path.parent.resolve()))
    except ValueError:
        root = str(manifest.root)
    path.write_text(json.dumps(manifest.to_dict(root=root), indent=2) + "\n", encoding="utf-8")
    return path
