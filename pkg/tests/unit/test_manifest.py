"""Tests for dataset manifests."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from permsig.core.errors import ManifestError
from permsig.dataio.manifest import DatasetManifest, SubjectEntry, load_manifest, save_manifest


def touch(root: Path, *names: str) -> None:
    for name in names:
        path = root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("t,x,y\n0,0,0\n1,1,1\n", encoding="utf-8")


def write_manifest(path: Path, data: object) -> Path:
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


class TestDatasetManifest:
    """Tests for DatasetManifest."""

    def test_items_sorted_with_indices(self, tmp_path: Path) -> None:
        """Should list files by writer, label and index."""
        manifest = DatasetManifest(
            root=tmp_path,
            subjects=(
                SubjectEntry("s002", ("b.csv",), ()),
                SubjectEntry("s001", ("g1.csv", "g0.csv"), ("f0.csv",)),
            ),
        )
        keys = [item.key for item in manifest.items()]
        assert keys == [("s001", "forgery", 0), ("s001", "genuine", 0), ("s001", "genuine", 1), ("s002", "genuine", 0)]
        assert next(iter(manifest.items())).path == tmp_path / "f0.csv"
        assert len(manifest) == 4

    def test_duplicate_subject(self, tmp_path: Path) -> None:
        """Should reject a writer listed twice."""
        manifest = DatasetManifest(root=tmp_path, subjects=(SubjectEntry("s001"), SubjectEntry("s001")))
        with pytest.raises(ManifestError):
            manifest.validate(check_files=False)

    def test_file_listed_twice(self, tmp_path: Path) -> None:
        """Should reject a file shared by two writers."""
        manifest = DatasetManifest(
            root=tmp_path, subjects=(SubjectEntry("s001", ("a.csv",)), SubjectEntry("s002", (), ("./a.csv",)))
        )
        with pytest.raises(ManifestError):
            manifest.validate(check_files=False)

    def test_missing_file(self, tmp_path: Path) -> None:
        """Should reject files that do not exist."""
        manifest = DatasetManifest(root=tmp_path, subjects=(SubjectEntry("s001", ("gone.csv",)),))
        with pytest.raises(ManifestError):
            manifest.validate()

    def test_unknown_format(self, tmp_path: Path) -> None:
        """Should reject an unknown trace format."""
        with pytest.raises(ManifestError):
            DatasetManifest(root=tmp_path, fmt="binary").validate()  # type: ignore[arg-type]


class TestLoadManifest:
    """Tests for load_manifest and save_manifest."""

    def test_root_relative_to_manifest(self, tmp_path: Path) -> None:
        """Should resolve the root against the manifest's folder."""
        touch(tmp_path / "data", "s001/g0.csv", "s001/f0.csv")
        path = write_manifest(
            tmp_path / "manifest.json",
            {
                "format": "csv_txy",
                "root": "data",
                "subjects": [{"subject_id": "s001", "genuine_files": ["s001/g0.csv"], "forgery_files": ["s001/f0.csv"]}],
            },
        )
        manifest = load_manifest(path)
        assert manifest.root == tmp_path / "data"
        assert all(item.path.is_file() for item in manifest.items())

    def test_save_and_load(self, tmp_path: Path) -> None:
        """Should store the root relative to the manifest file."""
        touch(tmp_path, "s001/g0.csv")
        manifest = DatasetManifest(root=tmp_path, subjects=(SubjectEntry("s001", ("s001/g0.csv",)),), fmt="mcyt_like")
        path = save_manifest(manifest, tmp_path / "manifest.json")
        assert json.loads(path.read_text(encoding="utf-8"))["root"] == "."
        loaded = load_manifest(path)
        assert loaded.subjects == manifest.subjects
        assert loaded.fmt == "mcyt_like"

    @pytest.mark.parametrize(
        "content",
        [
            "{broken",
            "[]",
            json.dumps({"subjects": [{"genuine_files": []}]}),
            json.dumps({"subjects": [{"subject_id": "s001", "genuine_files": "g0.csv"}]}),
        ],
    )
    def test_malformed(self, tmp_path: Path, content: str) -> None:
        """Should reject invalid JSON, non-objects, missing ids and bare file names."""
        path = tmp_path / "manifest.json"
        path.write_text(content, encoding="utf-8")
        with pytest.raises(ManifestError):
            load_manifest(path)
