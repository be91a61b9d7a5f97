"""Integration tests for the permsig command line."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest
from pytest_mock import MockerFixture

import permsig.cli
from permsig import __version__
from permsig.cli import EXIT_FATAL, EXIT_OK, EXIT_PARTIAL, main
from permsig.core.models import FeatureVector
from permsig.dataio.features import load_features
from permsig.dataio.storage import FileModelStore

pytestmark = pytest.mark.integration

SYNTH_ARGS = ["--subjects", "3", "--genuine", "8", "--forgeries", "4", "--seed", "7"]
FEATURE_ARGS = ["--dimension", "3", "--resample-length", "800"]


@pytest.fixture(scope="module")
def corpus(tmp_path_factory: pytest.TempPathFactory) -> Path:
    """Create a small synthetic corpus and return its manifest."""
    out = tmp_path_factory.mktemp("corpus")
    assert main(["synth", "--out", str(out), *SYNTH_ARGS]) == EXIT_OK
    return out / "manifest.json"


@pytest.fixture(scope="module")
def features_csv(corpus: Path, tmp_path_factory: pytest.TempPathFactory) -> Path:
    """Create the feature table of the small corpus."""
    path = tmp_path_factory.mktemp("features") / "features.csv"
    assert main(["features", str(corpus), "--out", str(path), *FEATURE_ARGS]) == EXIT_OK
    return path


@pytest.fixture
def classes_json(tmp_path: Path) -> Path:
    """Create a class file with two writer classes."""
    path = tmp_path / "classes.json"
    path.write_text(json.dumps({"s001": "A", "s002": "A", "s003": "B"}), encoding="utf-8")
    return path


def read_rows(path: Path) -> list[dict[str, str]]:
    with path.open(encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


class TestTopLevel:
    """Tests for options shared by every command."""

    def test_version(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Should print the package version and exit cleanly."""
        with pytest.raises(SystemExit) as excinfo:
            main(["--version"])
        assert excinfo.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_command_required(self) -> None:
        """Should refuse to run without a command."""
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code != 0

    def test_missing_input(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Should report a missing manifest as a fatal error."""
        assert main(["features", str(tmp_path / "nope.json")]) == EXIT_FATAL
        assert "Error:" in capsys.readouterr().err


class TestSynthAndFeatures:
    """Tests for the synth and features commands."""

    def test_synth_layout(self, corpus: Path) -> None:
        """Should write a manifest beside one folder per writer."""
        assert corpus.is_file()
        assert sorted(p.name for p in corpus.parent.iterdir() if p.is_dir()) == ["s001", "s002", "s003"]

    def test_seed_from_environment(self, tmp_path: Path, corpus: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        """Should take the seed from PERMSIG_SEED when --seed is absent."""
        monkeypatch.setenv("PERMSIG_SEED", "7")
        args = [arg for arg in SYNTH_ARGS if arg not in ("--seed", "7")]
        assert main(["synth", "--out", str(tmp_path), *args]) == EXIT_OK
        relative = Path("s002") / "g005.csv"
        assert (tmp_path / relative).read_bytes() == (corpus.parent / relative).read_bytes()

    def test_features_match_library(
        self, features_csv: Path, small_features: tuple[FeatureVector, ...]
    ) -> None:
        """Should write the same vectors the library computes in memory."""
        assert load_features(features_csv) == list(small_features)

    def test_features_json_to_stdout(self, corpus: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Should print a JSON document carrying the settings."""
        assert main(["features", str(corpus), "--format", "json", *FEATURE_ARGS]) == EXIT_OK
        document = json.loads(capsys.readouterr().out)
        assert document["ordinal"]["embedding_dimension"] == 3
        assert document["resample_length"] == 800

    def test_broken_trace_is_partial(
        self, tmp_path: Path, corpus: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Should keep going past an unreadable trace and exit with the partial code."""
        assert main(["synth", "--out", str(tmp_path), *SYNTH_ARGS]) == EXIT_OK
        (tmp_path / "s001" / "g002.csv").write_text("t,x,y\n0,0,broken\n", encoding="utf-8")
        out = tmp_path / "features.csv"
        assert main(["features", str(tmp_path / "manifest.json"), "--out", str(out), *FEATURE_ARGS]) == EXIT_PARTIAL
        assert "1 of 36 trace(s) failed" in capsys.readouterr().err
        assert len(load_features(out)) == 35

    def test_undecodable_trace_is_partial(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Should report a trace that is not UTF-8 and keep the others."""
        assert main(["synth", "--out", str(tmp_path), *SYNTH_ARGS]) == EXIT_OK
        (tmp_path / "s002" / "f001.csv").write_bytes(b"\xff\xfe\x00\x01")
        out = tmp_path / "features.csv"
        assert main(["features", str(tmp_path / "manifest.json"), "--out", str(out), *FEATURE_ARGS]) == EXIT_PARTIAL
        assert "1 of 36 trace(s) failed" in capsys.readouterr().err
        assert len(load_features(out)) == 35

    def test_undecodable_feature_file(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Should fail cleanly on a feature file that is not UTF-8."""
        path = tmp_path / "features.csv"
        path.write_bytes(b"\xff\xfe\x00\x01")
        assert main(["describe", str(path)]) == EXIT_FATAL
        assert "Error:" in capsys.readouterr().err

    def test_strict_escalates_warnings(self, tmp_path: Path, corpus: Path) -> None:
        """Should fail every trace that is short for the embedding dimension under --strict."""
        out = tmp_path / "features.csv"
        args = ["features", str(corpus), "--out", str(out), "--dimension", "5", "--resample-length", "800"]
        assert main([*args, "--strict"]) == EXIT_PARTIAL
        assert load_features(out) == []
        assert main(args) == EXIT_OK
        assert len(load_features(out)) == 36


class TestTrainAndVerify:
    """Tests for the train and verify commands."""

    def test_round_trip(self, tmp_path: Path, features_csv: Path) -> None:
        """Should enroll every writer and score every query against its own model."""
        models = tmp_path / "models"
        assert main(["train", str(features_csv), "--models", str(models)]) == EXIT_OK
        assert sorted(p.name for p in models.iterdir()) == [
            "s001.model.json",
            "s002.model.json",
            "s003.model.json",
        ]

        out = tmp_path / "scores.csv"
        assert main(["verify", str(features_csv), "--models", str(models), "--out", str(out)]) == EXIT_OK
        rows = read_rows(out)
        assert len(rows) == 36
        assert list(rows[0]) == ["model", "subject_id", "label", "sample_index", "raw_score", "verdict"]
        assert all(row["model"] == row["subject_id"] for row in rows)
        assert {row["verdict"] for row in rows} <= {"genuine", "suspicious"}

    def test_single_train_size(self, tmp_path: Path, features_csv: Path, mocker: MockerFixture) -> None:
        """Should enroll every writer at the requested size."""
        split = mocker.spy(permsig.cli, "split_enrollment")
        models = tmp_path / "models"
        assert main(["train", str(features_csv), "--models", str(models), "--train-size", "3"]) == EXIT_OK
        assert split.call_count == 3
        assert {call.args[2] for call in split.call_args_list} == {3}
        store = FileModelStore(models)
        assert [store.get(s).training_size for s in ("s001", "s002", "s003")] == [3, 3, 3]  # type: ignore[union-attr]

    def test_rejects_several_train_sizes(
        self, tmp_path: Path, features_csv: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Should refuse a size list instead of silently training on its first entry."""
        models = tmp_path / "models"
        assert main(["train", str(features_csv), "--models", str(models), "--train-size", "3,5"]) == EXIT_FATAL
        assert "train takes one --train-size" in capsys.readouterr().err
        assert not models.exists()

    def test_claimed_subject(self, tmp_path: Path, features_csv: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Should score every query against the claimed writer's model."""
        models = tmp_path / "models"
        assert main(["train", str(features_csv), "--models", str(models), "--all"]) == EXIT_OK
        capsys.readouterr()
        assert main(["verify", str(features_csv), "--models", str(models), "--subject", "s002"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 37
        assert all(line.startswith("s002,") for line in lines[1:])

    def test_missing_model(self, tmp_path: Path, features_csv: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Should report writers with no model and exit with the partial code."""
        models = tmp_path / "models"
        models.mkdir()
        assert main(["verify", str(features_csv), "--models", str(models), "--subject", "s009"]) == EXIT_PARTIAL
        assert "No model for 1 subject(s): s009" in capsys.readouterr().err


class TestEvaluate:
    """Tests for the evaluate command."""

    def test_single_report_to_stdout(self, features_csv: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Should print one report object and a summary line."""
        assert main(["evaluate", str(features_csv), "--seed", "3"]) == EXIT_OK
        captured = capsys.readouterr()
        report = json.loads(captured.out)
        assert report["protocol"]["n"] == 5
        assert 0.0 <= report["acc"] <= 1.0
        assert 0.0 <= report["eer"] <= 1.0
        assert "n=5: ACC" in captured.err

    def test_several_sizes(self, features_csv: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Should print a list with one report per enrollment size."""
        assert main(["evaluate", str(features_csv), "--train-size", "3,5"]) == EXIT_OK
        reports = json.loads(capsys.readouterr().out)
        assert [r["protocol"]["n"] for r in reports] == [3, 5]

    def test_files_per_class(self, tmp_path: Path, features_csv: Path, classes_json: Path) -> None:
        """Should write report, writer and ROC files for each class."""
        out = tmp_path / "eval"
        assert main(["evaluate", str(features_csv), "--classes", str(classes_json), "--out", str(out)]) == EXIT_OK
        names = sorted(p.name for p in out.iterdir())
        assert names == [
            "report_n5_A.json",
            "report_n5_B.json",
            "roc_n5_A.csv",
            "roc_n5_B.csv",
            "subjects_n5_A.csv",
            "subjects_n5_B.csv",
        ]
        assert len(read_rows(out / "subjects_n5_A.csv")) == 2

    def test_sigma_grid(self, features_csv: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Should evaluate with a kernel width taken from the grid."""
        assert main(["evaluate", str(features_csv), "--sigma-grid", "0.5,10", "--folds", "2"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["protocol"]["sigma_sq"] in (0.5, 10.0)

    def test_size_too_large(self, features_csv: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Should fail when no genuine signature is left for testing."""
        assert main(["evaluate", str(features_csv), "--train-size", "8"]) == EXIT_FATAL
        assert "Error:" in capsys.readouterr().err

    def test_bad_list(self, features_csv: Path) -> None:
        """Should reject a malformed size list while parsing."""
        with pytest.raises(SystemExit):
            main(["evaluate", str(features_csv), "--train-size", "five"])


class TestCluster:
    """Tests for the cluster command."""

    def test_tree_and_cut(self, tmp_path: Path, features_csv: Path) -> None:
        """Should write the tree, the summaries and a two-way cut."""
        out = tmp_path / "cluster"
        assert main(["cluster", str(features_csv), "--k", "2", "--out", str(out)]) == EXIT_OK
        assert sorted(p.name for p in out.iterdir()) == [
            "agreement.json",
            "assignments.csv",
            "linkage.csv",
            "summaries.csv",
            "tree.nwk",
        ]
        tree = (out / "tree.nwk").read_text(encoding="utf-8")
        assert tree.strip().endswith(";")
        assert all(name in tree for name in ("s001", "s002", "s003"))
        assignments = read_rows(out / "assignments.csv")
        assert len({row["cluster"] for row in assignments}) == 2
        assert len(read_rows(out / "linkage.csv")) == 2

    def test_height_cut_with_classes(self, tmp_path: Path, features_csv: Path, classes_json: Path) -> None:
        """Should add class boxes and formation levels next to a height cut."""
        out = tmp_path / "cluster"
        args = ["cluster", str(features_csv), "--select", "all", "--height", "0.5", "--classes", str(classes_json)]
        assert main([*args, "--out", str(out)]) == EXIT_OK
        names = {p.name for p in out.iterdir()}
        assert {"assignments.csv", "parallelepiped.json", "classification.csv", "formation.json"} <= names
        assert "agreement.json" not in names
        formation = json.loads((out / "formation.json").read_text(encoding="utf-8"))
        assert formation["A"]["members"] == ["s001", "s002"]

    def test_cut_options_exclusive(self, tmp_path: Path, features_csv: Path) -> None:
        """Should refuse --k together with --height."""
        with pytest.raises(SystemExit):
            main(["cluster", str(features_csv), "--k", "2", "--height", "0.1", "--out", str(tmp_path)])


class TestDescribe:
    """Tests for the describe command."""

    def test_table_to_stdout(self, features_csv: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Should print one row per writer and label."""
        assert main(["describe", str(features_csv)]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("subject_id,label,count")
        assert len(lines) == 7

    def test_files(self, tmp_path: Path, features_csv: Path) -> None:
        """Should write the table, the plane points and the correlations."""
        out = tmp_path / "describe"
        assert main(["describe", str(features_csv), "--pair", "h_x,c_x", "--out", str(out)]) == EXIT_OK
        assert len(read_rows(out / "plane.csv")) == 72
        document = json.loads((out / "correlation.json").read_text(encoding="utf-8"))
        assert document["features"] == ["h_x", "c_x"]
        assert set(document["by_label"]) == {"genuine", "forgery"}
