"""Tests for the enrollment and verification protocol."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import pytest

from permsig.core.config import OcSvmConfig
from permsig.core.errors import EmptyClassWarning, ParameterError, ProtocolError
from permsig.core.models import FeatureVector
from permsig.verification.metrics import eer_from_curve
from permsig.verification.protocol import (
    evaluate_subject,
    group_by_subject,
    run_protocol,
    run_protocol_by_class,
    split_enrollment,
    subject_rng,
)


def only(features: tuple[FeatureVector, ...], *subjects: str) -> list[FeatureVector]:
    return [v for v in features if v.subject_id in subjects]


def toy_writers(
    make_vector: Callable[..., FeatureVector],
    subject_ids: list[str],
    forgery_offset: float,
    forgery_spread: float,
    seed: int = 0,
) -> list[FeatureVector]:
    """Ten genuine and six forged vectors per writer around a writer-specific centre."""
    generator = np.random.default_rng(seed)
    vectors = []
    for k, subject_id in enumerate(subject_ids):
        centre = np.full(6, 0.3 + 0.05 * k)
        for i in range(10):
            values = np.clip(centre + generator.normal(0.0, 0.02, 6), 0.0, 1.0)
            vectors.append(make_vector(values, subject_id=subject_id, sample_index=i))
        for i in range(6):
            values = np.clip(centre + forgery_offset + generator.normal(0.0, forgery_spread, 6), 0.0, 1.0)
            vectors.append(make_vector(values, subject_id=subject_id, label="forgery", sample_index=i))
    return vectors


class TestGroupBySubject:
    """Tests for group_by_subject."""

    def test_groups_and_sorts(self, make_vector: Callable[..., FeatureVector]) -> None:
        """Should group by writer and label and sort by sample index."""
        vectors = [
            make_vector([0.5] * 6, subject_id="s002", sample_index=1),
            make_vector([0.5] * 6, subject_id="s001", label="forgery", sample_index=0),
            make_vector([0.5] * 6, subject_id="s002", sample_index=0),
        ]
        grouped = group_by_subject(vectors)
        assert list(grouped) == ["s001", "s002"]
        assert [v.sample_index for v in grouped["s002"]["genuine"]] == [0, 1]
        assert grouped["s001"]["genuine"] == []
        assert len(grouped["s001"]["forgery"]) == 1


class TestSplitEnrollment:
    """Tests for subject_rng and split_enrollment."""

    def test_reproducible(self, make_vector: Callable[..., FeatureVector]) -> None:
        """Should draw the same enrollment for the same seed and writer."""
        genuine = [make_vector([i / 20] * 6, sample_index=i) for i in range(20)]
        first, _ = split_enrollment("s001", genuine, 5, seed=11)
        second, _ = split_enrollment("s001", genuine, 5, seed=11)
        assert [v.sample_index for v in first] == [v.sample_index for v in second]

    def test_partition(self, make_vector: Callable[..., FeatureVector]) -> None:
        """Should split the genuine set into n enrolled and the rest held out, in input order."""
        genuine = [make_vector([i / 20] * 6, sample_index=i) for i in range(20)]
        enrolled, held_out = split_enrollment("s001", genuine, 5, seed=0)
        enrolled_ids = [v.sample_index for v in enrolled]
        held_ids = [v.sample_index for v in held_out]
        assert len(enrolled_ids) == 5
        assert sorted(enrolled_ids + held_ids) == list(range(20))
        assert enrolled_ids == sorted(enrolled_ids)
        assert held_ids == sorted(held_ids)

    def test_streams_differ_by_writer(self) -> None:
        """Should give different writers different streams."""
        a = subject_rng(0, "s001").integers(0, 2**32, size=4)
        b = subject_rng(0, "s002").integers(0, 2**32, size=4)
        assert not np.array_equal(a, b)

    def test_too_few(self, make_vector: Callable[..., FeatureVector]) -> None:
        """Should reject writers with fewer than n genuine signatures."""
        genuine = [make_vector([0.5] * 6, sample_index=i) for i in range(3)]
        with pytest.raises(ProtocolError) as excinfo:
            split_enrollment("s001", genuine, 5, seed=0)
        assert excinfo.value.subject_id == "s001"


class TestEvaluateSubject:
    """Tests for evaluate_subject."""

    def test_counts(self, small_features: tuple[FeatureVector, ...], ocsvm_config: OcSvmConfig) -> None:
        """Should score every held-out genuine and every forgery once."""
        grouped = group_by_subject(small_features)["s001"]
        result = evaluate_subject("s001", grouped["genuine"], grouped["forgery"], 5, ocsvm_config, seed=0)
        assert (result.n_train, result.n_test_genuine, result.n_test_forgery) == (5, 3, 4)
        assert len(result.scores) == 7
        assert sum(result.confusion.values()) == 7
        assert len(result.enrolled) == 5

    def test_needs_held_out_genuine(
        self, small_features: tuple[FeatureVector, ...], ocsvm_config: OcSvmConfig
    ) -> None:
        """Should reject an enrollment size that leaves no genuine query."""
        grouped = group_by_subject(small_features)["s001"]
        with pytest.raises(ProtocolError):
            evaluate_subject("s001", grouped["genuine"], grouped["forgery"], 8, ocsvm_config, seed=0)

    def test_needs_forgeries(self, small_features: tuple[FeatureVector, ...], ocsvm_config: OcSvmConfig) -> None:
        """Should reject a writer without forgeries."""
        grouped = group_by_subject(small_features)["s001"]
        with pytest.raises(ProtocolError):
            evaluate_subject("s001", grouped["genuine"], [], 5, ocsvm_config, seed=0)


class TestRunProtocol:
    """Tests for run_protocol."""

    def test_report_aggregates_subjects(self, small_features: tuple[FeatureVector, ...]) -> None:
        """Should average per-writer metrics with equal weight."""
        report = run_protocol(small_features, 5, seed=3)
        assert [r.subject_id for r in report.subjects] == ["s001", "s002", "s003"]
        assert report.acc == pytest.approx(np.mean([r.acc for r in report.subjects]))
        assert report.auc == pytest.approx(np.mean([r.auc for r in report.subjects]))
        assert report.eer == pytest.approx(np.mean([r.eer for r in report.subjects]))
        for value in (report.acc, report.auc, report.eer, report.pooled_auc, report.pooled_eer):
            assert 0.0 <= value <= 1.0

    def test_pooled_eer_lies_on_roc(self, small_features: tuple[FeatureVector, ...]) -> None:
        """Should report a pooled EER computed from the reported curve."""
        report = run_protocol(small_features, 5)
        assert report.pooled_eer == eer_from_curve(report.roc)
        assert len(report.roc) >= 2

    def test_deterministic(self, small_features: tuple[FeatureVector, ...]) -> None:
        """Should give identical results for the same seed regardless of worker count."""
        serial = run_protocol(small_features, 5, seed=9)
        parallel = run_protocol(small_features, 5, seed=9, jobs=3)
        assert serial.to_dict() == parallel.to_dict()

    def test_subject_independent_of_others(self, small_features: tuple[FeatureVector, ...]) -> None:
        """Should give a writer the same result whoever else takes part."""
        alone = run_protocol(only(small_features, "s002"), 5, seed=4)
        together = run_protocol(small_features, 5, seed=4)
        assert alone.subjects[0].to_row() == together.subjects[1].to_row()
        assert alone.subjects[0].enrolled == together.subjects[1].enrolled

    def test_protocol_record(self, small_features: tuple[FeatureVector, ...]) -> None:
        """Should record the run parameters."""
        report = run_protocol(small_features, 5, OcSvmConfig(nu=0.2, sigma_sq=3.0), seed=2, folds=4)
        assert report.protocol == {
            "n": 5,
            "seed": 2,
            "folds": 4,
            "subjects": ["s001", "s002", "s003"],
            "nu": 0.2,
            "sigma_sq": 3.0,
            "aggregation": "subject_mean",
        }

    def test_to_dict(self, small_features: tuple[FeatureVector, ...]) -> None:
        """Should export summary metrics, per-writer rows and the curve."""
        data = run_protocol(small_features, 5).to_dict()
        assert set(data) == {"acc", "auc", "eer", "pooled_auc", "pooled_eer", "confusion", "protocol", "subjects", "roc"}
        assert sum(data["confusion"].values()) == 3 * 7
        assert len(data["subjects"]) == 3

    def test_separable_writers(self, make_vector: Callable[..., FeatureVector]) -> None:
        """Should reach perfect AUC and zero EER when forgeries lie far from every genuine."""
        features = toy_writers(make_vector, ["s001", "s002", "s003"], forgery_offset=0.35, forgery_spread=0.005)
        report = run_protocol(features, 5, OcSvmConfig(nu=0.1, sigma_sq=0.05), seed=0)
        assert [r.auc for r in report.subjects] == [1.0, 1.0, 1.0]
        assert [r.eer for r in report.subjects] == [0.0, 0.0, 0.0]
        assert (report.auc, report.eer) == (1.0, 0.0)
        assert report.pooled_auc == 1.0

    def test_invalid_requests(self, small_features: tuple[FeatureVector, ...]) -> None:
        """Should reject n below one and an empty feature set."""
        with pytest.raises(ParameterError):
            run_protocol(small_features, 0)
        with pytest.raises(ParameterError):
            run_protocol([], 5)

    def test_writer_too_small(self, small_features: tuple[FeatureVector, ...]) -> None:
        """Should fail when some writer cannot satisfy n."""
        with pytest.raises(ProtocolError):
            run_protocol(small_features, 10)


class TestRunProtocolByClass:
    """Tests for run_protocol_by_class."""

    def test_one_report_per_class(self, small_features: tuple[FeatureVector, ...]) -> None:
        """Should evaluate each class on its own writers."""
        assignment = {"s001": "A", "s002": "B", "s003": "A"}
        reports = run_protocol_by_class(small_features, assignment, 5, seed=1)
        assert list(reports) == ["A", "B"]
        assert reports["A"].protocol["subjects"] == ["s001", "s003"]
        assert reports["B"].protocol["class"] == "B"
        full = run_protocol(small_features, 5, seed=1)
        assert reports["B"].subjects[0].to_row() == full.subjects[1].to_row()

    def test_empty_class_warns(self, small_features: tuple[FeatureVector, ...]) -> None:
        """Should skip a requested class that has no writers."""
        assignment = {"s001": "A", "s002": "A", "s003": "A"}
        with pytest.warns(EmptyClassWarning):
            reports = run_protocol_by_class(small_features, assignment, 5, classes=["A", "C"])
        assert list(reports) == ["A"]

    def test_easy_class_ranks_above_hard(self, make_vector: Callable[..., FeatureVector]) -> None:
        """Should report better AUC and EER for the class whose forgeries are easier to spot."""
        easy = toy_writers(make_vector, ["s001", "s002", "s003"], forgery_offset=0.35, forgery_spread=0.005, seed=1)
        hard = toy_writers(make_vector, ["s004", "s005", "s006"], forgery_offset=0.0, forgery_spread=0.002, seed=2)
        assignment = {f"s00{i}": "easy" if i <= 3 else "hard" for i in range(1, 7)}
        reports = run_protocol_by_class([*easy, *hard], assignment, 5, OcSvmConfig(nu=0.1, sigma_sq=0.05))
        assert reports["easy"].auc == 1.0
        assert reports["hard"].auc < 0.5
        assert reports["easy"].eer < reports["hard"].eer
        assert sorted(reports, key=lambda name: reports[name].eer) == ["easy", "hard"]

    def test_missing_assignment(self, small_features: tuple[FeatureVector, ...]) -> None:
        """Should reject writers without a class."""
        with pytest.raises(ProtocolError):
            run_protocol_by_class(small_features, {"s001": "A"}, 5)
