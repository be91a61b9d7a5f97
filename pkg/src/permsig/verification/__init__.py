"""One-class verification: model training, scoring, metrics and the enrollment protocol."""

from __future__ import annotations

from permsig.verification.metrics import RocCurve, ScoredSample, accuracy, auc, eer, roc_curve
from permsig.verification.ocsvm import (
    DecisionResult,
    OcSvmModel,
    OneClassSVM,
    cross_validate_sigma,
    decide,
    rbf_kernel,
    train,
)
from permsig.verification.protocol import EvaluationReport, SubjectResult, run_protocol, run_protocol_by_class

__all__ = [
    "DecisionResult",
    "EvaluationReport",
    "OcSvmModel",
    "OneClassSVM",
    "RocCurve",
    "ScoredSample",
    "SubjectResult",
    "accuracy",
    "auc",
    "cross_validate_sigma",
    "decide",
    "eer",
    "rbf_kernel",
    "roc_curve",
    "run_protocol",
    "run_protocol_by_class",
    "train",
]
