"""Online signature verification with ordinal-pattern information quantifiers.

Each pen trajectory is reduced to the permutation entropy, statistical
complexity and Fisher information of its two coordinates. Writers are
enrolled with a one-class SVM and grouped by hierarchical clustering.
"""

from __future__ import annotations

from permsig.core.config import OcSvmConfig, OrdinalConfig, RunConfig, SynthConfig
from permsig.core.errors import PermsigError, PermsigWarning
from permsig.core.models import FEATURE_NAMES, FeatureVector, QuantifierTriple, SignatureTrace
from permsig.core.ordinal import OrdinalDistribution, bandt_pompe_pdf
from permsig.core.preprocess import preprocess_trace
from permsig.core.quantifiers import quantify, quantify_signature
from permsig.pipeline import extract_features, featurize
from permsig.verification.ocsvm import OcSvmModel, OneClassSVM, decide, train
from permsig.verification.protocol import EvaluationReport, run_protocol

__version__ = "0.1.0"

__all__ = [
    "FEATURE_NAMES",
    "EvaluationReport",
    "FeatureVector",
    "OcSvmConfig",
    "OcSvmModel",
    "OneClassSVM",
    "OrdinalConfig",
    "OrdinalDistribution",
    "PermsigError",
    "PermsigWarning",
    "QuantifierTriple",
    "RunConfig",
    "SignatureTrace",
    "SynthConfig",
    "__version__",
    "bandt_pompe_pdf",
    "decide",
    "extract_features",
    "featurize",
    "preprocess_trace",
    "quantify",
    "quantify_signature",
    "run_protocol",
    "train",
]
