"""Core components: configuration, data models, ordinal patterns and quantifiers."""

from __future__ import annotations

from permsig.core.config import OcSvmConfig, OrdinalConfig, RunConfig, SynthConfig, resolve_seed
from permsig.core.errors import PermsigError, PermsigWarning
from permsig.core.models import FEATURE_NAMES, FeatureVector, QuantifierTriple, SignatureTrace
from permsig.core.ordinal import OrdinalDistribution, bandt_pompe_pdf, lehmer_rank, pattern_of_window
from permsig.core.preprocess import hermite_resample, preprocess_trace, rescale_unit_square
from permsig.core.quantifiers import (
    fisher_information,
    jensen_shannon_disequilibrium,
    normalized_entropy,
    quantify,
    quantify_signature,
    shannon_entropy,
    statistical_complexity,
)

__all__ = [
    "FEATURE_NAMES",
    "FeatureVector",
    "OcSvmConfig",
    "OrdinalConfig",
    "OrdinalDistribution",
    "PermsigError",
    "PermsigWarning",
    "QuantifierTriple",
    "RunConfig",
    "SignatureTrace",
    "SynthConfig",
    "bandt_pompe_pdf",
    "fisher_information",
    "hermite_resample",
    "jensen_shannon_disequilibrium",
    "lehmer_rank",
    "normalized_entropy",
    "pattern_of_window",
    "preprocess_trace",
    "quantify",
    "quantify_signature",
    "rescale_unit_square",
    "resolve_seed",
    "shannon_entropy",
    "statistical_complexity",
]
