"""Dataset loading, feature and model persistence, and synthetic data."""

from __future__ import annotations

from permsig.dataio.features import features_from_csv, features_to_csv, features_to_json, load_features
from permsig.dataio.manifest import DatasetManifest, SubjectEntry, load_manifest, save_manifest
from permsig.dataio.storage import FileModelStore, ModelStore
from permsig.dataio.synthetic import SyntheticDataset, generate_synthetic, write_dataset
from permsig.dataio.traces import TRACE_FORMATS, load_trace, write_trace

__all__ = [
    "TRACE_FORMATS",
    "DatasetManifest",
    "FileModelStore",
    "ModelStore",
    "SubjectEntry",
    "SyntheticDataset",
    "features_from_csv",
    "features_to_csv",
    "features_to_json",
    "generate_synthetic",
    "load_features",
    "load_manifest",
    "load_trace",
    "save_manifest",
    "write_dataset",
    "write_trace",
]
