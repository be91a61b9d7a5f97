"""Feature, report and ROC files."""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

from permsig.core.config import OrdinalConfig
from permsig.core.errors import TraceParseError, ValidationError
from permsig.core.models import FEATURE_NAMES, FeatureVector
from permsig.dataio.traces import format_float, read_text
from permsig.verification.metrics import RocCurve
from permsig.verification.protocol import EvaluationReport

FEATURE_COLUMNS: tuple[str, ...] = ("subject_id", "sample_index", "label", *FEATURE_NAMES)
SUBJECT_COLUMNS: tuple[str, ...] = ("subject_id", "acc", "auc", "eer", "n_train", "n_test_genuine", "n_test_forgery")
ROC_COLUMNS: tuple[str, ...] = ("threshold", "far", "frr")
FEATURE_FILE_VERSION = 1


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def rows_to_csv(columns: Sequence[str], rows: Iterable[Mapping[str, Any] | Sequence[Any]]) -> str:
    """Render rows as CSV text with a header; floats keep full precision."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        values = [row[c] for c in columns] if isinstance(row, Mapping) else list(row)
        writer.writerow([_cell(v) for v in values])
    return buffer.getvalue()


def write_text(text: str, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def features_to_csv(vectors: Iterable[FeatureVector]) -> str:
    """One row per signature: subject_id, sample_index, label and the six features."""
    return rows_to_csv(FEATURE_COLUMNS, (v.to_dict() for v in sorted(vectors, key=lambda v: v.key)))


def features_from_csv(text: str, source: str = "<features>") -> list[FeatureVector]:
    """Parse text written by :func:`features_to_csv`.

    Raises:
        TraceParseError: On a wrong header or a malformed row, with its line number.
    """
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != FEATURE_COLUMNS:
        msg = f"expected header {','.join(FEATURE_COLUMNS)!r}"
        raise TraceParseError(msg, path=source, line=1)
    vectors = []
    for row in reader:
        try:
            vectors.append(FeatureVector.from_dict(row))
        except (ValueError, TypeError, KeyError) as e:
            raise TraceParseError(str(e), path=source, line=reader.line_num) from e
    return vectors


def features_to_json(
    vectors: Iterable[FeatureVector],
    config: OrdinalConfig | None = None,
    resample_length: int | None = None,
) -> str:
    """JSON variant of the feature table, carrying the extraction settings."""
    document = {
        "version": FEATURE_FILE_VERSION,
        "ordinal": (config or OrdinalConfig()).to_dict(),
        "resample_length": resample_length,
        "feature_schema": list(FEATURE_NAMES),
        "features": [v.to_dict() for v in sorted(vectors, key=lambda v: v.key)],
    }
    return json.dumps(document, indent=2) + "\n"


def features_from_json(text: str) -> tuple[list[FeatureVector], OrdinalConfig]:
    """Parse text written by :func:`features_to_json`.

    Raises:
        ValidationError: On an unsupported version or malformed content.
    """
    try:
        document = json.loads(text)
        if document.get("version") != FEATURE_FILE_VERSION:
            msg = f"unsupported feature file version {document.get('version')!r}"
            raise ValidationError(msg)
        config = OrdinalConfig(**document["ordinal"])
        vectors = [FeatureVector.from_dict(item) for item in document["features"]]
    except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as e:
        msg = f"malformed feature JSON: {e}"
        raise ValidationError(msg) from e
    return vectors, config


def load_features(path: str | Path) -> list[FeatureVector]:
    """Read a feature file; the format follows the ``.json`` or ``.csv`` suffix."""
    path = Path(path)
    text = read_text(path)
    if path.suffix.lower() == ".json":
        return features_from_json(text)[0]
    return features_from_csv(text, str(path))


def report_to_json(report: EvaluationReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def report_to_csv(report: EvaluationReport) -> str:
    """Per-writer rows of a report."""
    return rows_to_csv(SUBJECT_COLUMNS, report.rows())


def roc_to_csv(curve: RocCurve) -> str:
    return rows_to_csv(ROC_COLUMNS, curve.rows())
