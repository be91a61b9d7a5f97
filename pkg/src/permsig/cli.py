"""Command-line interface for the signature pipeline.

Run with:
    permsig <command> [options]

Or:
    python -m permsig <command> [options]
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import replace
from pathlib import Path
from typing import TYPE_CHECKING, Any
from urllib.parse import quote

from permsig import __version__
from permsig.clustering.hierarchy import compare_metrics, hierarchical_cluster
from permsig.clustering.parallelepiped import parallelepiped_fit
from permsig.clustering.summary import resolve_selection, summarize_subjects
from permsig.core.config import (
    DEFAULT_RESAMPLE_LENGTH,
    DISTANCE_METRICS,
    LINKAGES,
    RunConfig,
    SynthConfig,
    resolve_seed,
)
from permsig.core.errors import (
    ConfigurationError,
    ConvergenceError,
    InsufficientDataError,
    PermsigError,
    PermsigWarning,
    ProtocolError,
    ValidationError,
)
from permsig.core.models import FEATURE_NAMES
from permsig.dataio.features import (
    features_to_csv,
    features_to_json,
    load_features,
    report_to_csv,
    report_to_json,
    roc_to_csv,
    rows_to_csv,
    write_text,
)
from permsig.dataio.manifest import load_manifest
from permsig.dataio.storage import FileModelStore
from permsig.dataio.synthetic import MANIFEST_NAME, generate_synthetic, write_dataset
from permsig.dataio.traces import TRACE_FORMATS
from permsig.exploratory import PLANE_COLUMNS, describe_columns, describe_subjects, feature_correlation, plane_points
from permsig.pipeline import extract_features, run_tasks
from permsig.verification.ocsvm import cross_validate_sigma, decide, train
from permsig.verification.protocol import group_by_subject, run_protocol, run_protocol_by_class, split_enrollment

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from permsig.verification.ocsvm import OcSvmModel
    from permsig.verification.protocol import EvaluationReport

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2

HANDLER_NAME = "permsig-cli"
VERIFY_COLUMNS: tuple[str, ...] = ("model", "subject_id", "label", "sample_index", "raw_score", "verdict")
LINKAGE_COLUMNS: tuple[str, ...] = ("left", "right", "height", "size")


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Send package log records to stderr at the requested level."""
    level = logging.DEBUG if verbose else logging.ERROR if quiet else logging.WARNING
    package_logger = logging.getLogger("permsig")
    for handler in list(package_logger.handlers):
        if handler.get_name() == HANDLER_NAME:
            package_logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.set_name(HANDLER_NAME)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    package_logger.addHandler(handler)
    package_logger.setLevel(level)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        msg = f"expected comma-separated integers, got {text!r}"
        raise argparse.ArgumentTypeError(msg) from e
    if not values:
        msg = "expected at least one value"
        raise argparse.ArgumentTypeError(msg)
    return values


def _float_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        msg = f"expected comma-separated numbers, got {text!r}"
        raise argparse.ArgumentTypeError(msg) from e
    if not values:
        msg = "expected at least one value"
        raise argparse.ArgumentTypeError(msg)
    return values


def _status(message: str) -> None:
    print(message, file=sys.stderr)  # noqa: T201


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        write_text(text, path)
        _status(f"Wrote {path}")


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        embedding_dimension=getattr(args, "dimension", 5),
        time_lag=getattr(args, "lag", 1),
        resample_length=getattr(args, "resample_length", DEFAULT_RESAMPLE_LENGTH),
        nu=getattr(args, "nu", 0.1),
        sigma_sq=getattr(args, "sigma_sq", 10.0),
        train_sizes=getattr(args, "train_size", None) or [5],
        seed=resolve_seed(args.seed),
        metric=getattr(args, "metric", "euclidean"),
        linkage=getattr(args, "linkage", "average"),
        folds=getattr(args, "folds", 5),
        sigma_grid=getattr(args, "sigma_grid", None) or [],
        jobs=args.jobs,
        strict=args.strict,
    )


def _load_classes(path: Path) -> dict[str, str]:
    """Read a ``{subject_id: class}`` JSON object."""
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        msg = f"{path}: invalid JSON ({e})"
        raise ValidationError(msg) from e
    if not isinstance(data, dict):
        msg = f"{path}: class file must map subject ids to class names"
        raise ValidationError(msg)
    return {str(subject): str(name) for subject, name in data.items()}


def cmd_synth(args: argparse.Namespace) -> int:
    """Generate a synthetic corpus and its manifest."""
    config = SynthConfig(
        n_subjects=args.subjects,
        genuine_per_subject=args.genuine,
        forgeries_per_subject=args.forgeries,
        seed=resolve_seed(args.seed),
    )
    dataset = generate_synthetic(config)
    write_dataset(dataset, args.out, args.format)
    _status(f"Wrote {len(dataset)} traces for {len(dataset.subjects)} subjects to {args.out / MANIFEST_NAME}")
    return EXIT_OK


def cmd_features(args: argparse.Namespace) -> int:
    """Extract the six features of every trace in a manifest."""
    run = _run_config(args)
    manifest = load_manifest(args.manifest)
    result = extract_features(manifest, run.ordinal, run.resample_length, jobs=run.jobs)
    if args.format == "json":
        text = features_to_json(result.vectors, run.ordinal, run.resample_length)
    else:
        text = features_to_csv(result.vectors)
    _emit(text, args.out)

    if result.failures:
        _status(f"{len(result.failures)} of {len(manifest)} trace(s) failed:")
        for failure in result.failures:
            _status(f"  {failure.path}: {failure.error}")
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    """Enroll every writer and write one model file each."""
    run = _run_config(args)
    if len(run.train_sizes) > 1:
        msg = f"train takes one --train-size, got {list(run.train_sizes)}"
        raise ConfigurationError(msg)
    vectors = load_features(args.features)
    grouped = group_by_subject(vectors)
    n = run.train_sizes[0]
    store = FileModelStore(args.models)

    def work(subject_id: str) -> tuple[str, OcSvmModel | str]:
        genuine = grouped[subject_id]["genuine"]
        try:
            enrollment = genuine if args.all else split_enrollment(subject_id, genuine, n, run.seed)[0]
            return subject_id, train(enrollment, run.ocsvm, subject_id=subject_id)
        except (ProtocolError, InsufficientDataError, ConvergenceError) as e:
            logger.warning("could not train %s: %s", subject_id, e)
            return subject_id, str(e)

    failures = []
    for subject_id, outcome in run_tasks(list(grouped), work, run.jobs):
        if isinstance(outcome, str):
            failures.append((subject_id, outcome))
        else:
            store.store(subject_id, outcome)

    _status(f"Trained {len(grouped) - len(failures)} model(s) in {args.models}")
    if failures:
        for subject_id, error in failures:
            _status(f"  {subject_id}: {error}")
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Score queries against enrolled models."""
    store = FileModelStore(args.models)
    queries = sorted(load_features(args.features), key=lambda v: v.key)
    rows: list[dict[str, Any]] = []
    missing: set[str] = set()
    for query in queries:
        claimed = args.subject or query.subject_id
        model = store.get(claimed)
        if model is None:
            missing.add(claimed)
            continue
        result = decide(model, query)
        rows.append(
            {
                "model": claimed,
                "subject_id": query.subject_id,
                "label": query.label,
                "sample_index": query.sample_index,
                "raw_score": result.raw_score,
                "verdict": result.verdict,
            }
        )
    _emit(rows_to_csv(VERIFY_COLUMNS, rows), args.out)

    if missing:
        _status(f"No model for {len(missing)} subject(s): {', '.join(sorted(missing))}")
        return EXIT_PARTIAL
    return EXIT_OK


def _report_stem(report: EvaluationReport) -> str:
    stem = f"n{report.protocol['n']}"
    if "class" in report.protocol:
        stem += f"_{quote(str(report.protocol['class']), safe='')}"
    return stem


def cmd_evaluate(args: argparse.Namespace) -> int:
    """Run the enrollment protocol for each requested enrollment size."""
    run = _run_config(args)
    vectors = load_features(args.features)
    config = run.ocsvm
    if run.sigma_grid:
        genuine = [v for v in vectors if v.label == "genuine"]
        config = replace(config, sigma_sq=cross_validate_sigma(genuine, run.nu, run.sigma_grid, run.folds, run.seed))
    classes = _load_classes(args.classes) if args.classes else None

    reports: list[EvaluationReport] = []
    for n in run.train_sizes:
        if classes is None:
            reports.append(run_protocol(vectors, n, config, run.seed, folds=run.folds, jobs=run.jobs))
        else:
            by_class = run_protocol_by_class(vectors, classes, n, config, run.seed, folds=run.folds, jobs=run.jobs)
            reports.extend(by_class.values())

    for report in reports:
        label = f" class={report.protocol['class']}" if "class" in report.protocol else ""
        _status(
            f"n={report.protocol['n']}{label}: ACC {report.acc:.4f}  AUC {report.auc:.4f}  EER {100 * report.eer:.2f}%"
        )

    if args.out is None:
        documents = [report.to_dict() for report in reports]
        payload = documents[0] if len(documents) == 1 else documents
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
        return EXIT_OK

    for report in reports:
        stem = _report_stem(report)
        _emit(report_to_json(report), args.out / f"report_{stem}.json")
        _emit(report_to_csv(report), args.out / f"subjects_{stem}.csv")
        _emit(roc_to_csv(report.roc), args.out / f"roc_{stem}.csv")
    return EXIT_OK


def cmd_cluster(args: argparse.Namespace) -> int:
    """Cluster writers on their genuine-signature feature statistics."""
    run = _run_config(args)
    vectors = load_features(args.features)
    selection = resolve_selection("all" if args.select == "all" else [s.strip() for s in args.select.split(",")])
    summaries = summarize_subjects(vectors, selection)
    dendrogram = hierarchical_cluster(summaries, run.metric, run.linkage)
    out: Path = args.out

    _emit(dendrogram.to_newick() + "\n", out / "tree.nwk")
    columns = ("subject_id", "count", *summaries[0].columns)
    _emit(rows_to_csv(columns, [s.to_dict() for s in summaries]), out / "summaries.csv")
    _emit(rows_to_csv(LINKAGE_COLUMNS, dendrogram.to_linkage_matrix().tolist()), out / "linkage.csv")

    if args.k is not None or args.height is not None:
        assignments = dendrogram.cut(k=args.k, height=args.height)
        _emit(rows_to_csv(("subject_id", "cluster"), sorted(assignments.items())), out / "assignments.csv")
        if args.k is not None:
            agreement = compare_metrics(summaries, args.k, run.linkage)
            _emit(json.dumps(agreement.to_dict(), indent=2) + "\n", out / "agreement.json")
            if not agreement.agree:
                _status(f"Memberships at k={args.k} differ across metrics")

    if args.classes:
        classes = _load_classes(args.classes)
        model = parallelepiped_fit(summaries, classes)
        _emit(json.dumps(model.to_dict(), indent=2) + "\n", out / "parallelepiped.json")
        rows = [
            {"subject_id": s.subject_id, "assigned": classes.get(s.subject_id, ""), "predicted": model.classify(s) or ""}
            for s in summaries
        ]
        _emit(rows_to_csv(("subject_id", "assigned", "predicted"), rows), out / "classification.csv")
        members: dict[str, list[str]] = {}
        for subject_id, name in classes.items():
            if subject_id in dendrogram.leaves:
                members.setdefault(name, []).append(subject_id)
        levels = {
            name: {"members": sorted(ids), "formation_level": dendrogram.formation_level(ids)}
            for name, ids in sorted(members.items())
        }
        _emit(json.dumps(levels, indent=2) + "\n", out / "formation.json")
    return EXIT_OK


def cmd_describe(args: argparse.Namespace) -> int:
    """Write descriptive tables and plane points of a feature file."""
    vectors = load_features(args.features)
    table = rows_to_csv(describe_columns(), describe_subjects(vectors))
    if args.out is None:
        _emit(table, None)
        return EXIT_OK

    _emit(table, args.out / "subjects.csv")
    _emit(rows_to_csv(PLANE_COLUMNS, plane_points(vectors)), args.out / "plane.csv")
    first, second = args.pair
    try:
        correlations = feature_correlation(vectors, first, second)
    except InsufficientDataError as e:
        _status(f"Skipping correlation: {e}")
        return EXIT_OK
    document = {"features": [first, second], "by_label": {k: c.to_dict() for k, c in correlations.items()}}
    _emit(json.dumps(document, indent=2) + "\n", args.out / "correlation.json")
    return EXIT_OK


def _feature_pair(text: str) -> tuple[str, str]:
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 2 or any(p not in FEATURE_NAMES for p in parts):
        msg = f"expected two of {','.join(FEATURE_NAMES)}, got {text!r}"
        raise argparse.ArgumentTypeError(msg)
    return parts[0], parts[1]


def build_parser() -> argparse.ArgumentParser:
    """Build the ``permsig`` argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Log debug messages to stderr")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Only log errors")
    common.add_argument("--strict", action="store_true", help="Treat advisory warnings as errors")
    common.add_argument("--jobs", type=int, default=1, help="Worker threads (default: 1)")
    common.add_argument("--seed", type=int, default=None, help="Root seed (default: $PERMSIG_SEED, else 0)")

    ordinal = argparse.ArgumentParser(add_help=False)
    ordinal.add_argument("--dimension", type=int, default=5, help="Embedding dimension D (default: 5)")
    ordinal.add_argument("--lag", type=int, default=1, help="Time lag (default: 1)")
    ordinal.add_argument(
        "--resample-length",
        type=int,
        default=DEFAULT_RESAMPLE_LENGTH,
        help=f"Points after resampling (default: {DEFAULT_RESAMPLE_LENGTH})",
    )

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--nu", type=float, default=0.1, help="One-class SVM nu (default: 0.1)")
    model.add_argument("--sigma-sq", type=float, default=10.0, help="RBF kernel width sigma^2 (default: 10)")
    model.add_argument("--train-size", type=_int_list, default=None, help="Enrollment size(s), comma-separated")

    parser = argparse.ArgumentParser(
        prog="permsig",
        description="Online signature verification with ordinal-pattern features",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Generate a synthetic corpus
  permsig synth --out data/

  # Extract features from a manifest
  permsig features data/manifest.json --out features.csv

  # Run the enrollment protocol for several enrollment sizes
  permsig evaluate features.csv --train-size 5,10,14,18,22 --out results/

  # Cluster writers and cut the tree into three groups
  permsig cluster features.csv --k 3 --out clusters/

The seed falls back to the PERMSIG_SEED environment variable, then to 0.
Exit codes: 0 success, 1 fatal error, 2 some inputs failed.
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, metavar="<command>")

    synth = commands.add_parser("synth", parents=[common], help="Generate a synthetic signature corpus")
    synth.add_argument("--out", type=Path, required=True, help="Output directory")
    synth.add_argument("--subjects", type=int, default=20, help="Number of writers (default: 20)")
    synth.add_argument("--genuine", type=int, default=25, help="Genuine signatures per writer (default: 25)")
    synth.add_argument("--forgeries", type=int, default=25, help="Forgeries per writer (default: 25)")
    synth.add_argument("--format", choices=TRACE_FORMATS, default="csv_txy", help="Trace file layout")
    synth.set_defaults(handler=cmd_synth)

    features = commands.add_parser("features", parents=[common, ordinal], help="Extract features from a manifest")
    features.add_argument("manifest", type=Path, help="Dataset manifest JSON")
    features.add_argument("--out", type=Path, default=None, help="Output file (default: stdout)")
    features.add_argument("--format", choices=("csv", "json"), default="csv", help="Output format (default: csv)")
    features.set_defaults(handler=cmd_features)

    train_cmd = commands.add_parser("train", parents=[common, model], help="Enroll writers and save their models")
    train_cmd.add_argument("features", type=Path, help="Feature file (.csv or .json)")
    train_cmd.add_argument("--models", type=Path, required=True, help="Model directory")
    train_cmd.add_argument("--all", action="store_true", help="Enroll every genuine signature")
    train_cmd.set_defaults(handler=cmd_train)

    verify = commands.add_parser("verify", parents=[common], help="Score queries against saved models")
    verify.add_argument("features", type=Path, help="Query feature file")
    verify.add_argument("--models", type=Path, required=True, help="Model directory")
    verify.add_argument("--subject", default=None, help="Claimed writer for every query (default: the query's own)")
    verify.add_argument("--out", type=Path, default=None, help="Output CSV (default: stdout)")
    verify.set_defaults(handler=cmd_verify)

    evaluate = commands.add_parser("evaluate", parents=[common, model], help="Run the verification protocol")
    evaluate.add_argument("features", type=Path, help="Feature file")
    evaluate.add_argument("--folds", type=int, default=5, help="Cross-validation folds (default: 5)")
    evaluate.add_argument("--sigma-grid", type=_float_list, default=None, help="Candidate sigma^2 values to select from")
    evaluate.add_argument("--classes", type=Path, default=None, help="JSON mapping writers to classes")
    evaluate.add_argument("--out", type=Path, default=None, help="Output directory (default: report JSON on stdout)")
    evaluate.set_defaults(handler=cmd_evaluate)

    cluster = commands.add_parser("cluster", parents=[common], help="Cluster writers by feature statistics")
    cluster.add_argument("features", type=Path, help="Feature file")
    cluster.add_argument("--select", default="h_x,h_y", help="Comma-separated features, or 'all' (default: h_x,h_y)")
    cluster.add_argument("--metric", choices=DISTANCE_METRICS, default="euclidean", help="Dissimilarity")
    cluster.add_argument("--linkage", choices=LINKAGES, default="average", help="Linkage rule")
    group = cluster.add_mutually_exclusive_group()
    group.add_argument("--k", type=int, default=None, help="Cut into k clusters")
    group.add_argument("--height", type=float, default=None, help="Cut at this merge height")
    cluster.add_argument("--classes", type=Path, default=None, help="JSON mapping writers to classes")
    cluster.add_argument("--out", type=Path, required=True, help="Output directory")
    cluster.set_defaults(handler=cmd_cluster)

    describe = commands.add_parser("describe", parents=[common], help="Descriptive statistics and plane points")
    describe.add_argument("features", type=Path, help="Feature file")
    describe.add_argument("--pair", type=_feature_pair, default=("h_x", "h_y"), help="Features to correlate")
    describe.add_argument("--out", type=Path, default=None, help="Output directory (default: table on stdout)")
    describe.set_defaults(handler=cmd_describe)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the ``permsig`` command line."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(verbose=args.verbose, quiet=args.quiet)
    handler: Callable[[argparse.Namespace], int] = args.handler

    with warnings.catch_warnings():
        if args.strict:
            warnings.simplefilter("error", PermsigWarning)
        try:
            return handler(args)
        except (PermsigError, PermsigWarning, OSError) as e:
            logger.debug("%s failed", args.command, exc_info=True)
            _status(f"Error: {e}")
            return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
