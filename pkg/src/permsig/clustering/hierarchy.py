"""Agglomerative clustering of writers and dendrogram export.

Leaves are numbered ``0..n-1`` in input order and the cluster created by the
``k``-th merge gets id ``n + k``, the same numbering as a scipy linkage
matrix. When several pairs of clusters are equally close, the pair whose
sorted leaf labels compare smallest is merged first.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import combinations
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy.cluster.hierarchy import fcluster
from scipy.spatial.distance import cdist
from sklearn.metrics import adjusted_rand_score

from permsig.core.config import DISTANCE_METRICS, LINKAGES, DistanceMetric, Linkage
from permsig.core.errors import InsufficientDataError, ParameterError, ValidationError

if TYPE_CHECKING:
    from collections.abc import Callable

    from numpy.typing import ArrayLike, NDArray

    from permsig.clustering.summary import SubjectSummary

logger = logging.getLogger(__name__)

SCIPY_METRICS: dict[str, str] = {"euclidean": "euclidean", "manhattan": "cityblock", "maximum": "chebyshev"}
NEWICK_RESERVED = set(" ()[]':;,")

_REDUCERS: dict[str, Callable[[NDArray[np.float64]], Any]] = {
    "average": np.mean,
    "complete": np.max,
    "single": np.min,
}


@dataclass(frozen=True)
class Merge:
    """One agglomeration step.

    Attributes:
        left: Id of the first merged cluster.
        right: Id of the second merged cluster.
        height: Linkage distance at which they merged.
        size: Number of leaves in the new cluster.
    """

    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True, eq=False)
class Dendrogram:
    """Binary merge tree over labelled leaves.

    Attributes:
        leaves: Leaf labels (writer ids) in input order.
        merges: ``len(leaves) - 1`` merges with non-decreasing heights.
        metric: Dissimilarity used.
        linkage: Linkage rule used.
    """

    leaves: tuple[str, ...]
    merges: tuple[Merge, ...]
    metric: DistanceMetric = "euclidean"
    linkage: Linkage = "average"

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    @property
    def root_height(self) -> float:
        return self.merges[-1].height if self.merges else 0.0

    @property
    def heights(self) -> NDArray[np.float64]:
        return np.array([m.height for m in self.merges], dtype=np.float64)

    @property
    def normalized_heights(self) -> NDArray[np.float64]:
        """Merge heights divided by the root height, so the root sits at 1."""
        root = self.root_height
        if root == 0.0:
            return np.zeros(len(self.merges))
        return self.heights / root

    def _flat_labels(self, threshold: float, criterion: str) -> dict[str, int]:
        matrix = self.to_linkage_matrix()
        if self.root_height > 0.0:
            matrix[:, 2] /= self.root_height
        raw = fcluster(matrix, threshold, criterion=criterion)
        # renumber from 1 in order of first leaf
        renumbered: dict[int, int] = {}
        for value in raw:
            renumbered.setdefault(int(value), len(renumbered) + 1)
        return {leaf: renumbered[int(value)] for leaf, value in zip(self.leaves, raw, strict=True)}

    def cut(self, k: int | None = None, height: float | None = None) -> dict[str, int]:
        """Cut the tree into flat clusters with :func:`scipy.cluster.hierarchy.fcluster`.

        Args:
            k: Number of clusters to keep. Tied merge heights can leave fewer.
            height: Normalised level in ``[0, 1]``; merges at or below it are kept.

        Returns:
            Leaf label to cluster number, clusters numbered from 1 in order of
            their first leaf.

        Raises:
            ParameterError: If neither or both of ``k`` and ``height`` are given,
                or either is out of range.
        """
        if k is not None and height is None:
            if not 1 <= k <= self.n_leaves:
                msg = f"k must be in [1, {self.n_leaves}], got {k}"
                raise ParameterError(msg)
            return self._flat_labels(k, "maxclust")
        if height is not None and k is None:
            if not 0.0 <= height <= 1.0:
                msg = f"height must be in [0, 1], got {height}"
                raise ParameterError(msg)
            return self._flat_labels(height, "distance")
        msg = "give exactly one of k or height"
        raise ParameterError(msg)

    def formation_level(self, subject_ids: Sequence[str]) -> float:
        """Normalised height at which the given leaves first share one cluster.

        Raises:
            ParameterError: If a label is not a leaf of this tree.
        """
        wanted = set(subject_ids)
        missing = wanted - set(self.leaves)
        if missing:
            msg = f"unknown leaves: {sorted(missing)}"
            raise ParameterError(msg)
        if len(wanted) <= 1:
            return 0.0
        index = {label: i for i, label in enumerate(self.leaves)}
        targets = {index[label] for label in wanted}
        members: dict[int, set[int]] = {i: {i} for i in range(self.n_leaves)}
        normalized = self.normalized_heights
        for k, merge in enumerate(self.merges):
            merged = members.pop(merge.left) | members.pop(merge.right)
            if targets <= merged:
                return float(normalized[k])
            members[self.n_leaves + k] = merged
        return 1.0

    def to_linkage_matrix(self) -> NDArray[np.float64]:
        """scipy-compatible ``(n - 1, 4)`` linkage matrix."""
        return np.array(
            [[m.left, m.right, m.height, m.size] for m in self.merges],
            dtype=np.float64,
        ).reshape(-1, 4)

    def to_newick(self, precision: int = 12) -> str:
        return NewickWriter(self, precision).generate()

    def to_dict(self) -> dict[str, Any]:
        return {
            "leaves": list(self.leaves),
            "metric": self.metric,
            "linkage": self.linkage,
            "merges": [[m.left, m.right, m.height, m.size] for m in self.merges],
        }


class NewickWriter:
    """Render a dendrogram as a rooted Newick tree.

    Every branch length is the height of the parent merge minus the height
    of the child (0 for leaves), so the leaf-to-root path length equals the
    root height.
    """

    __slots__ = ("_dendrogram", "_precision")

    def __init__(self, dendrogram: Dendrogram, precision: int = 12) -> None:
        self._dendrogram = dendrogram
        self._precision = precision

    def generate(self) -> str:
        tree = self._dendrogram
        if not tree.merges:
            return f"{self._label(tree.leaves[0])};" if tree.leaves else ";"
        root = tree.n_leaves + len(tree.merges) - 1
        return f"{self._node(root)};"

    def _height(self, node: int) -> float:
        tree = self._dendrogram
        return 0.0 if node < tree.n_leaves else tree.merges[node - tree.n_leaves].height

    def _node(self, node: int) -> str:
        tree = self._dendrogram
        if node < tree.n_leaves:
            return self._label(tree.leaves[node])
        merge = tree.merges[node - tree.n_leaves]
        children = ",".join(
            f"{self._node(child)}:{self._length(merge.height - self._height(child))}"
            for child in (merge.left, merge.right)
        )
        return f"({children})"

    def _length(self, value: float) -> str:
        return format(max(value, 0.0), f".{self._precision}g")

    @staticmethod
    def _label(label: str) -> str:
        if NEWICK_RESERVED.intersection(label):
            escaped = label.replace("'", "''")
            return f"'{escaped}'"
        return label


def cluster_points(
    labels: Sequence[str],
    points: ArrayLike,
    metric: DistanceMetric = "euclidean",
    linkage: Linkage = "average",
) -> Dendrogram:
    """Agglomerate labelled points into a dendrogram.

    Args:
        labels: Unique leaf labels.
        points: One row per label.
        metric: ``euclidean``, ``manhattan`` or ``maximum``.
        linkage: ``average``, ``complete`` or ``single``.

    Raises:
        ParameterError: On an unknown metric or linkage.
        InsufficientDataError: With fewer than 2 points.
    """
    if metric not in DISTANCE_METRICS:
        msg = f"metric must be one of {DISTANCE_METRICS}, got {metric!r}"
        raise ParameterError(msg)
    if linkage not in LINKAGES:
        msg = f"linkage must be one of {LINKAGES}, got {linkage!r}"
        raise ParameterError(msg)
    matrix = np.asarray(points, dtype=np.float64)
    if matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    names = tuple(str(label) for label in labels)
    if matrix.shape[0] != len(names):
        msg = f"{len(names)} labels for {matrix.shape[0]} points"
        raise ValidationError(msg)
    if len(set(names)) != len(names):
        msg = "leaf labels must be unique"
        raise ValidationError(msg)
    if len(names) < 2:
        msg = f"need at least 2 points to cluster, got {len(names)}"
        raise InsufficientDataError(msg)

    distances = cdist(matrix, matrix, SCIPY_METRICS[metric])
    reduce = _REDUCERS[linkage]
    active: dict[int, tuple[int, ...]] = {i: (i,) for i in range(len(names))}
    sort_keys: dict[int, tuple[str, ...]] = {i: (names[i],) for i in range(len(names))}
    merges: list[Merge] = []
    last_height = 0.0

    def candidate(a: int, b: int) -> tuple[float, tuple[str, ...], tuple[str, ...], int, int]:
        first, second = (a, b) if sort_keys[a] <= sort_keys[b] else (b, a)
        height = float(reduce(distances[np.ix_(active[first], active[second])]))
        return (height, sort_keys[first], sort_keys[second], first, second)

    while len(active) > 1:
        height, _, _, left, right = min(
            (candidate(a, b) for a, b in combinations(active, 2)), key=lambda c: c[:3]
        )
        height = max(height, last_height)
        node = len(names) + len(merges)
        active[node] = active.pop(left) + active.pop(right)
        sort_keys[node] = tuple(sorted(sort_keys.pop(left) + sort_keys.pop(right)))
        merges.append(Merge(left=left, right=right, height=height, size=len(active[node])))
        last_height = height

    logger.debug("clustered %d leaves (%s, %s); root height %.6g", len(names), metric, linkage, last_height)
    return Dendrogram(leaves=names, merges=tuple(merges), metric=metric, linkage=linkage)


def _summary_matrix(summaries: Sequence[SubjectSummary]) -> tuple[list[str], NDArray[np.float64]]:
    if len({s.features for s in summaries}) > 1:
        msg = "summaries were built from different feature selections"
        raise ValidationError(msg)
    labels = [s.subject_id for s in summaries]
    points = np.vstack([s.vector for s in summaries]) if summaries else np.empty((0, 0))
    return labels, points


def hierarchical_cluster(
    summaries: Sequence[SubjectSummary],
    metric: DistanceMetric = "euclidean",
    linkage: Linkage = "average",
) -> Dendrogram:
    """Cluster writers on their (mean, SD) summary vectors."""
    labels, points = _summary_matrix(summaries)
    if len(labels) < 2:
        msg = f"need at least 2 summaries to cluster, got {len(labels)}"
        raise InsufficientDataError(msg)
    return cluster_points(labels, points, metric, linkage)


def cut_dendrogram(dendrogram: Dendrogram, k: int | None = None, height: float | None = None) -> dict[str, int]:
    """Flat clusters from a dendrogram; see :meth:`Dendrogram.cut`."""
    return dendrogram.cut(k=k, height=height)


def to_newick(dendrogram: Dendrogram, precision: int = 12) -> str:
    """Newick text of a dendrogram with merge-height branch lengths."""
    return NewickWriter(dendrogram, precision).generate()


@dataclass(frozen=True)
class MetricAgreement:
    """Cluster memberships at fixed ``k`` under every metric.

    Attributes:
        k: Number of clusters cut.
        memberships: Metric name to leaf-to-cluster map.
        adjusted_rand: Adjusted Rand index for every pair of metrics, keyed ``"a/b"``.
        agree: Whether all partitions are identical.
    """

    k: int
    memberships: dict[str, dict[str, int]]
    adjusted_rand: dict[str, float]
    agree: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "memberships": self.memberships,
            "adjusted_rand": self.adjusted_rand,
            "agree": self.agree,
        }


def compare_metrics(
    summaries: Sequence[SubjectSummary],
    k: int,
    linkage: Linkage = "average",
    metrics: Sequence[DistanceMetric] = DISTANCE_METRICS,
) -> MetricAgreement:
    """Check whether clustering at ``k`` clusters depends on the dissimilarity."""
    memberships = {
        metric: hierarchical_cluster(summaries, metric, linkage).cut(k=k) for metric in metrics
    }
    leaves = [s.subject_id for s in summaries]
    scores = {
        f"{a}/{b}": float(
            adjusted_rand_score([memberships[a][leaf] for leaf in leaves], [memberships[b][leaf] for leaf in leaves])
        )
        for a, b in combinations(metrics, 2)
    }
    agree = all(memberships[a] == memberships[metrics[0]] for a in metrics)
    return MetricAgreement(k=k, memberships=memberships, adjusted_rand=scores, agree=agree)
