"""Writer grouping: feature summaries, agglomerative clustering and the parallelepiped classifier."""

from __future__ import annotations

from permsig.clustering.hierarchy import (
    Dendrogram,
    MetricAgreement,
    cluster_points,
    compare_metrics,
    cut_dendrogram,
    hierarchical_cluster,
    to_newick,
)
from permsig.clustering.parallelepiped import ParallelepipedModel, parallelepiped_classify, parallelepiped_fit
from permsig.clustering.summary import SubjectSummary, summarize_subject, summarize_subjects

__all__ = [
    "Dendrogram",
    "MetricAgreement",
    "ParallelepipedModel",
    "SubjectSummary",
    "cluster_points",
    "compare_metrics",
    "cut_dendrogram",
    "hierarchical_cluster",
    "parallelepiped_classify",
    "parallelepiped_fit",
    "summarize_subject",
    "summarize_subjects",
    "to_newick",
]
