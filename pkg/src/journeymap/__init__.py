"""Staged customer-journey analytics: distances, prototypes, prediction, recourse."""

__version__ = "0.1.0"

from .model import Dataset, Event, Journey, StageProjection, canonical_symbol, stage_of
from .distance import (
    DistanceConfig,
    DistanceMatrix,
    StageWeights,
    edit_distance,
    distance_matrix,
    staged_distance,
)
from .clustering import ClusteringResult, KMedoids, kmedoids, kmedoids_pp_init, silhouette, sweep
from .embedding import ClassicalMDS, Embedding, double_center, eigendecompose, mds
from .prediction import EvalReport, KnnModel, evaluate
from .counterfactual import CfQuery, CfResult, edit_script, explain_batch, find_counterfactual
from .ingestion import cleanse, cooccurrence, describe, load, validate

__all__ = [
    "__version__",
    "Dataset",
    "Event",
    "Journey",
    "StageProjection",
    "canonical_symbol",
    "stage_of",
    "DistanceConfig",
    "DistanceMatrix",
    "StageWeights",
    "edit_distance",
    "distance_matrix",
    "staged_distance",
    "ClusteringResult",
    "KMedoids",
    "kmedoids",
    "kmedoids_pp_init",
    "silhouette",
    "sweep",
    "ClassicalMDS",
    "Embedding",
    "double_center",
    "eigendecompose",
    "mds",
    "EvalReport",
    "KnnModel",
    "evaluate",
    "CfQuery",
    "CfResult",
    "edit_script",
    "explain_batch",
    "find_counterfactual",
    "cleanse",
    "cooccurrence",
    "describe",
    "load",
    "validate",
]
