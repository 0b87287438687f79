"""Synthetic benchmark generation, dataset storage and CSV ingestion."""
from .csv_ingest import ingest_csv, read_csv_matrix
from .storage import load_dataset, save_dataset
from .synthetic import (
    SyntheticDatasetSpec,
    TrajectoryBatch,
    build_dataset,
    generate_latent,
    make_projection,
    plan_manifest,
    project,
    sample_generator_params,
)

__all__ = [
    "SyntheticDatasetSpec",
    "TrajectoryBatch",
    "build_dataset",
    "generate_latent",
    "ingest_csv",
    "load_dataset",
    "make_projection",
    "plan_manifest",
    "project",
    "read_csv_matrix",
    "sample_generator_params",
    "save_dataset",
]
