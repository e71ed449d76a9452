"""Two-reference-point imaging pipeline, configuration, export and metrics."""
from .config import ExperimentConfig, ShapeSpec, config_from_dict, load_config
from .export import export_heatmap, pgm_bytes, read_csv
from .metrics import localization_metrics
from .stages import (
    disambiguate,
    extract_components,
    run_pipeline,
    run_stage,
    run_stage2_reconstruction,
)

__all__ = [
    "ExperimentConfig", "ShapeSpec", "config_from_dict", "load_config",
    "export_heatmap", "pgm_bytes", "read_csv", "localization_metrics",
    "disambiguate", "extract_components", "run_pipeline", "run_stage", "run_stage2_reconstruction",
]
