"""Capacitated assignment of objects to occupied locations with fairness scoring."""

from .attributes import (
    AttributeSchema,
    AttributeVector,
    QuantizedVector,
    location_mode,
    quantize_object,
    quantize_user,
    rarity,
    raw_distance,
    weighted_distance,
)
from .population import (
    Location,
    OccupancyAssignment,
    User,
    resample,
    synthesize_occupancy,
)
from .cost import CostMatrix, build_cost_matrix, score
from .optimizer import (
    AssignmentMatrix,
    HyperParams,
    SolveReport,
    gradient,
    init_random,
    init_uniform,
    lipschitz_step,
    objective,
    project_row,
    project_rows,
    scale_hyperparams,
    solve,
)
from .fairness import (
    FairnessReport,
    GroupSpec,
    fairness_table,
    group_expectation,
    representative_exposure,
)
from .analysis import (
    SolutionFamily,
    SweepProblem,
    similarity,
    spectral_embed,
    sweep_grid,
)
from .ingest import (
    CollectionItem,
    Dataset,
    DatasetError,
    generate_synthetic,
    load_dataset,
    save_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeSchema",
    "AttributeVector",
    "QuantizedVector",
    "location_mode",
    "quantize_object",
    "quantize_user",
    "rarity",
    "raw_distance",
    "weighted_distance",
    "Location",
    "OccupancyAssignment",
    "User",
    "resample",
    "synthesize_occupancy",
    "CostMatrix",
    "build_cost_matrix",
    "score",
    "AssignmentMatrix",
    "HyperParams",
    "SolveReport",
    "gradient",
    "init_random",
    "init_uniform",
    "lipschitz_step",
    "objective",
    "project_row",
    "project_rows",
    "scale_hyperparams",
    "solve",
    "FairnessReport",
    "GroupSpec",
    "fairness_table",
    "group_expectation",
    "representative_exposure",
    "SolutionFamily",
    "SweepProblem",
    "similarity",
    "spectral_embed",
    "sweep_grid",
    "CollectionItem",
    "Dataset",
    "DatasetError",
    "generate_synthetic",
    "load_dataset",
    "save_dataset",
]
