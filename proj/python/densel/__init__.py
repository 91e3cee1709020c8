"""Model selection for density estimation with resampling penalties."""

from ._densel import (
    ArgumentError,
    Candidate,
    Density,
    DomainError,
    ModelSpec,
    NumericError,
    Sample,
    build_collection,
    conc_check,
    exact_loss,
    exact_quantities,
    fit_model,
    penalty_sweep,
    resampling_dw,
    resampling_penalty,
    run_example,
    sample,
    select_index,
    slope_path,
    slope_select,
    summarize,
    two_block_cardinality,
)

__all__ = [
    "ArgumentError",
    "Candidate",
    "Density",
    "DomainError",
    "ModelSpec",
    "NumericError",
    "Sample",
    "build_collection",
    "conc_check",
    "exact_loss",
    "exact_quantities",
    "fit_model",
    "penalty_sweep",
    "resampling_dw",
    "resampling_penalty",
    "run_example",
    "sample",
    "select_index",
    "slope_path",
    "slope_select",
    "summarize",
    "two_block_cardinality",
]
