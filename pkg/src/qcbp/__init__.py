"""Quadratically constrained basis pursuit: decoder, certificates, ensembles.

The package splits into five layers: deterministic random streams
(`streams`), random sensing ensembles (`ensembles`), the l1 decoder and its
slow reference oracle (`solver`), recovery certificates and constant
formulas (`analysis`), sparse Chebyshev function approximation
(`polyapprox`), and the batch experiment harness plus CLI (`harness`,
`cli`).
"""

from .streams import RandomStream, as_stream
from .ensembles import (
    BOS_KINDS,
    KINDS,
    EnsembleSpec,
    SensingMatrix,
    build_matrix,
    evaluate_bos,
    load_matrix,
    noise_vector,
    sample_chebyshev_points,
    save_matrix,
    sparse_signal,
)
from .solver import (
    DecodeOptions,
    DecodeResult,
    operator_norm,
    qcbp_decode,
    range_distance,
    reference_decode,
)
from .analysis import (
    BudgetConstants,
    MomentEstimate,
    NSPConstants,
    QuotientBounds,
    RIPReport,
    best_s_term_error,
    bos_measurement_bound,
    budget_constants,
    chebyshev_distortion_bound,
    christoffel_chebyshev,
    coherence_statistic,
    cross_coherence,
    distortion,
    distortion_statistic,
    error_budget,
    nsp_from_rip,
    quotient_bounds,
    quotient_empirical,
    rip_constant,
    s_star,
    sigma_min_scaled,
    simultaneous_quotient_upper,
    sv_deviation_empirical,
)
from .polyapprox import (
    ExpansionApproximation,
    approximate,
    chebyshev_basis,
    evaluate_expansion,
    l2_error,
    reference_coefficients,
    target_function,
)
from .harness import (
    ExperimentConfig,
    default_config,
    run_experiment,
    summarize,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "RandomStream", "as_stream",
    "BOS_KINDS", "KINDS", "EnsembleSpec", "SensingMatrix", "build_matrix",
    "evaluate_bos", "load_matrix", "noise_vector", "sample_chebyshev_points",
    "save_matrix", "sparse_signal",
    "DecodeOptions", "DecodeResult", "operator_norm", "qcbp_decode",
    "range_distance", "reference_decode",
    "BudgetConstants", "MomentEstimate", "NSPConstants", "QuotientBounds",
    "RIPReport", "best_s_term_error", "bos_measurement_bound",
    "budget_constants", "chebyshev_distortion_bound", "christoffel_chebyshev",
    "coherence_statistic", "cross_coherence", "distortion",
    "distortion_statistic", "error_budget", "nsp_from_rip",
    "quotient_bounds", "quotient_empirical", "rip_constant", "s_star",
    "sigma_min_scaled", "simultaneous_quotient_upper",
    "sv_deviation_empirical",
    "ExpansionApproximation", "approximate", "chebyshev_basis",
    "evaluate_expansion", "l2_error", "reference_coefficients",
    "target_function",
    "ExperimentConfig", "default_config", "run_experiment", "summarize",
    "write_csv",
]
