"""Exact rank-one constructions, correlations and certificates."""

from ._rankone import (
    CorrelationError,
    PlanError,
    ScheduleError,
    SchemaError,
    SimulationError,
    SpecError,
    SpectralError,
    autocorrelation,
    autocorrelation_sequence,
    chaos_exp_coefficients,
    corr_tail_certificate,
    cross_correlation,
    exact_density,
    fejer_density,
    gaussian_lag_covariance,
    generate_schedule,
    inner_product,
    lemma3_truncate,
    occurrence_set,
    plan_pair,
    point_map,
    poisson_linear_statistic,
    shift_power,
    validate_schedule,
    validate_spec,
    verify_certificate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
