"""Flux-limited chemotaxis with absorbing reaction: solvers and verification tools."""

from ._core import (
    ConfigError,
    DomainError,
    NumericalError,
    Params,
    Potential,
    RegimeError,
    ResolutionError,
    boundary_lower_bound,
    bound_terms,
    brute_force_extremal,
    c2_series,
    cutoff,
    erfc,
    extremal_drift,
    gamma_lower_bound,
    half_time,
    harnack_constant,
    heat_kernel_2d,
    kernel_bound_factor,
    regime_violation,
    run_radial,
    sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
