"""Exponential integrators for semilinear parabolic problems."""

from ._expint import (
    K_MAX,
    ConfigError,
    DivergenceError,
    DomainError,
    ExpintError,
    Grid,
    InsufficientDataError,
    IoError,
    NoiseFloorError,
    OracleConvergenceError,
    ReferenceScaleError,
    ShapeError,
    SplitOperator,
    SpectralOperator,
    UnsupportedError,
    __version__,
    config_hash,
    echo_config,
    fit_order,
    initial_data,
    laplacian_1d,
    norm,
    phi,
    phi_apply,
    phi_dense,
    phi_oracle,
    run_study,
    solve,
    split_defect,
    split_laplacian_2d,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
