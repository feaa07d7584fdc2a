"""One-sided inversion for the 1-D wave equation: forward traces, spectral extraction,
Gelfand-Levitan reconstruction and the far-end profile."""

from ._core import (
    BoundaryVariant,
    KnownPrefix,
    LeftBoundary,
    NumericError,
    Scenario,
    ValidationError,
    b_closed_form,
    boundary_function,
    detect_modes,
    eigenvalues,
    estimate_a1,
    estimate_length,
    far_end_profile,
    field_at,
    gl_reconstruct,
    known_prefix_of,
    make_prefix,
    make_scenario,
    phi,
    reconstruct,
    roundtrip,
    simulate,
    spectral_data_from_modes,
    synthesize_trace,
)

__all__ = [name for name in dir() if not name.startswith("_")]
