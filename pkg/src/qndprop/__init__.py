"""Exact propagators of a two-level system in QND and non-QND baths.

Closed forms for oscillator and spin baths, an order-N series for the
non-QND spin-Bose model, a truncated-Fock brute-force oracle, and checks of
the squeeze/rotation structure of the QND propagators.
"""

from .model import (
    BathKind,
    BathSpec,
    Model,
    ModelError,
    Propagator2x2,
    SystemSpec,
    TruncationSpec,
    make_model,
    validate_model,
)

__all__ = [
    "BathKind",
    "BathSpec",
    "Model",
    "ModelError",
    "Propagator2x2",
    "SystemSpec",
    "TruncationSpec",
    "make_model",
    "validate_model",
]

__version__ = "0.1.0"
