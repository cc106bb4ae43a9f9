"""Validated model types and global conventions.

Conventions fixed here and used by every other module:

* hbar = 1; frequencies are the only dimensionful inputs.
* System slot 0 is spin-down, slot 1 is spin-up.  In slot order the
  physical Pauli matrix is ``sigma_z = diag(-1, +1)``.
* Propagators are unnormalized Bargmann kernels whose t = 0 value is
  ``exp(sum_k conj_label_k * label_k) * identity``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class ModelError(ValueError):
    """Raised when a model, label vector or configuration violates an invariant."""


class BathKind(enum.Enum):
    OSCILLATOR = "oscillator"
    SPIN = "spin"


SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
# slot 0 = spin-down
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def _finite(x) -> bool:
    return bool(np.all(np.isfinite(np.asarray(x))))


@dataclass(frozen=True)
class BathSpec:
    """Finite discrete bath: mode frequencies and real couplings."""

    kind: BathKind
    omegas: tuple = ()
    couplings: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", BathKind(self.kind))
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        object.__setattr__(self, "couplings", tuple(float(g) for g in self.couplings))

    @property
    def M(self) -> int:
        return len(self.omegas)


@dataclass(frozen=True)
class SystemSpec:
    omega: float
    drive_Omega: Optional[float] = None


@dataclass(frozen=True)
class TruncationSpec:
    """Numerical resolution for oracle and series computations."""

    fock_cutoff: int = 30
    series_order: int = 4
    quad_points: Optional[int] = None
    tol: float = 1e-8

    def __post_init__(self):
        if int(self.fock_cutoff) < 1:
            raise ModelError("fock_cutoff must be >= 1")
        if int(self.series_order) < 0:
            raise ModelError("series_order must be >= 0")
        if self.quad_points is not None and int(self.quad_points) < 2:
            raise ModelError("quad_points must be >= 2")
        if not 0.0 < float(self.tol) < 1.0:
            raise ModelError("tol must lie in (0, 1)")


@dataclass(frozen=True)
class Model:
    """Validated handle returned by :func:`validate_model`.

    Holds the system splitting, the optional drive frequency and the bath as
    read-only numpy arrays.  Create it through :func:`validate_model` only.
    """

    omega: float
    kind: BathKind
    omegas: np.ndarray = field(repr=False)
    couplings: np.ndarray = field(repr=False)
    drive_Omega: Optional[float] = None

    @property
    def M(self) -> int:
        return self.omegas.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return (
            self.omega == other.omega
            and self.kind == other.kind
            and self.drive_Omega == other.drive_Omega
            and np.array_equal(self.omegas, other.omegas)
            and np.array_equal(self.couplings, other.couplings)
        )

    def __hash__(self):
        return hash((self.omega, self.kind, self.drive_Omega,
                     self.omegas.tobytes(), self.couplings.tobytes()))

    def labels(self, values, name: str = "labels") -> np.ndarray:
        """Return ``values`` as a complex array of length M or raise ModelError."""
        arr = np.atleast_1d(np.asarray(values, dtype=complex))
        if arr.ndim != 1 or arr.shape[0] != self.M:
            raise ModelError(f"{name}: expected {self.M} coherent labels, got {arr.shape[0]}")
        if not _finite(arr):
            raise ModelError(f"{name}: non-finite coherent label")
        return arr

    def mode_index(self, k: int) -> int:
        if not 0 <= k < self.M:
            raise ModelError(f"mode index {k} out of range for M={self.M}")
        return int(k)


def validate_model(system: SystemSpec, bath: BathSpec) -> Model:
    """Check every invariant of ``system`` and ``bath`` and freeze them.

    Raises:
        ModelError: naming the first violated invariant.
    """
    if not math.isfinite(system.omega):
        raise ModelError("non-finite system frequency")
    if system.drive_Omega is not None and not math.isfinite(system.drive_Omega):
        raise ModelError("non-finite drive frequency")
    if len(bath.omegas) != len(bath.couplings):
        raise ModelError(
            f"length mismatch: {len(bath.omegas)} frequencies, {len(bath.couplings)} couplings")
    omegas = np.array(bath.omegas, dtype=float)
    couplings = np.array(bath.couplings, dtype=float)
    if not _finite(omegas):
        raise ModelError("non-finite mode frequency")
    if np.any(omegas <= 0.0):
        raise ModelError("non-positive mode frequency")
    if not _finite(couplings):
        raise ModelError("non-finite coupling")
    omegas.flags.writeable = False
    couplings.flags.writeable = False
    drive = None if system.drive_Omega is None else float(system.drive_Omega)
    return Model(float(system.omega), bath.kind, omegas, couplings, drive)


def make_model(omega: float, omegas: Sequence[float] = (), couplings: Sequence[float] = (),
               kind: str | BathKind = BathKind.OSCILLATOR,
               drive_Omega: Optional[float] = None) -> Model:
    """Shorthand for ``validate_model(SystemSpec(...), BathSpec(...))``."""
    return validate_model(SystemSpec(omega, drive_Omega), BathSpec(BathKind(kind), omegas, couplings))


@dataclass(frozen=True)
class Propagator2x2:
    """System-space amplitudes multiplying a shared scalar bath factor.

    ``matrix`` gives the full kernel ``drive_factor * bath_kernel * amplitudes``.
    """

    bath_kernel: complex
    amplitudes: np.ndarray
    drive_factor: complex = 1.0 + 0.0j

    @property
    def matrix(self) -> np.ndarray:
        return self.drive_factor * self.bath_kernel * self.amplitudes


def free_bath_kernel(model: Model, t: float, alpha_star: np.ndarray,
                     alpha_prime: np.ndarray) -> complex:
    """``exp(sum_k a*_k a'_k exp(-i w_k t))``: the uncoupled oscillator-bath kernel."""
    return complex(np.exp(np.sum(alpha_star * alpha_prime * np.exp(-1j * model.omegas * t))))
